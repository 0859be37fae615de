# -*- coding: utf-8 -*-
#
# Copyright (C) 2019 KuraLabs S.R.L
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing,
# software distributed under the License is distributed on an
# "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
# KIND, either express or implied.  See the License for the
# specific language governing permissions and limitations
# under the License.

"""
RelayState tokens of the service provider.

The relay state sent to an identity provider is a random token, never the
target URL itself. Resolution only ever yields a URL that was issued with a
token, configured in the partner policy, or the default landing.
"""

from secrets import token_urlsafe
from threading import Lock
from collections import namedtuple

from ..core.instant import to_instant, seconds, shift
from ..logging import get_logger


log = get_logger(__name__)


TOKEN_BYTES = 16


PendingRelay = namedtuple('PendingRelay', ['target', 'expiry'])


class RelayStateStore:
    """
    Single use relay state tokens with an expiry.
    """

    def __init__(self):
        self._tokens = {}
        self._lock = Lock()

    def __len__(self):
        return len(self._tokens)

    def issue(self, target, now, ttl):
        """
        Create a token standing for a target resource.

        :param str target: URL the user wanted.
        :param datetime now: Current instant.
        :param int ttl: Seconds the token stays usable.

        :return: The token, 22 URL safe characters.
        :rtype: str
        """
        token = token_urlsafe(TOKEN_BYTES)
        with self._lock:
            self._tokens[token] = PendingRelay(
                target, shift(to_instant(now), seconds(ttl))
            )
        return token

    def redeem(self, token, now):
        """
        Consume a token.

        :return: The target of the token, or ``None`` if the token is
         unknown, used or expired.
        :rtype: str
        """
        with self._lock:
            pending = self._tokens.pop(token, None)
        if pending is None or to_instant(now) >= pending.expiry:
            return None
        return pending.target

    def evict(self, now):
        now = to_instant(now)
        with self._lock:
            expired = [
                token for token, pending in self._tokens.items()
                if now >= pending.expiry
            ]
            for token in expired:
                del self._tokens[token]
        return len(expired)


def resolve_relay_state(
        store, token, now, default_landing, relay_state_map=None):
    """
    Map an inbound relay state to the application URL to send the user to.

    :param RelayStateStore store: Tokens issued by the service provider.
    :param str token: Relay state received, or ``None``.
    :param datetime now: Current instant.
    :param str default_landing: Fallback URL.
    :param dict relay_state_map: Static token to URL table of the partner.

    :return: A pair with the URL and a warning, or ``None`` as warning when
     the token was resolved.
    :rtype: tuple
    """
    if token is None:
        return default_landing, None

    target = store.redeem(token, now)
    if target is not None:
        return target, None

    if relay_state_map and token in relay_state_map:
        return relay_state_map[token], None

    warning = 'Unknown relay state {!r}, using default landing'.format(token)
    log.warning(warning)
    return default_landing, warning


__all__ = [
    'PendingRelay',
    'RelayStateStore',
    'resolve_relay_state',
]
