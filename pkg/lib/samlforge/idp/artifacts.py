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
Messages waiting to be resolved through the artifact binding.
"""

from threading import Lock
from collections import namedtuple

from .errors import (
    UnknownArtifact, AlreadyConsumed, ArtifactExpired, WrongRequester,
    IncompletePair, MismatchedPair,
)
from ..core.instant import to_instant
from ..logging import get_logger


log = get_logger(__name__)


DEFAULT_TTL = 300


ArtifactEntry = namedtuple(
    'ArtifactEntry', [
        'handle', 'message', 'issued_at', 'partner', 'consumed',
        'pair_handle', 'carrier',
    ]
)
ArtifactEntry.__doc__ = """
Stored message.

:var bytes handle: Message handle of the artifact.
:var bytes message: The message, as resolved.
:var str partner: Entity the artifact was issued to.
:var bool consumed: Whether the entry was already resolved.
:var bytes pair_handle: Handle of the other half of a pair, or ``None``.
:var bool carrier: Whether this entry holds the message of its pair.
"""


class ArtifactStore:
    """
    Single use store of artifact messages.

    Resolution is an atomic test and set: an entry is handed out once. An
    entry is expired when more than ``ttl`` seconds passed since its
    issuance.

    :param int ttl: Retention of the entries in seconds.
    """

    def __init__(self, ttl=DEFAULT_TTL):
        self.ttl = ttl
        self._entries = {}
        self._lock = Lock()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, handle):
        return handle in self._entries

    def put(self, handle, message, partner, issued_at, pair_handle=None,
            carrier=True):
        with self._lock:
            if handle in self._entries:
                raise ValueError('Handle {} already stored'.format(
                    handle.hex()
                ))
            self._entries[handle] = ArtifactEntry(
                handle=handle,
                message=message,
                issued_at=to_instant(issued_at),
                partner=partner,
                consumed=False,
                pair_handle=pair_handle,
                carrier=carrier,
            )

    def put_pair(self, first, second, message, partner, issued_at):
        """
        Store one message behind two handles that must be resolved
        together.
        """
        self.put(first, message, partner, issued_at, pair_handle=second)
        self.put(
            second, b'', partner, issued_at, pair_handle=first, carrier=False
        )

    def _entry(self, handle):
        entry = self._entries.get(handle)
        if entry is None:
            raise UnknownArtifact(handle)
        return entry

    def _check(self, entry, requester, now):
        if requester is not None and requester != entry.partner:
            raise WrongRequester(requester, entry.partner)
        if entry.consumed:
            raise AlreadyConsumed(entry.handle)
        age = int((now - entry.issued_at).total_seconds())
        if age > self.ttl:
            raise ArtifactExpired(entry.handle, age)

    def _consume(self, entry):
        self._entries[entry.handle] = entry._replace(
            consumed=True, message=b''
        )

    def resolve(self, handle, now, requester=None):
        """
        Resolve a single artifact.

        :param bytes handle: Message handle of the artifact.
        :param datetime now: Current instant.
        :param str requester: Entity asking for the message. Checked
         against the partner the artifact was issued to when given.

        :raise UnknownArtifact: if the handle was never issued.
        :raise IncompletePair: if the handle is one half of a pair.
        :raise WrongRequester: if the artifact was issued to someone else.
        :raise AlreadyConsumed: if the handle was already resolved.
        :raise ArtifactExpired: if the retention window passed.

        :rtype: bytes
        """
        now = to_instant(now)
        with self._lock:
            entry = self._entry(handle)
            if entry.pair_handle is not None:
                log.warning('Single presentation of paired artifact {}'.format(
                    handle.hex()
                ))
                raise IncompletePair(handle)
            self._check(entry, requester, now)
            self._consume(entry)

        log.info('Artifact {} resolved by {}'.format(
            handle.hex(), requester or entry.partner
        ))
        return entry.message

    def resolve_pair(self, first, second, now, requester=None):
        """
        Resolve the two halves of a pair, presented together in any order.

        :raise MismatchedPair: if the handles are not the two halves of one
         pair.

        See :meth:`resolve` for the other errors.

        :rtype: bytes
        """
        now = to_instant(now)
        with self._lock:
            head = self._entry(first)
            tail = self._entry(second)
            if tail.carrier:
                head, tail = tail, head
            if head.pair_handle != tail.handle \
                    or tail.pair_handle != head.handle \
                    or not head.carrier or tail.carrier:
                log.warning('Mismatched artifact pair {} / {}'.format(
                    first.hex(), second.hex()
                ))
                raise MismatchedPair(first, second)

            self._check(head, requester, now)
            self._check(tail, requester, now)
            self._consume(head)
            self._consume(tail)

        log.info('Artifact pair {} / {} resolved'.format(
            first.hex(), second.hex()
        ))
        return head.message

    def expire(self, now):
        """
        Forget the entries past their retention window.

        :return: Number of entries forgotten.
        :rtype: int
        """
        now = to_instant(now)
        with self._lock:
            expired = [
                handle for handle, entry in self._entries.items()
                if (now - entry.issued_at).total_seconds() > self.ttl
            ]
            for handle in expired:
                del self._entries[handle]
        return len(expired)


__all__ = [
    'DEFAULT_TTL',
    'ArtifactEntry',
    'ArtifactStore',
]
