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
Browser actor of the simulator.

The browser only carries messages between the parties. It submits the forms
and follows the redirects it is given, recording every hop in the trace.
"""

from urllib.parse import urlsplit, urlunsplit, parse_qsl, urlencode

from ..bindings import (
    BindingError, serialize_post, decode_post, decode_redirect,
)
from ..bindings.artifact import FIELD_ARTIFACT
from ..codec import PARSE_ERRORS, parse_message


DEFAULT_IP = '192.168.0.189'


def summarize(message):
    """
    Short description of protocol message bytes.

    :rtype: str
    """
    try:
        parsed = parse_message(message)
    except PARSE_ERRORS as e:
        return 'undecodable message: {}'.format(e)
    except ValueError as e:
        return 'invalid message: {}'.format(e)
    return '{} {} from {}'.format(
        type(parsed).__name__, parsed.id, parsed.issuer
    )


class Browser:
    """
    User agent relaying messages.

    :param Trace trace: Where hops are recorded.
    :param callable clock: Returns the current simulated instant.
    :param str ip: Address the parties observe for this browser.
    """

    def __init__(self, trace, clock, ip=DEFAULT_IP):
        self.trace = trace
        self.clock = clock
        self.ip = ip

    def submit(self, form, hop):
        """
        Submit an auto submitting form.

        :param PostForm form: The form.
        :param str hop: Direction of the hop, as in ``idp->sp``.

        :return: The form URL encoded body received by the target.
        :rtype: bytes
        """
        body = serialize_post(form)
        try:
            summary = summarize(decode_post(body).message)
        except BindingError as e:
            summary = 'undecodable form: {}'.format(e)
        if form.relay_state is not None:
            summary += ' RelayState={}'.format(form.relay_state)

        self.trace.record(
            self.clock(), 'browser', hop, form.saml_field, body, summary
        )
        return body

    def follow(self, url, hop):
        """
        Follow a redirect.

        :param str url: Redirect URL.
        :param str hop: Direction of the hop.

        :return: The URL requested from the target.
        :rtype: str
        """
        fields = dict(parse_qsl(urlsplit(url).query))
        if FIELD_ARTIFACT in fields:
            kind = FIELD_ARTIFACT
            summary = '{} artifacts'.format(
                sum(1 for name in fields if name.startswith(FIELD_ARTIFACT))
            )
        else:
            kind = 'redirect'
            try:
                decoded = decode_redirect(url)
                kind = decoded.field
                summary = summarize(decoded.message)
            except BindingError as e:
                summary = 'undecodable redirect: {}'.format(e)

        self.trace.record(self.clock(), 'browser', hop, kind, url, summary)
        return url


def drop_field(url, field):
    """
    The same URL without one query field.

    :rtype: str
    """
    parts = urlsplit(url)
    query = [
        (name, value) for name, value in parse_qsl(parts.query)
        if name != field
    ]
    return urlunsplit(parts._replace(query=urlencode(query)))


__all__ = [
    'DEFAULT_IP',
    'summarize',
    'Browser',
    'drop_field',
]
