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
Inspection of captured messages.

Decodes what a browser carried, a POST body or a redirect URL, field by
field: URL decoding, base64, inflation for the redirect binding, and an
indented rendition of the XML. Responses are summarized and their
attributes compared with the attributes a service provider requests in its
metadata.
"""

from collections import namedtuple

from pprintpp import pformat

from ..bindings import decode_post, decode_redirect
from ..codec import (
    parse_xml, pretty, element_to_message, element_to_assertion,
)
from ..core.types import Response
from ..crypto import decrypt_assertion
from ..logging import get_logger


log = get_logger(__name__)


Decoded = namedtuple('Decoded', [
    'binding', 'field', 'relay_state', 'xml', 'message', 'assertion',
    'missing', 'extra',
])
Decoded.__doc__ = """
A decoded capture.

:var str binding: ``post`` or ``redirect``.
:var str field: Field the message was carried in.
:var str relay_state: Relay state, or ``None``.
:var str xml: Indented XML of the message.
:var message: The parsed protocol message.
:var Assertion assertion: Assertion of a response, decrypted if possible.
:var list missing: Requested attributes the response does not carry.
:var list extra: Attributes the response carries without being requested.
"""


def looks_like_url(text):
    return text.startswith(('http://', 'https://', '/')) or '?' in text


def compare_attributes(assertion, expected):
    """
    Compare the attributes of an assertion with requested attributes.

    :param Assertion assertion: The assertion.
    :param list expected: :class:`RequestedAttribute` of a service provider.

    :return: A pair of lists, the missing required names and the extra
     names.
    :rtype: tuple
    """
    received = {attribute.name for attribute in assertion.attributes}
    requested = {attribute.name for attribute in expected}
    missing = sorted(
        attribute.name for attribute in expected
        if attribute.is_required and attribute.name not in received
    )
    extra = sorted(received - requested)
    return missing, extra


def decode_capture(capture, metadata=None, store=None):
    """
    Decode a captured POST body or redirect URL.

    :param capture: Captured text or bytes.
    :param EntityDescriptor metadata: Service provider whose requested
     attributes are compared with the attributes received.
    :param KeyStore store: Keystore to decrypt assertions with.

    :raise BindingError: if the capture does not decode.
    :raise CodecError: if the message does not parse.

    :rtype: Decoded
    """
    if isinstance(capture, bytes):
        capture = capture.decode('utf-8', errors='replace')
    capture = capture.strip()

    if looks_like_url(capture):
        binding = 'redirect'
        decoded = decode_redirect(capture)
    else:
        binding = 'post'
        decoded = decode_post(capture.encode('utf-8'))

    node = parse_xml(decoded.message)
    message = element_to_message(node)
    log.debug('Decoded message:\n{}'.format(pformat(message)))

    assertion = None
    if isinstance(message, Response):
        assertion = message.assertion
        if message.is_encrypted:
            assertion = None
            if store is not None:
                assertion = element_to_assertion(parse_xml(
                    decrypt_assertion(message.assertion, store)
                ))

    missing, extra = [], []
    if assertion is not None and metadata is not None and metadata.is_sp:
        missing, extra = compare_attributes(
            assertion, metadata.role.requested_attributes
        )

    return Decoded(
        binding=binding,
        field=decoded.field,
        relay_state=decoded.relay_state,
        xml=pretty(decoded.message),
        message=message,
        assertion=assertion,
        missing=missing,
        extra=extra,
    )


def format_decoded(decoded):
    """
    Human readable rendition of a decoded capture.

    :rtype: str
    """
    message = decoded.message
    lines = [
        'Binding: {}'.format(decoded.binding),
        'Field: {}'.format(decoded.field),
        'RelayState: {}'.format(
            decoded.relay_state if decoded.relay_state is not None else '-'
        ),
        'Message: {} {}'.format(type(message).__name__, message.id),
        'Issuer: {}'.format(message.issuer),
    ]

    if isinstance(message, Response):
        lines.extend([
            'Destination: {}'.format(message.destination),
            'Status: {}'.format(message.status),
            'Signed response: {}'.format(
                'yes' if message.signature is not None else 'no'
            ),
            'Encrypted assertion: {}'.format(
                'yes' if message.is_encrypted else 'no'
            ),
        ])

    assertion = decoded.assertion
    if assertion is not None:
        conditions = assertion.conditions
        lines.extend([
            'Subject: {}'.format(assertion.subject.name_id),
            'Signed assertion: {}'.format(
                'yes' if assertion.signature is not None else 'no'
            ),
        ])
        if conditions is not None:
            lines.append('Valid: {} to {}'.format(
                conditions.not_before, conditions.not_on_or_after
            ))
        lines.append('Attributes:')
        for attribute in assertion.attributes:
            lines.append('  {} = {}'.format(
                attribute.name, ', '.join(attribute.values)
            ))

    if decoded.missing:
        lines.append('Missing attributes: {}'.format(
            ', '.join(decoded.missing)
        ))
    if decoded.extra:
        lines.append('Extra attributes: {}'.format(
            ', '.join(decoded.extra)
        ))

    lines.extend(['', decoded.xml])
    return '\n'.join(lines)


__all__ = [
    'Decoded',
    'compare_attributes',
    'decode_capture',
    'format_decoded',
]
