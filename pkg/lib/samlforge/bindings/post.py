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
HTTP-POST binding.

A message travels base64 encoded in the ``SAMLResponse`` or ``SAMLRequest``
field of an auto submitting HTML form, optionally with a ``RelayState``
field. Form URL encoding is applied only when the body is serialized.
"""

from base64 import b64encode, b64decode
from binascii import Error as BinasciiError
from collections import namedtuple
from urllib.parse import parse_qs, urlencode

from .errors import (
    RelayStateTooLong, MissingField, BadBase64, BadUrlEncoding,
)
from ..templates import render


FIELD_RESPONSE = 'SAMLResponse'
FIELD_REQUEST = 'SAMLRequest'
FIELD_RELAY_STATE = 'RelayState'

FIELDS = (FIELD_RESPONSE, FIELD_REQUEST)

KINDS = {
    'response': FIELD_RESPONSE,
    'request': FIELD_REQUEST,
}

MAX_RELAY_STATE = 80


PostForm = namedtuple(
    'PostForm', ['action_url', 'saml_field', 'saml_value', 'relay_state']
)
PostForm.__doc__ = """
HTML form carrying a protocol message.

:var str action_url: Where the browser submits the form.
:var str saml_field: ``SAMLResponse`` or ``SAMLRequest``.
:var str saml_value: Base64 of the message bytes.
:var str relay_state: Opaque relay state, or ``None``.
"""


DecodedMessage = namedtuple(
    'DecodedMessage', ['message', 'relay_state', 'field']
)
DecodedMessage.__doc__ = """
Message recovered from a front channel binding.

:var bytes message: The message bytes.
:var str relay_state: Relay state, ``None`` when absent or empty.
:var str field: Name of the field the message was found in.
"""


def check_relay_state(relay_state):
    """
    Normalize a relay state value.

    :return: The relay state, or ``None`` when absent or empty.

    :raise RelayStateTooLong: when longer than 80 bytes.
    """
    if not relay_state:
        return None
    length = len(relay_state.encode('utf-8'))
    if length > MAX_RELAY_STATE:
        raise RelayStateTooLong(length, MAX_RELAY_STATE)
    return relay_state


def parse_form(text):
    """
    Parse an ``application/x-www-form-urlencoded`` string.

    :param text: The form body or query string, as ASCII bytes or string.

    :raise BadUrlEncoding: for undecodable input or repeated fields.

    :return: Mapping of field name to its single value.
    :rtype: dict
    """
    if isinstance(text, bytes):
        try:
            text = text.decode('ascii')
        except UnicodeDecodeError:
            raise BadUrlEncoding('non ASCII bytes in form')

    if not isinstance(text, str):
        raise BadUrlEncoding('expected a string, got {}'.format(type(text)))

    if not text:
        return {}

    try:
        parsed = parse_qs(
            text,
            keep_blank_values=True,
            strict_parsing=True,
            encoding='utf-8',
            errors='strict',
        )
    except ValueError as e:
        raise BadUrlEncoding(str(e))

    form = {}
    for key, values in parsed.items():
        if len(values) != 1:
            raise BadUrlEncoding('field {} repeated'.format(key))
        form[key] = values[0]
    return form


def decode_base64_field(form, field):
    """
    Strictly decode a base64 field of a parsed form.

    :raise BadBase64: for empty values or any non base64 character.
    """
    value = form[field]
    if not value:
        raise BadBase64(field)
    try:
        return b64decode(value, validate=True)
    except (BinasciiError, ValueError):
        raise BadBase64(field)


def extract_message(form, fields=FIELDS):
    """
    Extract the message and relay state of a parsed form.

    :param dict form: Parsed form, see :func:`parse_form`.
    :param tuple fields: Accepted message field names.

    :rtype: DecodedMessage
    """
    present = [field for field in fields if field in form]
    if not present:
        raise MissingField('/'.join(fields))
    if len(present) > 1:
        raise BadUrlEncoding('more than one message field present')

    field = present[0]
    message = decode_base64_field(form, field)
    relay_state = check_relay_state(form.get(FIELD_RELAY_STATE))
    return DecodedMessage(message, relay_state, field)


def encode_post(message, kind, action_url, relay_state=None):
    """
    Place a message in a POST form.

    :param bytes message: Canonical message bytes.
    :param str kind: ``request`` or ``response``.
    :param str action_url: Where the form is submitted.
    :param str relay_state: Optional relay state.

    :raise RelayStateTooLong: when the relay state exceeds 80 bytes.

    :rtype: PostForm
    """
    if kind not in KINDS:
        raise ValueError('Unknown message kind {!r}'.format(kind))
    return PostForm(
        action_url=action_url,
        saml_field=KINDS[kind],
        saml_value=b64encode(message).decode('ascii'),
        relay_state=check_relay_state(relay_state),
    )


def render_post(form, title='Single Sign-On'):
    """
    Auto submitting HTML page of a form. All values are HTML escaped.

    :rtype: str
    """
    return render('post_form.html', form=form, title=title)


def form_fields(form):
    """
    Ordered ``(name, value)`` pairs the browser submits for a form.
    """
    fields = [(form.saml_field, form.saml_value)]
    if form.relay_state is not None:
        fields.append((FIELD_RELAY_STATE, form.relay_state))
    return fields


def serialize_post(form):
    """
    Form URL encoded body the browser submits for a form.

    :rtype: bytes
    """
    return urlencode(form_fields(form)).encode('ascii')


def decode_post(body, fields=FIELDS):
    """
    Recover the message of a submitted POST form.

    The body is form URL decoded, then the message field is base64 decoded.

    :param bytes body: The ``application/x-www-form-urlencoded`` body.
    :param tuple fields: Accepted message field names.

    :raise MissingField: if no message field is present.
    :raise BadBase64: if the message field is not valid base64.
    :raise BadUrlEncoding: if the body is not a valid form.
    :raise RelayStateTooLong: when the relay state exceeds 80 bytes.

    :rtype: DecodedMessage
    """
    return extract_message(parse_form(body), fields)


__all__ = [
    'FIELD_RESPONSE',
    'FIELD_REQUEST',
    'FIELD_RELAY_STATE',
    'FIELDS',
    'MAX_RELAY_STATE',
    'PostForm',
    'DecodedMessage',
    'check_relay_state',
    'parse_form',
    'decode_base64_field',
    'extract_message',
    'encode_post',
    'render_post',
    'form_fields',
    'serialize_post',
    'decode_post',
]
