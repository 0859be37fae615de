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
HTTP-Redirect binding.

The message is compressed with raw DEFLATE (no zlib header nor checksum),
base64 encoded and percent encoded as the ``SAMLRequest`` or
``SAMLResponse`` query parameter of the redirect URL. The whole URL must not
exceed 2048 bytes.
"""

from zlib import compressobj, decompressobj, DEFLATED, error as ZlibError
from base64 import b64encode
from collections import namedtuple
from urllib.parse import urlencode, urlsplit

from .errors import UrlTooLong, BadDeflate, BadUrlEncoding
from .post import (
    FIELDS, KINDS, FIELD_RELAY_STATE, DecodedMessage,
    check_relay_state, parse_form, extract_message,
)
from ..codec.xml import MAX_DOCUMENT_SIZE


MAX_URL_LENGTH = 2048
RAW_DEFLATE = -15


class RedirectUrl(namedtuple(
        'RedirectUrl', ['base', 'saml_field', 'saml_value', 'relay_state'])):
    """
    Redirect carrying a protocol message.

    :var str base: Endpoint URL, possibly with its own query string.
    :var str saml_field: ``SAMLRequest`` or ``SAMLResponse``.
    :var str saml_value: Base64 of the deflated message.
    :var str relay_state: Relay state, or ``None``.
    """

    __slots__ = ()

    @property
    def query(self):
        params = [(self.saml_field, self.saml_value)]
        if self.relay_state is not None:
            params.append((FIELD_RELAY_STATE, self.relay_state))
        return urlencode(params)

    @property
    def url(self):
        separator = '&' if '?' in self.base else '?'
        return '{}{}{}'.format(self.base, separator, self.query)

    def __str__(self):
        return self.url


RedirectResponse = namedtuple('RedirectResponse', ['status', 'headers'])


def deflate(data):
    compressor = compressobj(9, DEFLATED, RAW_DEFLATE)
    return compressor.compress(data) + compressor.flush()


def inflate(data, limit=MAX_DOCUMENT_SIZE):
    """
    Inflate a raw DEFLATE stream.

    :raise BadDeflate: for corrupted, truncated or oversized streams.
    """
    decompressor = decompressobj(RAW_DEFLATE)
    try:
        inflated = decompressor.decompress(data, limit + 1)
    except ZlibError as e:
        raise BadDeflate(str(e))

    if len(inflated) > limit:
        raise BadDeflate('inflated message larger than {} bytes'.format(limit))
    if not decompressor.eof:
        raise BadDeflate('truncated stream')
    if decompressor.unused_data:
        raise BadDeflate('trailing data after stream')
    return inflated


def encode_redirect(message, base_url, relay_state=None, kind='request'):
    """
    Place a message in a redirect URL.

    :param bytes message: Canonical message bytes.
    :param str base_url: Endpoint URL.
    :param str relay_state: Optional relay state.
    :param str kind: ``request`` or ``response``.

    :raise UrlTooLong: if the resulting URL exceeds 2048 bytes.

    :rtype: RedirectUrl
    """
    if kind not in KINDS:
        raise ValueError('Unknown message kind {!r}'.format(kind))

    redirect = RedirectUrl(
        base=base_url,
        saml_field=KINDS[kind],
        saml_value=b64encode(deflate(message)).decode('ascii'),
        relay_state=check_relay_state(relay_state),
    )

    length = len(redirect.url.encode('utf-8'))
    if length > MAX_URL_LENGTH:
        raise UrlTooLong(length, MAX_URL_LENGTH)
    return redirect


def query_of(url):
    """
    Query string of a URL. A string without ``?`` is taken as a query
    string.
    """
    if isinstance(url, bytes):
        try:
            url = url.decode('ascii')
        except UnicodeDecodeError:
            raise BadUrlEncoding('non ASCII bytes in URL')

    if not isinstance(url, str):
        raise BadUrlEncoding('expected a string, got {}'.format(type(url)))

    if '?' not in url:
        return url

    try:
        return urlsplit(url).query
    except ValueError as e:
        raise BadUrlEncoding(str(e))


def decode_redirect(url, fields=FIELDS):
    """
    Recover the message of a redirect URL.

    :param str url: The full URL, or just its query string.
    :param tuple fields: Accepted message field names.

    :raise MissingField: if no message parameter is present.
    :raise BadBase64: if the message parameter is not valid base64.
    :raise BadDeflate: if the decoded bytes are not a raw DEFLATE stream.
    :raise BadUrlEncoding: if the query string is malformed.

    :rtype: DecodedMessage
    """
    decoded = extract_message(parse_form(query_of(url)), fields)
    return DecodedMessage(
        inflate(decoded.message), decoded.relay_state, decoded.field
    )


def render_redirect_response(url, status=302):
    """
    Status and headers of an HTTP redirect.

    :param url: A :class:`RedirectUrl` or a plain URL.

    :rtype: RedirectResponse
    """
    return RedirectResponse(status, [('Location', str(url))])


__all__ = [
    'MAX_URL_LENGTH',
    'RedirectUrl',
    'RedirectResponse',
    'deflate',
    'inflate',
    'encode_redirect',
    'query_of',
    'decode_redirect',
    'render_redirect_response',
]
