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
HTTP-Artifact binding.

An artifact is the base64 encoding of 44 bytes::

    type code (2, always 0x0004) || endpoint index (2, big endian)
        || source id (20, SHA-1 of the issuer entity id)
        || message handle (20, random)

Artifacts travel in the ``SAMLart`` parameter. The second artifact of a
pair travels in ``SAMLart2``.
"""

from hashlib import sha1
from secrets import token_bytes
from struct import pack, unpack
from base64 import b64encode, b64decode
from binascii import Error as BinasciiError
from collections import namedtuple
from urllib.parse import urlencode

from .errors import BadBase64, BadLength, BadTypeCode, MissingField
from .post import FIELD_RELAY_STATE, check_relay_state, parse_form
from .redirect import query_of


TYPE_CODE = 0x0004
ARTIFACT_LENGTH = 44
SOURCE_ID_LENGTH = 20
HANDLE_LENGTH = 20

FIELD_ARTIFACT = 'SAMLart'
FIELD_ARTIFACT_PAIR = 'SAMLart2'


def source_id_for(entity_id):
    """
    Source id of an issuer: SHA-1 of its entity id UTF-8 bytes.

    :rtype: bytes
    """
    return sha1(entity_id.encode('utf-8')).digest()


class Artifact(namedtuple(
        'Artifact',
        ['type_code', 'endpoint_index', 'source_id', 'message_handle'])):

    __slots__ = ()

    def __new__(cls, type_code, endpoint_index, source_id, message_handle):
        if type_code != TYPE_CODE:
            raise BadTypeCode(type_code)
        if not isinstance(endpoint_index, int) or \
                not 0 <= endpoint_index < 65536:
            raise ValueError(
                'Endpoint index out of range: {!r}'.format(endpoint_index)
            )
        if len(source_id) != SOURCE_ID_LENGTH:
            raise ValueError('Source id must be 20 bytes')
        if len(message_handle) != HANDLE_LENGTH:
            raise ValueError('Message handle must be 20 bytes')
        return super().__new__(
            cls, type_code, endpoint_index, bytes(source_id),
            bytes(message_handle)
        )

    def to_bytes(self):
        return (
            pack('>HH', self.type_code, self.endpoint_index) +
            self.source_id + self.message_handle
        )

    def encode(self):
        """
        Base64 form of the artifact, as carried in ``SAMLart``.

        :rtype: str
        """
        return b64encode(self.to_bytes()).decode('ascii')

    def __str__(self):
        return self.encode()


def new_artifact(issuer, endpoint_index):
    """
    Create an artifact with a fresh random message handle.

    :param str issuer: Entity id of the issuing party.
    :param int endpoint_index: Index of the resolution endpoint.

    :rtype: Artifact
    """
    return Artifact(
        TYPE_CODE, endpoint_index, source_id_for(issuer),
        token_bytes(HANDLE_LENGTH),
    )


def parse_artifact(text):
    """
    Parse the base64 form of an artifact.

    :raise BadBase64: if the text is not base64.
    :raise BadLength: if the decoded value is not 44 bytes.
    :raise BadTypeCode: if the type code is not 0x0004.

    :rtype: Artifact
    """
    if not text:
        raise BadBase64(FIELD_ARTIFACT)
    try:
        raw = b64decode(text, validate=True)
    except (BinasciiError, ValueError, TypeError):
        raise BadBase64(FIELD_ARTIFACT)

    if len(raw) != ARTIFACT_LENGTH:
        raise BadLength(len(raw))

    type_code, endpoint_index = unpack('>HH', raw[:4])
    if type_code != TYPE_CODE:
        raise BadTypeCode(type_code)

    return Artifact(type_code, endpoint_index, raw[4:24], raw[24:])


def artifact_fields(artifacts, relay_state=None):
    """
    ``(name, value)`` pairs carrying one artifact or a pair of artifacts.
    """
    artifacts = list(artifacts)
    if len(artifacts) not in (1, 2):
        raise ValueError('Expected one or two artifacts')

    names = (FIELD_ARTIFACT, FIELD_ARTIFACT_PAIR)
    fields = [
        (name, artifact.encode())
        for name, artifact in zip(names, artifacts)
    ]
    relay_state = check_relay_state(relay_state)
    if relay_state is not None:
        fields.append((FIELD_RELAY_STATE, relay_state))
    return fields


def encode_artifact_url(base_url, artifacts, relay_state=None):
    """
    Redirect URL delivering artifacts to an artifact consumer endpoint.

    :rtype: str
    """
    separator = '&' if '?' in base_url else '?'
    return '{}{}{}'.format(
        base_url, separator, urlencode(artifact_fields(artifacts, relay_state))
    )


def decode_artifact_form(text):
    """
    Extract artifacts from a query string, a redirect URL or a form body.

    :raise MissingField: if there is no ``SAMLart`` field.

    :return: A tuple ``(artifacts, relay_state)``, where artifacts holds one
     or two :class:`Artifact`.
    :rtype: tuple
    """
    form = parse_form(query_of(text))
    if FIELD_ARTIFACT not in form:
        raise MissingField(FIELD_ARTIFACT)

    artifacts = [parse_artifact(form[FIELD_ARTIFACT])]
    if FIELD_ARTIFACT_PAIR in form:
        artifacts.append(parse_artifact(form[FIELD_ARTIFACT_PAIR]))

    return tuple(artifacts), check_relay_state(form.get(FIELD_RELAY_STATE))


__all__ = [
    'TYPE_CODE',
    'ARTIFACT_LENGTH',
    'FIELD_ARTIFACT',
    'FIELD_ARTIFACT_PAIR',
    'source_id_for',
    'Artifact',
    'new_artifact',
    'parse_artifact',
    'artifact_fields',
    'encode_artifact_url',
    'decode_artifact_form',
]
