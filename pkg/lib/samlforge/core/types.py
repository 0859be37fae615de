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
Domain model of the federation messages.

All types are immutable named tuples. Constructors validate the invariants
of each type and normalize timestamps to second precision UTC instants, so a
value that exists is a value that can be emitted.
"""

from re import compile as regex
from enum import Enum
from secrets import token_hex
from datetime import datetime
from collections import namedtuple

from .instant import to_instant
from .urns import ALG_C14N, STATUS_PREFIX


STATUS_REGEX = regex(
    '^' + STATUS_PREFIX.replace('.', r'\.') + r'[A-Za-z]+$'
)


class InvalidValue(ValueError):
    """
    Raised when a value violates the invariants of its type.
    """

    code = 'InvalidValue'

    def __init__(self, typename, reason):
        super().__init__('Invalid {}: {}'.format(typename, reason))
        self.typename = typename
        self.reason = reason


class UnsupportedMethod(ValueError):
    """
    Raised when a subject confirmation method other than bearer is evaluated.
    """

    code = 'UnsupportedMethod'

    def __init__(self, method):
        super().__init__(
            'Unsupported subject confirmation method {}'.format(method)
        )
        self.method = method


def _text(typename, field, value, optional=False):
    if value is None and optional:
        return None
    if not isinstance(value, str) or not value:
        raise InvalidValue(
            typename, '{} must be a non-empty string'.format(field)
        )
    return value


def new_id():
    """
    Fresh message ID, an underscore and 160 random bits in hex.
    """
    return '_' + token_hex(20)


def _instant(typename, field, value):
    if not isinstance(value, datetime):
        raise InvalidValue(
            typename, '{} must be a datetime, got {!r}'.format(field, value)
        )
    return to_instant(value)


def _status(typename, value):
    if not isinstance(value, str) or not STATUS_REGEX.match(value):
        raise InvalidValue(
            typename, 'malformed status URN {!r}'.format(value)
        )
    return value


class EntityId(str):
    """
    Identifier of a federation party, as in ``mycompany:saml2.0``.
    """

    __slots__ = ()

    def __new__(cls, value):
        if not isinstance(value, str) or not value:
            raise InvalidValue('EntityId', 'must be a non-empty string')
        if value != value.strip():
            raise InvalidValue(
                'EntityId',
                'leading or trailing whitespace in {!r}'.format(value)
            )
        return super().__new__(cls, value)


class Conditions(namedtuple(
        'Conditions', ['not_before', 'not_on_or_after', 'audiences'])):
    """
    Validity window and audience restriction of an assertion.

    The window is not checked for ordering, a reversed window is a value that
    evaluates as never valid.
    """

    __slots__ = ()

    def __new__(cls, not_before, not_on_or_after, audiences=()):
        return super().__new__(
            cls,
            _instant('Conditions', 'not_before', not_before),
            _instant('Conditions', 'not_on_or_after', not_on_or_after),
            tuple(EntityId(audience) for audience in audiences),
        )


class SubjectConfirmation(namedtuple(
        'SubjectConfirmation',
        ['method', 'not_on_or_after', 'recipient', 'in_response_to'])):

    __slots__ = ()

    def __new__(cls, method, not_on_or_after, recipient, in_response_to=None):
        return super().__new__(
            cls,
            _text('SubjectConfirmation', 'method', method),
            _instant(
                'SubjectConfirmation', 'not_on_or_after', not_on_or_after
            ),
            _text('SubjectConfirmation', 'recipient', recipient),
            _text(
                'SubjectConfirmation', 'in_response_to', in_response_to,
                optional=True
            ),
        )


class Subject(namedtuple(
        'Subject', ['name_id', 'name_id_format', 'confirmation'])):

    __slots__ = ()

    def __new__(cls, name_id, name_id_format, confirmation):
        if not isinstance(confirmation, SubjectConfirmation):
            raise InvalidValue('Subject', 'confirmation missing')
        return super().__new__(
            cls,
            _text('Subject', 'name_id', name_id),
            _text('Subject', 'name_id_format', name_id_format, optional=True),
            confirmation,
        )


class AuthnStatement(namedtuple(
        'AuthnStatement', [
            'authn_instant', 'session_index',
            'locality_address', 'locality_dns', 'authn_context',
        ])):

    __slots__ = ()

    def __new__(
            cls, authn_instant, session_index,
            locality_address=None, locality_dns=None, authn_context=None):
        return super().__new__(
            cls,
            _instant('AuthnStatement', 'authn_instant', authn_instant),
            _text('AuthnStatement', 'session_index', session_index),
            _text(
                'AuthnStatement', 'locality_address', locality_address,
                optional=True
            ),
            _text(
                'AuthnStatement', 'locality_dns', locality_dns,
                optional=True
            ),
            _text(
                'AuthnStatement', 'authn_context', authn_context,
                optional=True
            ),
        )


class Attribute(namedtuple(
        'Attribute', ['name', 'friendly_name', 'name_format', 'values'])):

    __slots__ = ()

    def __new__(cls, name, friendly_name, name_format, values):
        values = tuple(values)
        if not values:
            raise InvalidValue(
                'Attribute', 'attribute {} has no values'.format(name)
            )
        for value in values:
            if not isinstance(value, str):
                raise InvalidValue(
                    'Attribute', 'value {!r} is not a string'.format(value)
                )
        return super().__new__(
            cls,
            _text('Attribute', 'name', name),
            _text('Attribute', 'friendly_name', friendly_name, optional=True),
            _text('Attribute', 'name_format', name_format, optional=True),
            values,
        )


class Signature(namedtuple(
        'Signature', [
            'reference_id', 'digest_algorithm', 'digest_value',
            'signature_algorithm', 'signature_value', 'certificate',
            'canonicalization',
        ])):
    """
    Enveloped signature over the canonical form of an element.

    :var str reference_id: ID attribute of the signed element.
    :var bytes digest_value: Digest of the canonical element without its
     signature.
    :var bytes signature_value: Signature over the canonical SignedInfo.
    :var bytes certificate: DER encoded signing certificate, or ``None`` when
     the signer is resolved through metadata only.
    """

    __slots__ = ()

    def __new__(
            cls, reference_id, digest_algorithm, digest_value,
            signature_algorithm, signature_value, certificate=None,
            canonicalization=ALG_C14N):
        for field, value in (
                ('digest_value', digest_value),
                ('signature_value', signature_value)):
            if not isinstance(value, bytes) or not value:
                raise InvalidValue(
                    'Signature', '{} must be non-empty bytes'.format(field)
                )
        if certificate is not None and not isinstance(certificate, bytes):
            raise InvalidValue('Signature', 'certificate must be DER bytes')
        return super().__new__(
            cls,
            _text('Signature', 'reference_id', reference_id),
            _text('Signature', 'digest_algorithm', digest_algorithm),
            digest_value,
            _text('Signature', 'signature_algorithm', signature_algorithm),
            signature_value,
            certificate,
            _text('Signature', 'canonicalization', canonicalization),
        )


class EncryptedAssertion(namedtuple(
        'EncryptedAssertion', [
            'algorithm', 'key_transport', 'encrypted_key',
            'iv', 'ciphertext', 'mac',
        ])):
    """
    Sealed assertion.

    The content key is wrapped with the recipient's public key together with
    the key of the integrity tag.
    """

    __slots__ = ()

    def __new__(
            cls, algorithm, key_transport, encrypted_key, iv, ciphertext, mac):
        for field, value in (
                ('encrypted_key', encrypted_key),
                ('ciphertext', ciphertext),
                ('mac', mac)):
            if not isinstance(value, bytes) or not value:
                raise InvalidValue(
                    'EncryptedAssertion',
                    '{} must be non-empty bytes'.format(field)
                )
        if not isinstance(iv, bytes) or len(iv) != 16:
            raise InvalidValue('EncryptedAssertion', 'iv must be 16 bytes')
        return super().__new__(
            cls,
            _text('EncryptedAssertion', 'algorithm', algorithm),
            _text('EncryptedAssertion', 'key_transport', key_transport),
            encrypted_key, iv, ciphertext, mac,
        )


class Assertion(namedtuple(
        'Assertion', [
            'id', 'issue_instant', 'issuer', 'subject', 'conditions',
            'authn_statement', 'attributes', 'signature', 'extensions',
        ])):
    """
    Authentication statement about a subject.

    :var tuple extensions: Foreign namespace elements found in the assertion,
     kept as :class:`samlforge.codec.xml.XmlElement` so they remain covered by
     the signature.
    """

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, subject, conditions,
            authn_statement, attributes=(), signature=None, extensions=()):
        if not isinstance(subject, Subject):
            raise InvalidValue('Assertion', 'subject missing')
        if not isinstance(conditions, Conditions):
            raise InvalidValue('Assertion', 'conditions missing')
        if not isinstance(authn_statement, AuthnStatement):
            raise InvalidValue('Assertion', 'authn statement missing')
        if signature is not None and not isinstance(signature, Signature):
            raise InvalidValue('Assertion', 'bad signature value')
        return super().__new__(
            cls,
            _text('Assertion', 'id', id),
            _instant('Assertion', 'issue_instant', issue_instant),
            EntityId(issuer),
            subject, conditions, authn_statement,
            tuple(attributes),
            signature,
            tuple(extensions),
        )


class Response(namedtuple(
        'Response', [
            'id', 'issue_instant', 'issuer', 'destination', 'status',
            'assertion', 'signature', 'in_response_to', 'consent',
            'extensions',
        ])):
    """
    Protocol response carrying at most one plain or encrypted assertion.
    """

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, destination, status,
            assertion=None, signature=None, in_response_to=None,
            consent=None, extensions=()):
        if assertion is not None and not isinstance(
                assertion, (Assertion, EncryptedAssertion)):
            raise InvalidValue('Response', 'bad assertion value')
        if signature is not None and not isinstance(signature, Signature):
            raise InvalidValue('Response', 'bad signature value')
        return super().__new__(
            cls,
            _text('Response', 'id', id),
            _instant('Response', 'issue_instant', issue_instant),
            EntityId(issuer),
            _text('Response', 'destination', destination, optional=True),
            _status('Response', status),
            assertion, signature,
            _text('Response', 'in_response_to', in_response_to, optional=True),
            _text('Response', 'consent', consent, optional=True),
            tuple(extensions),
        )

    @property
    def is_encrypted(self):
        return isinstance(self.assertion, EncryptedAssertion)


class AuthnRequest(namedtuple(
        'AuthnRequest', [
            'id', 'issue_instant', 'issuer', 'acs_url', 'signature',
            'destination', 'protocol_binding', 'name_id_format',
        ])):

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, acs_url, signature=None,
            destination=None, protocol_binding=None, name_id_format=None):
        if signature is not None and not isinstance(signature, Signature):
            raise InvalidValue('AuthnRequest', 'bad signature value')
        return super().__new__(
            cls,
            _text('AuthnRequest', 'id', id),
            _instant('AuthnRequest', 'issue_instant', issue_instant),
            EntityId(issuer),
            _text('AuthnRequest', 'acs_url', acs_url),
            signature,
            _text(
                'AuthnRequest', 'destination', destination, optional=True
            ),
            _text(
                'AuthnRequest', 'protocol_binding', protocol_binding,
                optional=True
            ),
            _text(
                'AuthnRequest', 'name_id_format', name_id_format,
                optional=True
            ),
        )


class LogoutRequest(namedtuple(
        'LogoutRequest', [
            'id', 'issue_instant', 'issuer', 'destination', 'name_id',
            'name_id_format', 'session_index', 'signature',
        ])):

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, destination, name_id,
            name_id_format, session_index, signature=None):
        if signature is not None and not isinstance(signature, Signature):
            raise InvalidValue('LogoutRequest', 'bad signature value')
        return super().__new__(
            cls,
            _text('LogoutRequest', 'id', id),
            _instant('LogoutRequest', 'issue_instant', issue_instant),
            EntityId(issuer),
            _text(
                'LogoutRequest', 'destination', destination, optional=True
            ),
            _text('LogoutRequest', 'name_id', name_id),
            _text(
                'LogoutRequest', 'name_id_format', name_id_format,
                optional=True
            ),
            _text('LogoutRequest', 'session_index', session_index),
            signature,
        )


class LogoutResponse(namedtuple(
        'LogoutResponse', [
            'id', 'issue_instant', 'issuer', 'destination',
            'in_response_to', 'status', 'signature',
        ])):

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, destination, in_response_to,
            status, signature=None):
        if signature is not None and not isinstance(signature, Signature):
            raise InvalidValue('LogoutResponse', 'bad signature value')
        return super().__new__(
            cls,
            _text('LogoutResponse', 'id', id),
            _instant('LogoutResponse', 'issue_instant', issue_instant),
            EntityId(issuer),
            _text(
                'LogoutResponse', 'destination', destination, optional=True
            ),
            _text(
                'LogoutResponse', 'in_response_to', in_response_to,
                optional=True
            ),
            _status('LogoutResponse', status),
            signature,
        )


class ArtifactResolve(namedtuple(
        'ArtifactResolve', [
            'id', 'issue_instant', 'issuer', 'artifacts', 'signature',
        ])):
    """
    Back channel request for the message behind one artifact, or behind both
    artifacts of a pair.
    """

    __slots__ = ()

    def __new__(cls, id, issue_instant, issuer, artifacts, signature=None):
        artifacts = tuple(artifacts)
        if len(artifacts) not in (1, 2):
            raise InvalidValue(
                'ArtifactResolve', 'expected one or two artifacts'
            )
        for artifact in artifacts:
            _text('ArtifactResolve', 'artifact', artifact)
        return super().__new__(
            cls,
            _text('ArtifactResolve', 'id', id),
            _instant('ArtifactResolve', 'issue_instant', issue_instant),
            EntityId(issuer),
            artifacts,
            signature,
        )


class ArtifactResponse(namedtuple(
        'ArtifactResponse', [
            'id', 'issue_instant', 'issuer', 'in_response_to', 'status',
            'message',
        ])):
    """
    Back channel answer.

    :var bytes message: Canonical bytes of the resolved protocol message, or
     ``None`` when the resolution failed.
    """

    __slots__ = ()

    def __new__(
            cls, id, issue_instant, issuer, in_response_to, status,
            message=None):
        if message is not None and not isinstance(message, bytes):
            raise InvalidValue('ArtifactResponse', 'message must be bytes')
        return super().__new__(
            cls,
            _text('ArtifactResponse', 'id', id),
            _instant('ArtifactResponse', 'issue_instant', issue_instant),
            EntityId(issuer),
            _text(
                'ArtifactResponse', 'in_response_to', in_response_to,
                optional=True
            ),
            _status('ArtifactResponse', status),
            message,
        )


class Outcome(Enum):
    """
    Result of a validity predicate.
    """

    Valid = 'Valid'
    NotYetValid = 'NotYetValid'
    Expired = 'Expired'
    AudienceMismatch = 'AudienceMismatch'
    RecipientMismatch = 'RecipientMismatch'
    LocalityMismatch = 'LocalityMismatch'


class ValidityVerdict(namedtuple('ValidityVerdict', ['outcome', 'detail'])):
    """
    Outcome of a validity predicate plus a human readable explanation.

    Only the outcome is meant for control flow.
    """

    __slots__ = ()

    @property
    def valid(self):
        return self.outcome is Outcome.Valid

    def __str__(self):
        return '{}: {}'.format(self.outcome.value, self.detail)


__all__ = [
    'InvalidValue',
    'UnsupportedMethod',
    'new_id',
    'EntityId',
    'Conditions',
    'SubjectConfirmation',
    'Subject',
    'AuthnStatement',
    'Attribute',
    'Signature',
    'EncryptedAssertion',
    'Assertion',
    'Response',
    'AuthnRequest',
    'LogoutRequest',
    'LogoutResponse',
    'ArtifactResolve',
    'ArtifactResponse',
    'Outcome',
    'ValidityVerdict',
]
