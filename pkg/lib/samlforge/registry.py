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
Federation registry.

A registry holds the local entity with its keystore, and the partners it
federates with, each one with its metadata and its policy. It is persisted
as a directory:

::

    <registry>/
        local.xml               Metadata of the local entity.
        local.toml              Key aliases and local settings.
        keystore.pem            Local keys, see samlforge.crypto.keystore.
        partners/<slug>.xml     Metadata of a partner, as registered.
        partners/<slug>.toml    Policy of that partner.

Policy files are TOML documents following
:data:`samlforge.schema.POLICY_SCHEMA`. Missing keys are derived from the
partner metadata.
"""

from re import sub
from hashlib import sha1
from pathlib import Path
from threading import RLock
from collections import namedtuple, OrderedDict

from toml import dumps as toml_dumps

from .codec import PARSE_ERRORS, parse_metadata, emit_metadata
from .codec.security import unb64
from .core.types import EntityId
from .core.urns import BINDING_NAMES, BINDING_REDIRECT
from .crypto import (
    load_certificate, certificate_der, load_keystore, save_keystore,
)
from .bindings.artifact import source_id_for
from .inputs import (
    InvalidDocument, load_file, load_document, validate_document,
)
from .schema import LOCAL_SCHEMA, POLICY_SCHEMA
from .logging import get_logger


log = get_logger(__name__)


LOCAL_METADATA = 'local.xml'
LOCAL_SETTINGS = 'local.toml'
PARTNERS = 'partners'


class RegistryError(Exception):
    """
    Base of all registry errors.
    """

    code = 'RegistryError'


class MalformedMetadata(RegistryError, ValueError):
    code = 'MalformedMetadata'

    def __init__(self, reason):
        super().__init__('Malformed metadata: {}'.format(reason))
        self.reason = reason


class SelfRegistration(RegistryError, ValueError):
    code = 'SelfRegistration'

    def __init__(self, entity_id):
        super().__init__(
            'Metadata of {} describes the local entity'.format(entity_id)
        )
        self.entity_id = entity_id


class IncompleteLocalConfig(RegistryError):
    code = 'IncompleteLocalConfig'

    def __init__(self, reason):
        super().__init__('Incomplete local configuration: {}'.format(reason))
        self.reason = reason


class UnknownPartner(RegistryError, LookupError):
    code = 'UnknownPartner'

    def __init__(self, entity_id):
        super().__init__('Partner {} is not registered'.format(entity_id))
        self.entity_id = entity_id

    def __str__(self):
        return self.args[0]


class PolicyConflict(RegistryError, ValueError):
    """
    Raised when a partner policy contradicts the partner metadata.
    """

    code = 'PolicyConflict'

    def __init__(self, entity_id, reason):
        super().__init__('Policy of {} conflicts with its metadata: {}'.format(
            entity_id, reason
        ))
        self.entity_id = entity_id
        self.reason = reason


LocalSettings = namedtuple('LocalSettings', sorted(LOCAL_SCHEMA))


class PartnerPolicy(namedtuple('PartnerPolicy', sorted(POLICY_SCHEMA))):
    """
    What the local entity does, and expects, when dealing with a partner.

    For a service provider partner the flags drive what the identity
    provider issues. For an identity provider partner they state what the
    service provider requires: ``sign_assertion`` and ``encrypt_assertion``
    demand signed and encrypted assertions, ``require_signed_requests``
    demands signed logout requests.

    ``check_locality`` is ``None`` when the locality is checked only if the
    assertion carries one.
    """

    __slots__ = ()

    def to_dict(self):
        return OrderedDict(
            (key, value) for key, value in self._asdict().items()
            if value is not None
        )


Partner = namedtuple('Partner', ['entity', 'policy', 'slug', 'metadata'])
Partner.__doc__ = """
A registered partner.

:var EntityDescriptor entity: Its metadata.
:var PartnerPolicy policy: The policy applied to it.
:var str slug: File name stem of the partner in the registry directory.
:var bytes metadata: Metadata document as registered.
"""


def slug_for(entity_id):
    """
    File name stem for an entity id. Readable and unique.

    :rtype: str
    """
    readable = sub(r'[^A-Za-z0-9._-]+', '_', entity_id).strip('._') or 'x'
    return '{}-{}'.format(
        readable[:40], sha1(entity_id.encode('utf-8')).hexdigest()[:8]
    )


def _binding_name(binding):
    for name, urn in BINDING_NAMES.items():
        if urn == binding:
            return name
    return None


def resolve_policy(entity, settings=None):
    """
    Build the policy of a partner.

    :param EntityDescriptor entity: Partner metadata.
    :param dict settings: Explicit policy values. Missing values are
     derived from the metadata.

    :raise InvalidDocument: if the settings do not follow the policy schema.
    :raise PolicyConflict: if the settings contradict the metadata.

    :rtype: PartnerPolicy
    """
    settings = dict(settings or {})
    policy = validate_document(
        settings, POLICY_SCHEMA, 'policy of {}'.format(entity.entity_id)
    )
    role = entity.role

    if policy['sign_assertion'] is None:
        policy['sign_assertion'] = True

    if entity.is_sp:
        if role.want_assertions_signed and not policy['sign_assertion']:
            raise PolicyConflict(
                entity.entity_id, 'WantAssertionsSigned is true'
            )
        if policy['encrypt_assertion'] is None:
            policy['encrypt_assertion'] = bool(role.encryption_certs)
        if policy['require_signed_requests'] is None:
            policy['require_signed_requests'] = role.authn_requests_signed
        if 'default_binding' not in settings:
            policy['default_binding'] = (
                _binding_name(role.default_acs.binding) or 'post'
            )

    else:
        if policy['encrypt_assertion'] is None:
            policy['encrypt_assertion'] = False
        if policy['require_signed_requests'] is None:
            policy['require_signed_requests'] = True
        if 'default_binding' not in settings:
            policy['default_binding'] = (
                'redirect' if role.sso_endpoint(BINDING_REDIRECT) else 'post'
            )

    return PartnerPolicy(**policy)


def describe_partner(partner):
    """
    One line summary of the policy derived for a partner.

    :rtype: str
    """
    policy = partner.policy
    role = partner.entity.role
    if partner.entity.is_sp:
        endpoints = 'acs={} endpoints'.format(len(role.acs_endpoints))
    else:
        endpoints = 'sso={} endpoints'.format(len(role.sso_endpoints))

    return '{} sign={} encrypt={} {}'.format(
        partner.entity.entity_id,
        'true' if policy.sign_assertion else 'false',
        'true' if policy.encrypt_assertion else 'false',
        endpoints,
    )


def decode_certificates(entity_id, texts, use):
    """
    Decode the base64 certificates of a metadata document.

    Certificates that cannot be decoded are left out of the trust anchors
    with a warning.

    :rtype: list
    """
    certificates = []
    for text in texts:
        try:
            certificates.append(
                load_certificate(unb64(text, 'X509Certificate'))
            )
        except ValueError:
            log.warning(
                'Ignoring undecodable {} certificate of {}'.format(
                    use, entity_id
                )
            )
    return certificates


class FederationRegistry:
    """
    Local entity plus partners.

    Reads can happen from any thread. Changes are serialized by a lock, and
    the keystore is replaced, never mutated, when partners change.

    :param EntityDescriptor local: Metadata of the local entity.
    :param KeyStore store: Keystore with the local keys.
    :param dict settings: Local settings following
     :data:`samlforge.schema.LOCAL_SCHEMA`.
    """

    def __init__(self, local, store, settings):
        self._local = local
        self._settings = LocalSettings(**validate_document(
            dict(settings), LOCAL_SCHEMA, 'local settings'
        ))
        self._store = store.without_anchors(local.entity_id)
        self._partners = OrderedDict()
        self._lock = RLock()

    @property
    def local(self):
        return self._local

    @property
    def entity_id(self):
        return self._local.entity_id

    @property
    def settings(self):
        return self._settings

    @property
    def store(self):
        """
        Keystore with the local keys and the trust anchors of every partner.
        """
        return self._store

    @property
    def signing_alias(self):
        return self._settings.signing_alias

    @property
    def encryption_alias(self):
        return self._settings.encryption_alias

    @property
    def partners(self):
        return tuple(self._partners.values())

    def partner(self, entity_id):
        """
        :raise UnknownPartner: if the partner is not registered.

        :rtype: Partner
        """
        partner = self._partners.get(entity_id)
        if partner is None:
            raise UnknownPartner(entity_id)
        return partner

    def has_partner(self, entity_id):
        return entity_id in self._partners

    def identity_providers(self):
        return [
            partner for partner in self._partners.values()
            if partner.entity.is_idp
        ]

    def service_providers(self):
        return [
            partner for partner in self._partners.values()
            if partner.entity.is_sp
        ]

    def find_partner_by_source_id(self, source_id):
        """
        Partner whose artifact source id matches.

        :param bytes source_id: SHA-1 of the partner entity id.

        :rtype: Partner or None
        """
        for partner in self._partners.values():
            if source_id_for(partner.entity.entity_id) == source_id:
                return partner
        return None

    def add_partner(self, entity, settings=None, metadata=None):
        """
        Add or replace a partner from its parsed metadata.

        :param EntityDescriptor entity: Partner metadata.
        :param dict settings: Explicit policy values.
        :param bytes metadata: Document the metadata was parsed from.

        :raise SelfRegistration: if the metadata is the local entity.
        :raise MalformedMetadata: if the partner has the local role.
        :raise PolicyConflict: if the policy contradicts the metadata.

        :rtype: Partner
        """
        entity_id = entity.entity_id
        if entity_id == self.entity_id:
            raise SelfRegistration(entity_id)

        if entity.is_idp == self._local.is_idp:
            raise MalformedMetadata(
                '{} has the same role as the local entity'.format(entity_id)
            )

        try:
            policy = resolve_policy(entity, settings)
        except InvalidDocument as e:
            raise MalformedMetadata(str(e))

        if metadata is None:
            metadata = emit_metadata(entity)

        partner = Partner(
            entity=entity,
            policy=policy,
            slug=slug_for(entity_id),
            metadata=metadata,
        )

        role = entity.role
        signing = decode_certificates(entity_id, role.signing_certs, 'signing')
        encryption = decode_certificates(
            entity_id, role.encryption_certs, 'encryption'
        )

        with self._lock:
            if entity_id in self._partners:
                log.warning('Replacing registered partner {}'.format(
                    entity_id
                ))
            self._partners[entity_id] = partner
            self._store = self._store.with_anchors(
                entity_id, signing=signing, encryption=encryption
            )

        log.info('Registered partner {}'.format(describe_partner(partner)))
        return partner

    def register_partner(self, metadata, settings=None):
        """
        Register a partner from its metadata document.

        :param bytes metadata: The metadata document.
        :param dict settings: Explicit policy values.

        :raise MalformedMetadata: if the document does not parse.
        :raise SelfRegistration: if the metadata is the local entity.

        :rtype: Partner
        """
        try:
            entity = parse_metadata(metadata)
        except PARSE_ERRORS as e:
            log.warning('Rejected partner metadata: {}'.format(e))
            raise MalformedMetadata(str(e))

        return self.add_partner(entity, settings=settings, metadata=metadata)

    def remove_partner(self, entity_id):
        """
        :raise UnknownPartner: if the partner is not registered.
        """
        with self._lock:
            self.partner(entity_id)
            del self._partners[entity_id]
            self._store = self._store.without_anchors(entity_id)
        log.info('Removed partner {}'.format(entity_id))

    def export_metadata(self):
        """
        Metadata document of the local entity.

        :raise IncompleteLocalConfig: if the local entity has no signing
         certificate, or it is not the one of the signing key.

        :rtype: bytes
        """
        role = self._local.role
        if not role.signing_certs:
            raise IncompleteLocalConfig('no signing certificate')

        alias = self.signing_alias
        if alias not in self._store:
            raise IncompleteLocalConfig(
                'signing key {} not in keystore'.format(alias)
            )

        entry = self._store.entry(alias)
        published = {
            certificate_der(certificate)
            for certificate in decode_certificates(
                self.entity_id, role.signing_certs, 'signing'
            )
        }
        if certificate_der(entry.certificate) not in published:
            raise IncompleteLocalConfig(
                'certificate of {} is not published'.format(alias)
            )

        return emit_metadata(self._local)

    def __repr__(self):
        return '<FederationRegistry {} with {} partners>'.format(
            self.entity_id, len(self._partners)
        )


def register_partner(registry, metadata, settings=None):
    """
    Register a partner and return the registry.

    :rtype: FederationRegistry
    """
    registry.register_partner(metadata, settings=settings)
    return registry


def export_metadata(registry):
    return registry.export_metadata()


def _keystore_path(directory, settings):
    path = Path(settings.keystore)
    if not path.is_absolute():
        path = directory / path
    return path


def load_registry(path, passphrase):
    """
    Load a registry directory.

    :param path: The registry directory.
    :param str passphrase: Passphrase of the keystore.

    :raise FileNotFoundError: if a file is missing.
    :raise MalformedMetadata: if a metadata document does not parse.

    :rtype: FederationRegistry
    """
    directory = Path(path)
    settings = load_document(
        directory / LOCAL_SETTINGS, LOCAL_SCHEMA, replace=False
    )

    local_path = directory / LOCAL_METADATA
    if not local_path.is_file():
        raise FileNotFoundError('No such file {}'.format(local_path))
    try:
        local = parse_metadata(local_path.read_bytes())
    except PARSE_ERRORS as e:
        raise MalformedMetadata('{}: {}'.format(local_path, e))

    store = load_keystore(
        _keystore_path(directory, LocalSettings(**settings)), passphrase
    )
    registry = FederationRegistry(local, store, settings)

    partners = directory / PARTNERS
    if partners.is_dir():
        for metadata_path in sorted(partners.glob('*.xml')):
            policy_path = metadata_path.with_suffix('.toml')
            policy = {}
            if policy_path.is_file():
                policy = load_file(policy_path)
            registry.register_partner(
                metadata_path.read_bytes(), settings=policy
            )

    log.info('Loaded registry of {} from {} with {} partners'.format(
        registry.entity_id, directory, len(registry.partners)
    ))
    return registry


def save_registry(registry, path, passphrase=None):
    """
    Write a registry directory.

    The keystore is written only when a passphrase is given. Files of
    partners no longer registered are removed.

    :param FederationRegistry registry: The registry.
    :param path: The registry directory.
    :param str passphrase: Passphrase to encrypt the keystore with.
    """
    directory = Path(path)
    partners = directory / PARTNERS
    partners.mkdir(parents=True, exist_ok=True)

    settings = OrderedDict(
        (key, value) for key, value in registry.settings._asdict().items()
        if value is not None
    )
    (directory / LOCAL_SETTINGS).write_text(
        toml_dumps(settings), encoding='utf-8'
    )
    (directory / LOCAL_METADATA).write_bytes(emit_metadata(registry.local))

    if passphrase is not None:
        save_keystore(
            registry.store,
            _keystore_path(directory, registry.settings),
            passphrase,
        )

    current = set()
    for partner in registry.partners:
        current.add(partner.slug)
        (partners / '{}.xml'.format(partner.slug)).write_bytes(
            partner.metadata
        )
        (partners / '{}.toml'.format(partner.slug)).write_text(
            toml_dumps(partner.policy.to_dict()), encoding='utf-8'
        )

    for stale in partners.iterdir():
        if stale.suffix in ('.xml', '.toml') and stale.stem not in current:
            log.info('Removing stale partner file {}'.format(stale))
            stale.unlink()

    log.info('Saved registry of {} to {}'.format(
        registry.entity_id, directory
    ))


__all__ = [
    'RegistryError',
    'MalformedMetadata',
    'SelfRegistration',
    'IncompleteLocalConfig',
    'UnknownPartner',
    'PolicyConflict',
    'LocalSettings',
    'PartnerPolicy',
    'Partner',
    'slug_for',
    'resolve_policy',
    'describe_partner',
    'FederationRegistry',
    'register_partner',
    'export_metadata',
    'load_registry',
    'save_registry',
]
