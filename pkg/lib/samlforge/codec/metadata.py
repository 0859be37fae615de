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
Entity metadata model and codec.

A metadata document describes exactly one party with exactly one role
descriptor, either ``IDPSSODescriptor`` or ``SPSSODescriptor``.

Certificates are kept as the base64 text found in ``ds:X509Certificate``
with all whitespace removed. They are decoded by the federation registry,
not here, so documents with placeholder certificates can still be inspected.

When no assertion consumer service is flagged ``isDefault="true"`` the first
one in document order is the default.
"""

from re import sub, compile as regex
from collections import namedtuple

from .xml import element, parse_xml, canonicalize, strict_children
from .errors import (
    MalformedXml, MissingRequiredElement, UnknownRole, UnknownBinding,
    DuplicateDefaultAcs, DuplicateAcsIndex,
)
from .assertion import required_attribute, single, required_text
from ..core.types import EntityId, InvalidValue
from ..core.urns import (
    NS_METADATA, NS_DSIG, NS_XENC, NS_XML, NS_ASSERTION, BINDINGS,
    PROTOCOL_SUPPORT, USE_SIGNING, USE_ENCRYPTION,
)
from ..logging import get_logger


log = get_logger(__name__)


TRUE_VALUES = {'true': True, '1': True, 'false': False, '0': False}
DIGITS_REGEX = regex(r'^[0-9]+$')


class Endpoint(namedtuple('Endpoint', ['binding', 'location'])):

    __slots__ = ()

    def __new__(cls, binding, location):
        if binding not in BINDINGS:
            raise UnknownBinding(binding)
        if not location:
            raise MissingRequiredElement('Location')
        return super().__new__(cls, binding, location)


class IndexedEndpoint(namedtuple(
        'IndexedEndpoint', ['index', 'is_default', 'binding', 'location'])):

    __slots__ = ()

    def __new__(cls, index, is_default, binding, location):
        if not isinstance(index, int) or not 0 <= index < 65536:
            raise MalformedXml('bad endpoint index {!r}'.format(index))
        if binding not in BINDINGS:
            raise UnknownBinding(binding)
        if not location:
            raise MissingRequiredElement('Location')
        return super().__new__(
            cls, index, bool(is_default), binding, location
        )


class EncryptionMethod(namedtuple(
        'EncryptionMethod', ['algorithm', 'key_size'])):

    __slots__ = ()

    def __new__(cls, algorithm, key_size=None):
        return super().__new__(cls, algorithm, key_size)


class RequestedAttribute(namedtuple(
        'RequestedAttribute',
        ['name', 'friendly_name', 'name_format', 'is_required'])):

    __slots__ = ()

    def __new__(
            cls, name, friendly_name=None, name_format=None,
            is_required=False):
        return super().__new__(
            cls, name, friendly_name, name_format, bool(is_required)
        )


LocalizedName = namedtuple('LocalizedName', ['value', 'lang'])


Organization = namedtuple('Organization', ['name', 'display_name', 'url'])
Organization.__doc__ = """
Organization owning the entity. Each field is a :class:`LocalizedName`.
"""


def _default_indexes(endpoints):
    flagged = [endpoint.index for endpoint in endpoints if endpoint.is_default]
    if len(flagged) > 1:
        raise DuplicateDefaultAcs(flagged)

    seen = set()
    for endpoint in endpoints:
        if endpoint.index in seen:
            raise DuplicateAcsIndex(endpoint.index)
        seen.add(endpoint.index)


class IdpSsoDescriptor(namedtuple(
        'IdpSsoDescriptor', [
            'want_authn_requests_signed', 'protocol_support',
            'sso_endpoints', 'signing_certs', 'encryption_certs',
            'encryption_methods', 'single_logout_endpoints',
            'artifact_resolution_endpoints', 'name_id_formats',
        ])):
    """
    Identity provider role descriptor.
    """

    __slots__ = ()

    def __new__(
            cls, want_authn_requests_signed, sso_endpoints,
            protocol_support=PROTOCOL_SUPPORT,
            signing_certs=(), encryption_certs=(), encryption_methods=(),
            single_logout_endpoints=(), artifact_resolution_endpoints=(),
            name_id_formats=()):
        sso_endpoints = tuple(sso_endpoints)
        if not sso_endpoints:
            raise MissingRequiredElement('SingleSignOnService')
        artifact_resolution_endpoints = tuple(artifact_resolution_endpoints)
        _default_indexes(artifact_resolution_endpoints)
        return super().__new__(
            cls,
            bool(want_authn_requests_signed),
            protocol_support,
            sso_endpoints,
            tuple(signing_certs),
            tuple(encryption_certs),
            tuple(encryption_methods),
            tuple(single_logout_endpoints),
            artifact_resolution_endpoints,
            tuple(name_id_formats),
        )

    def sso_endpoint(self, binding):
        for endpoint in self.sso_endpoints:
            if endpoint.binding == binding:
                return endpoint
        return None

    @property
    def artifact_resolution_endpoint(self):
        endpoints = self.artifact_resolution_endpoints
        for endpoint in endpoints:
            if endpoint.is_default:
                return endpoint
        return endpoints[0] if endpoints else None


class SpSsoDescriptor(namedtuple(
        'SpSsoDescriptor', [
            'authn_requests_signed', 'want_assertions_signed',
            'protocol_support', 'name_id_formats', 'acs_endpoints',
            'signing_certs', 'encryption_certs', 'encryption_methods',
            'single_logout_endpoints', 'requested_attributes',
        ])):
    """
    Service provider role descriptor.
    """

    __slots__ = ()

    def __new__(
            cls, authn_requests_signed, want_assertions_signed,
            acs_endpoints, protocol_support=PROTOCOL_SUPPORT,
            name_id_formats=(), signing_certs=(), encryption_certs=(),
            encryption_methods=(), single_logout_endpoints=(),
            requested_attributes=()):
        acs_endpoints = tuple(acs_endpoints)
        if not acs_endpoints:
            raise MissingRequiredElement('AssertionConsumerService')
        _default_indexes(acs_endpoints)
        return super().__new__(
            cls,
            bool(authn_requests_signed),
            bool(want_assertions_signed),
            protocol_support,
            tuple(name_id_formats),
            acs_endpoints,
            tuple(signing_certs),
            tuple(encryption_certs),
            tuple(encryption_methods),
            tuple(single_logout_endpoints),
            tuple(requested_attributes),
        )

    @property
    def default_acs(self):
        """
        The flagged default endpoint, or the first one.
        """
        for endpoint in self.acs_endpoints:
            if endpoint.is_default:
                return endpoint
        return self.acs_endpoints[0]

    def acs_for(self, binding):
        """
        The default endpoint if it has the binding, else the first with it.
        """
        default = self.default_acs
        if default.binding == binding:
            return default
        for endpoint in self.acs_endpoints:
            if endpoint.binding == binding:
                return endpoint
        return None

    def acs_by_location(self, location):
        for endpoint in self.acs_endpoints:
            if endpoint.location.rstrip('/') == location.rstrip('/'):
                return endpoint
        return None

    @property
    def key_size(self):
        for method in self.encryption_methods:
            if method.key_size is not None:
                return method.key_size
        return None


class EntityDescriptor(namedtuple(
        'EntityDescriptor',
        ['entity_id', 'role', 'document_id', 'organization'])):

    __slots__ = ()

    def __new__(cls, entity_id, role, document_id=None, organization=None):
        if not isinstance(role, (IdpSsoDescriptor, SpSsoDescriptor)):
            raise UnknownRole('unsupported role {!r}'.format(role))
        return super().__new__(
            cls, EntityId(entity_id), role, document_id, organization
        )

    @property
    def is_idp(self):
        return isinstance(self.role, IdpSsoDescriptor)

    @property
    def is_sp(self):
        return isinstance(self.role, SpSsoDescriptor)


# Emission

def _bool(value):
    return 'true' if value else 'false'


def _key_descriptor(use, cert, methods=()):
    key_info = None
    if cert is not None:
        key_info = element(NS_DSIG, 'KeyInfo', children=[
            element(NS_DSIG, 'X509Data', children=[
                element(NS_DSIG, 'X509Certificate', text=cert),
            ]),
        ])
    return element(NS_METADATA, 'KeyDescriptor', {'use': use}, children=[
        key_info,
    ] + [
        element(NS_METADATA, 'EncryptionMethod', {
            'Algorithm': method.algorithm,
        }, children=[
            element(NS_XENC, 'KeySize', text=str(method.key_size))
            if method.key_size is not None else None,
        ])
        for method in methods
    ])


def _key_descriptors(role):
    descriptors = [
        _key_descriptor(USE_SIGNING, cert) for cert in role.signing_certs
    ]

    methods = role.encryption_methods
    certs = list(role.encryption_certs)
    if methods and not certs:
        certs = [None]
    for position, cert in enumerate(certs):
        descriptors.append(_key_descriptor(
            USE_ENCRYPTION, cert, methods if position == 0 else ()
        ))
    return descriptors


def _endpoint(name, endpoint):
    return element(NS_METADATA, name, {
        'Binding': endpoint.binding,
        'Location': endpoint.location,
    })


def _indexed_endpoint(name, endpoint):
    return element(NS_METADATA, name, {
        'index': str(endpoint.index),
        'isDefault': 'true' if endpoint.is_default else None,
        'Binding': endpoint.binding,
        'Location': endpoint.location,
    })


def _name_id_formats(role):
    return [
        element(NS_METADATA, 'NameIDFormat', text=name_id_format)
        for name_id_format in role.name_id_formats
    ]


def _idp_element(role):
    return element(NS_METADATA, 'IDPSSODescriptor', {
        'WantAuthnRequestsSigned': _bool(role.want_authn_requests_signed),
        'protocolSupportEnumeration': role.protocol_support,
    }, children=(
        _key_descriptors(role) +
        [
            _indexed_endpoint('ArtifactResolutionService', endpoint)
            for endpoint in role.artifact_resolution_endpoints
        ] +
        [
            _endpoint('SingleLogoutService', endpoint)
            for endpoint in role.single_logout_endpoints
        ] +
        _name_id_formats(role) +
        [
            _endpoint('SingleSignOnService', endpoint)
            for endpoint in role.sso_endpoints
        ]
    ))


def _sp_element(entity_id, role):
    consuming = None
    if role.requested_attributes:
        consuming = element(NS_METADATA, 'AttributeConsumingService', {
            'index': '0',
        }, children=[
            element(NS_METADATA, 'ServiceName', {
                (NS_XML, 'lang'): 'en',
            }, text=entity_id),
        ] + [
            element(NS_METADATA, 'RequestedAttribute', {
                'Name': requested.name,
                'FriendlyName': requested.friendly_name,
                'NameFormat': requested.name_format,
                'isRequired': _bool(requested.is_required),
            })
            for requested in role.requested_attributes
        ])

    return element(NS_METADATA, 'SPSSODescriptor', {
        'AuthnRequestsSigned': _bool(role.authn_requests_signed),
        'WantAssertionsSigned': _bool(role.want_assertions_signed),
        'protocolSupportEnumeration': role.protocol_support,
    }, children=(
        _key_descriptors(role) +
        [
            _endpoint('SingleLogoutService', endpoint)
            for endpoint in role.single_logout_endpoints
        ] +
        _name_id_formats(role) +
        [
            _indexed_endpoint('AssertionConsumerService', endpoint)
            for endpoint in role.acs_endpoints
        ] +
        [consuming]
    ))


def _localized(name, localized):
    return element(NS_METADATA, name, {
        (NS_XML, 'lang'): localized.lang,
    }, text=localized.value)


def metadata_to_element(entity):
    """
    :param EntityDescriptor entity: The entity.

    :rtype: XmlElement
    """
    if entity.is_idp:
        role = _idp_element(entity.role)
    else:
        role = _sp_element(entity.entity_id, entity.role)

    organization = None
    if entity.organization is not None:
        organization = element(NS_METADATA, 'Organization', children=[
            _localized('OrganizationName', entity.organization.name),
            _localized(
                'OrganizationDisplayName', entity.organization.display_name
            ),
            _localized('OrganizationURL', entity.organization.url),
        ])

    return element(NS_METADATA, 'EntityDescriptor', {
        'ID': entity.document_id,
        'entityID': entity.entity_id,
    }, children=[role, organization])


def emit_metadata(entity):
    """
    Serialize an entity descriptor to canonical bytes.

    :param EntityDescriptor entity: The entity.

    :rtype: bytes
    """
    return canonicalize(metadata_to_element(entity))


# Parsing

def _boolean(node, name, default=False):
    value = node.get(name)
    if value is None:
        return default
    if value not in TRUE_VALUES:
        raise MalformedXml('bad boolean {}="{}"'.format(name, value))
    return TRUE_VALUES[value]


def _index(node):
    value = required_attribute(node, 'index')
    if not DIGITS_REGEX.match(value):
        raise MalformedXml('bad index {!r}'.format(value))
    return int(value)


def _parse_endpoint(node):
    return Endpoint(
        binding=required_attribute(node, 'Binding'),
        location=required_attribute(node, 'Location'),
    )


def _parse_indexed_endpoint(node):
    return IndexedEndpoint(
        index=_index(node),
        is_default=_boolean(node, 'isDefault'),
        binding=required_attribute(node, 'Binding'),
        location=required_attribute(node, 'Location'),
    )


def _parse_key_descriptor(node):
    use = node.get('use')
    if use not in (None, USE_SIGNING, USE_ENCRYPTION):
        raise MalformedXml('unknown key use {!r}'.format(use))

    found, _ = strict_children(node, {
        (NS_DSIG, 'KeyInfo'),
        (NS_METADATA, 'EncryptionMethod'),
    })

    certs = []
    for key_info in found[(NS_DSIG, 'KeyInfo')]:
        for data in key_info.findall(NS_DSIG, 'X509Data'):
            for cert in data.findall(NS_DSIG, 'X509Certificate'):
                certs.append(sub(r'\s+', '', required_text(cert)))

    methods = []
    for method in found[(NS_METADATA, 'EncryptionMethod')]:
        key_size = None
        size = method.find(NS_XENC, 'KeySize')
        if size is not None:
            text = required_text(size)
            if not DIGITS_REGEX.match(text):
                raise MalformedXml('bad key size {!r}'.format(text))
            key_size = int(text)
        methods.append(EncryptionMethod(
            algorithm=required_attribute(method, 'Algorithm'),
            key_size=key_size,
        ))

    return use, certs, methods


def _parse_keys(found):
    signing = []
    encryption = []
    methods = []
    for descriptor in found[(NS_METADATA, 'KeyDescriptor')]:
        use, certs, descriptor_methods = _parse_key_descriptor(descriptor)
        if use in (None, USE_SIGNING):
            signing.extend(certs)
        if use in (None, USE_ENCRYPTION):
            encryption.extend(certs)
            methods.extend(descriptor_methods)
    return signing, encryption, methods


def _texts(found, name):
    return [
        required_text(node) for node in found[(NS_METADATA, name)]
    ]


IGNORED = {
    (NS_METADATA, 'Extensions'),
    (NS_METADATA, 'ContactPerson'),
    (NS_METADATA, 'ManageNameIDService'),
    (NS_METADATA, 'AssertionIDRequestService'),
    (NS_METADATA, 'AttributeProfile'),
    (NS_METADATA, 'NameIDMappingService'),
    (NS_METADATA, 'Organization'),
    (NS_ASSERTION, 'Attribute'),
    (NS_DSIG, 'Signature'),
}


def _parse_idp(node):
    found, _ = strict_children(node, {
        (NS_METADATA, 'KeyDescriptor'),
        (NS_METADATA, 'ArtifactResolutionService'),
        (NS_METADATA, 'SingleLogoutService'),
        (NS_METADATA, 'NameIDFormat'),
        (NS_METADATA, 'SingleSignOnService'),
    }, ignored=IGNORED)
    signing, encryption, methods = _parse_keys(found)

    return IdpSsoDescriptor(
        want_authn_requests_signed=_boolean(node, 'WantAuthnRequestsSigned'),
        protocol_support=required_attribute(
            node, 'protocolSupportEnumeration'
        ),
        sso_endpoints=[
            _parse_endpoint(endpoint)
            for endpoint in found[(NS_METADATA, 'SingleSignOnService')]
        ],
        signing_certs=signing,
        encryption_certs=encryption,
        encryption_methods=methods,
        single_logout_endpoints=[
            _parse_endpoint(endpoint)
            for endpoint in found[(NS_METADATA, 'SingleLogoutService')]
        ],
        artifact_resolution_endpoints=[
            _parse_indexed_endpoint(endpoint)
            for endpoint in found[
                (NS_METADATA, 'ArtifactResolutionService')
            ]
        ],
        name_id_formats=_texts(found, 'NameIDFormat'),
    )


def _parse_requested(found):
    requested = []
    for service in found[(NS_METADATA, 'AttributeConsumingService')]:
        service_found, _ = strict_children(service, {
            (NS_METADATA, 'RequestedAttribute'),
        }, ignored={
            (NS_METADATA, 'ServiceName'),
            (NS_METADATA, 'ServiceDescription'),
        })
        for attribute in service_found[(NS_METADATA, 'RequestedAttribute')]:
            requested.append(RequestedAttribute(
                name=required_attribute(attribute, 'Name'),
                friendly_name=attribute.get('FriendlyName'),
                name_format=attribute.get('NameFormat'),
                is_required=_boolean(attribute, 'isRequired'),
            ))
    return requested


def _parse_sp(node):
    found, _ = strict_children(node, {
        (NS_METADATA, 'KeyDescriptor'),
        (NS_METADATA, 'SingleLogoutService'),
        (NS_METADATA, 'NameIDFormat'),
        (NS_METADATA, 'AssertionConsumerService'),
        (NS_METADATA, 'AttributeConsumingService'),
    }, ignored=IGNORED)
    signing, encryption, methods = _parse_keys(found)

    return SpSsoDescriptor(
        authn_requests_signed=_boolean(node, 'AuthnRequestsSigned'),
        want_assertions_signed=_boolean(node, 'WantAssertionsSigned'),
        protocol_support=required_attribute(
            node, 'protocolSupportEnumeration'
        ),
        name_id_formats=_texts(found, 'NameIDFormat'),
        acs_endpoints=[
            _parse_indexed_endpoint(endpoint)
            for endpoint in found[(NS_METADATA, 'AssertionConsumerService')]
        ],
        signing_certs=signing,
        encryption_certs=encryption,
        encryption_methods=methods,
        single_logout_endpoints=[
            _parse_endpoint(endpoint)
            for endpoint in found[(NS_METADATA, 'SingleLogoutService')]
        ],
        requested_attributes=_parse_requested(found),
    )


def _parse_localized(found, name):
    nodes = found[(NS_METADATA, name)]
    if not nodes:
        raise MissingRequiredElement(name)
    node = nodes[0]
    return LocalizedName(
        value=required_text(node),
        lang=node.get('lang', namespace=NS_XML),
    )


def _parse_organization(node):
    found, _ = strict_children(node, {
        (NS_METADATA, 'OrganizationName'),
        (NS_METADATA, 'OrganizationDisplayName'),
        (NS_METADATA, 'OrganizationURL'),
    }, ignored={(NS_METADATA, 'Extensions')})
    return Organization(
        name=_parse_localized(found, 'OrganizationName'),
        display_name=_parse_localized(found, 'OrganizationDisplayName'),
        url=_parse_localized(found, 'OrganizationURL'),
    )


ROLE_PARSERS = {
    'IDPSSODescriptor': _parse_idp,
    'SPSSODescriptor': _parse_sp,
}


def element_to_metadata(node):
    """
    :param XmlElement node: A ``md:EntityDescriptor`` element.

    :rtype: EntityDescriptor
    """
    if not node.is_a(NS_METADATA, 'EntityDescriptor'):
        raise MalformedXml('expected md:EntityDescriptor, got {}'.format(
            node.display_name
        ))

    found, _ = strict_children(node, {
        (NS_METADATA, 'IDPSSODescriptor'),
        (NS_METADATA, 'SPSSODescriptor'),
        (NS_METADATA, 'Organization'),
    }, ignored={
        (NS_METADATA, 'Extensions'),
        (NS_METADATA, 'ContactPerson'),
        (NS_METADATA, 'AdditionalMetadataLocation'),
        (NS_METADATA, 'RoleDescriptor'),
        (NS_METADATA, 'AuthnAuthorityDescriptor'),
        (NS_METADATA, 'AttributeAuthorityDescriptor'),
        (NS_METADATA, 'PDPDescriptor'),
        (NS_DSIG, 'Signature'),
    })

    roles = [
        (name, role)
        for name in ROLE_PARSERS
        for role in found[(NS_METADATA, name)]
    ]
    if not roles:
        raise UnknownRole('no IDPSSODescriptor nor SPSSODescriptor')
    if len(roles) > 1:
        raise UnknownRole('multi role documents are not supported')

    name, role = roles[0]
    organization = single(
        found, NS_METADATA, 'Organization', 'EntityDescriptor',
        required=False
    )

    try:
        return EntityDescriptor(
            entity_id=required_attribute(node, 'entityID'),
            role=ROLE_PARSERS[name](role),
            document_id=node.get('ID'),
            organization=(
                _parse_organization(organization)
                if organization is not None else None
            ),
        )
    except InvalidValue as e:
        raise MalformedXml(str(e))


def parse_metadata(data):
    """
    Parse a metadata document.

    :param bytes data: UTF-8 XML.

    :raise MalformedXml: for unexpected content or unknown bindings.
    :raise UnknownRole: without exactly one supported role descriptor.
    :raise DuplicateDefaultAcs: if two endpoints claim to be the default.

    :rtype: EntityDescriptor
    """
    entity = element_to_metadata(parse_xml(data))
    log.debug('Parsed metadata of {} ({})'.format(
        entity.entity_id, 'IdP' if entity.is_idp else 'SP'
    ))
    return entity


__all__ = [
    'Endpoint',
    'IndexedEndpoint',
    'EncryptionMethod',
    'RequestedAttribute',
    'LocalizedName',
    'Organization',
    'IdpSsoDescriptor',
    'SpSsoDescriptor',
    'EntityDescriptor',
    'metadata_to_element',
    'emit_metadata',
    'element_to_metadata',
    'parse_metadata',
]
