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
Test suite for the XML codec.
"""

from pathlib import Path
from datetime import datetime
from string import ascii_letters, digits

from pytest import mark, raises
from hypothesis import given, settings, strategies

from samlforge.logging import setup_logging
from samlforge.core import (
    parse_instant, to_instant, AuthnRequest, Assertion, Subject,
    SubjectConfirmation, Conditions, AuthnStatement, Attribute, Response,
)
from samlforge.core.urns import (
    BINDING_POST, BINDING_ARTIFACT, NAMEID_TRANSIENT, STATUS_SUCCESS,
    CM_BEARER, ATTRNAME_BASIC, NS_ASSERTION, NS_PROTOCOL, STATUS_REQUESTER,
    STATUS_RESPONDER, STATUS_AUTHN_FAILED,
)
from samlforge.codec import (
    PARSE_ERRORS, MalformedXml, UnexpectedElement, MissingRequiredElement,
    UnknownRole, DuplicateDefaultAcs, DuplicateAcsIndex, UnknownBinding,
    BadTimestamp, parse_xml, canonicalize, pretty, parse_response,
    emit_response, parse_metadata, emit_metadata, emit_authn_request,
    parse_authn_request, parse_message, XmlElement, emit_assertion,
    parse_assertion,
)


corpus = Path(__file__).resolve().parent / 'corpus'


def setup_module(module):
    setup_logging(verbosity=2)


def read(name):
    return (corpus / name).read_bytes()


def test_idp_metadata():
    entity = parse_metadata(read('idp_metadata.xml'))

    assert entity.entity_id == 'mycompany:saml2.0'
    assert entity.document_id == 'MyCompany'
    assert entity.is_idp
    assert not entity.is_sp

    role = entity.role
    assert role.want_authn_requests_signed is False
    assert len(role.sso_endpoints) == 1
    assert role.sso_endpoint(BINDING_POST).location == \
        'http://mycompany.com/sso/SSO'
    assert role.signing_certs == ('CERTIFICATE',)
    assert role.encryption_certs == ('CERTIFICATE',)
    assert role.encryption_methods[0].algorithm == \
        'http://www.w3.org/2001/04/xmlenc#aes128-cbc'

    organization = entity.organization
    assert organization.name.value == 'My Company Org'
    assert organization.display_name.value == 'My Company'
    assert organization.url.value == 'http://www.mycompany.com'
    assert organization.url.lang == 'en-s'


def test_sp_metadata():
    entity = parse_metadata(read('sp_metadata.xml'))

    assert entity.entity_id == 'mypartner:saml2.0'
    assert entity.is_sp

    role = entity.role
    assert role.authn_requests_signed is True
    assert role.want_assertions_signed is True
    assert role.name_id_formats == (NAMEID_TRANSIENT,)
    assert role.key_size == 128
    assert len(role.acs_endpoints) == 2

    assert role.default_acs.index == 0
    assert role.default_acs.binding == BINDING_POST
    assert role.acs_for(BINDING_ARTIFACT).index == 1
    assert role.acs_by_location(
        'https://mypartner.com/federation/metaAlias/sp/'
    ).index == 0


@mark.parametrize(['name'], [
    ['idp_metadata.xml'],
    ['sp_metadata.xml'],
])
def test_metadata_survives_emission(name):
    entity = parse_metadata(read(name))
    emitted = emit_metadata(entity)
    assert parse_metadata(emitted) == entity
    assert emit_metadata(parse_metadata(emitted)) == emitted


def test_canonicalize_is_idempotent():
    first = canonicalize(parse_xml(read('idp_metadata.xml')))
    second = canonicalize(parse_xml(first))
    assert first == second
    assert first.startswith(b'<md:EntityDescriptor')


def test_pretty():
    text = pretty(read('response.xml'))
    assert 'samlp:Response' in text
    assert '\n  <saml:Issuer>' in text


ACS_TEMPLATE = """\
<md:EntityDescriptor entityID="mypartner:saml2.0"
    xmlns:md="urn:oasis:names:tc:SAML:2.0:metadata">
  <md:SPSSODescriptor protocolSupportEnumeration="{protocol}">
    {endpoints}
  </md:SPSSODescriptor>
</md:EntityDescriptor>
"""

ACS_ENDPOINT = (
    '<md:AssertionConsumerService index="{}" isDefault="{}" '
    'Binding="{}" Location="https://mypartner.com/acs"/>'
)


def sp_document(*endpoints):
    return ACS_TEMPLATE.format(
        protocol='urn:oasis:names:tc:SAML:2.0:protocol',
        endpoints='\n'.join(
            ACS_ENDPOINT.format(*endpoint) for endpoint in endpoints
        ),
    ).encode('utf-8')


@mark.parametrize(['endpoints', 'error'], [
    [
        [(0, 'true', BINDING_POST), (1, 'true', BINDING_ARTIFACT)],
        DuplicateDefaultAcs,
    ],
    [
        [(0, 'true', BINDING_POST), (0, 'false', BINDING_ARTIFACT)],
        DuplicateAcsIndex,
    ],
    [
        [(0, 'true', 'urn:example:carrier-pigeon')],
        UnknownBinding,
    ],
    [
        [],
        MissingRequiredElement,
    ],
])
def test_bad_sp_metadata(endpoints, error):
    with raises(error):
        parse_metadata(sp_document(*endpoints))


def test_metadata_without_role():
    with raises(UnknownRole):
        parse_metadata(
            b'<md:EntityDescriptor entityID="x" '
            b'xmlns:md="urn:oasis:names:tc:SAML:2.0:metadata"/>'
        )


def test_response_fields():
    response = parse_response(read('response.xml'))

    assert response.id == 'ad58514ea9365e51c382218fea'
    assert response.issue_instant == parse_instant('2009-04-22T12:33:36Z')
    assert response.issuer == 'http://login.mycompany.com/mypartner'
    assert response.destination == 'https://mypartner.com/metaAlias/sp'
    assert response.consent == \
        'urn:oasis:names:tc:SAML:2.0:consent:unspecified'
    assert response.status == STATUS_SUCCESS
    assert not response.is_encrypted

    assertion = response.assertion
    assert assertion.id == '1234'
    assert assertion.subject.confirmation.method == CM_BEARER
    assert assertion.subject.confirmation.recipient == \
        'https://mypartner.com/metaAlias/sp'
    assert assertion.subject.confirmation.not_on_or_after == \
        parse_instant('2009-04-22T12:43:36Z')
    assert assertion.conditions.not_before == \
        parse_instant('2009-04-22T12:28:36Z')
    assert assertion.conditions.not_on_or_after == \
        parse_instant('2009-04-22T12:33:36Z')
    assert assertion.conditions.audiences == ('mypartner.com:saml2.0',)

    statement = assertion.authn_statement
    assert statement.session_index == 'ccda16bc322adf4f74d556bd'
    assert statement.locality_address == '192.168.0.189'
    assert statement.locality_dns == 'myserver.mycompany.com'

    attributes = {
        attribute.name: attribute for attribute in assertion.attributes
    }
    assert attributes['clientId'].values == ('1234',)
    assert attributes['uid'].values == ('the.user@mycompany.com',)
    assert attributes['uid'].name_format == ATTRNAME_BASIC


def test_response_survives_emission():
    response = parse_response(read('response.xml'))
    assert parse_response(emit_response(response)) == response
    assert parse_message(emit_response(response)) == response


def test_authn_request_survives_emission():
    request = AuthnRequest(
        id='_4fee3b046395c4e751011e97f8900b5273d56685',
        issue_instant=parse_instant('2009-04-22T12:33:00Z'),
        issuer='mypartner:saml2.0',
        acs_url='https://mypartner.com/federation/metaAlias/sp',
        protocol_binding=BINDING_POST,
        name_id_format=NAMEID_TRANSIENT,
    )
    assert parse_authn_request(emit_authn_request(request)) == request


@mark.parametrize(['old', 'new', 'error'], [
    [
        b'IssueInstant="2009-04-22T12:33:36Z"\n  Version',
        b'IssueInstant="2009-04-22T12:33:36"\n  Version',
        BadTimestamp,
    ],
    [
        b'<saml:Issuer>http://login.mycompany.com/mypartner</saml:Issuer>\n'
        b'  <samlp:Status>',
        b'<samlp:Status>',
        MissingRequiredElement,
    ],
    [
        b'<saml:AttributeStatement>',
        b'<saml:AttributeStatement><saml:Bogus/>',
        UnexpectedElement,
    ],
    [
        b'</samlp:Response>',
        b'',
        MalformedXml,
    ],
])
def test_bad_response(old, new, error):
    document = read('response.xml')
    assert old in document
    with raises(error):
        parse_response(document.replace(old, new, 1))


def test_foreign_extensions_are_kept():
    document = read('response.xml').replace(
        b'</saml:AttributeStatement>',
        b'</saml:AttributeStatement>'
        b'<ext:Tracking xmlns:ext="urn:example:ext">42</ext:Tracking>',
    )
    assertion = parse_response(document).assertion
    assert len(assertion.extensions) == 1
    assert assertion.extensions[0].text == '42'


@mark.parametrize(['document'], [
    [b'<!DOCTYPE x [<!ENTITY a "b">]><x>&a;</x>'],
    [b'<x>'],
    [b''],
])
def test_parse_xml_rejects(document):
    with raises(MalformedXml):
        parse_xml(document)


@mark.parametrize(['name', 'parser'], [
    ['response.xml', parse_response],
    ['idp_metadata.xml', parse_metadata],
    ['sp_metadata.xml', parse_metadata],
])
@settings(max_examples=10000, deadline=None)
@given(
    position=strategies.integers(min_value=0, max_value=8000),
    garbage=strategies.text(max_size=20),
)
def test_parser_fuzz(name, parser, position, garbage):
    document = read(name).decode('utf-8')
    position = min(position, len(document))
    mangled = document[:position] + garbage + document[position:]

    try:
        parser(mangled.encode('utf-8'))
    except PARSE_ERRORS:
        pass


@mark.parametrize(['parser'], [[parse_response], [parse_metadata]])
@settings(max_examples=10000, deadline=None)
@given(data=strategies.binary(max_size=300))
def test_parser_fuzz_bytes(parser, data):
    try:
        parser(data)
    except PARSE_ERRORS:
        pass


# Generated documents

ALPHABET = (
    ascii_letters + digits + '<>&"\'.,;:!?/#%=+-_()[]{}@$*'
    + 'éßñü€日本'
)

WORDS = strategies.text(alphabet=ALPHABET, min_size=1, max_size=12)
TEXTS = strategies.lists(WORDS, min_size=1, max_size=3).map(' '.join)
OPTIONAL_TEXTS = strategies.none() | TEXTS
IDS = strategies.from_regex(r'\A_[0-9a-f]{40}\Z')
INSTANTS = strategies.datetimes(
    min_value=datetime(2000, 1, 1), max_value=datetime(2099, 12, 31),
).map(to_instant)

NAMES = strategies.from_regex(r'\A[A-Za-z][A-Za-z0-9]{0,8}\Z').filter(
    lambda name: not name.lower().startswith('xml')
)
NAMESPACES = strategies.sampled_from([
    None, NS_ASSERTION, NS_PROTOCOL, 'urn:example:one', 'urn:example:two',
])


def xml_elements(children, max_children=3):
    return strategies.builds(
        XmlElement,
        namespace=NAMESPACES,
        name=NAMES,
        attributes=strategies.dictionaries(
            strategies.tuples(NAMESPACES, NAMES), TEXTS, max_size=3
        ),
        children=strategies.lists(children, max_size=max_children),
        text=OPTIONAL_TEXTS,
    )


DOCUMENTS = strategies.recursive(
    xml_elements(strategies.nothing(), max_children=0), xml_elements,
    max_leaves=12
)

ASSERTIONS = strategies.builds(
    Assertion,
    id=IDS,
    issue_instant=INSTANTS,
    issuer=TEXTS,
    subject=strategies.builds(
        Subject,
        name_id=TEXTS,
        name_id_format=OPTIONAL_TEXTS,
        confirmation=strategies.builds(
            SubjectConfirmation,
            method=strategies.just(CM_BEARER) | TEXTS,
            not_on_or_after=INSTANTS,
            recipient=TEXTS,
            in_response_to=strategies.none() | IDS,
        ),
    ),
    conditions=strategies.builds(
        Conditions,
        not_before=INSTANTS,
        not_on_or_after=INSTANTS,
        audiences=strategies.lists(TEXTS, max_size=3),
    ),
    authn_statement=strategies.builds(
        AuthnStatement,
        authn_instant=INSTANTS,
        session_index=TEXTS,
        locality_address=OPTIONAL_TEXTS,
        locality_dns=OPTIONAL_TEXTS,
        authn_context=OPTIONAL_TEXTS,
    ),
    attributes=strategies.lists(strategies.builds(
        Attribute,
        name=TEXTS,
        friendly_name=OPTIONAL_TEXTS,
        name_format=OPTIONAL_TEXTS,
        values=strategies.lists(TEXTS, min_size=1, max_size=3),
    ), max_size=3),
)

RESPONSES = strategies.builds(
    Response,
    id=IDS,
    issue_instant=INSTANTS,
    issuer=TEXTS,
    destination=OPTIONAL_TEXTS,
    status=strategies.sampled_from([
        STATUS_SUCCESS, STATUS_REQUESTER, STATUS_RESPONDER,
        STATUS_AUTHN_FAILED,
    ]),
    assertion=strategies.none() | ASSERTIONS,
    in_response_to=strategies.none() | IDS,
    consent=OPTIONAL_TEXTS,
)

REQUESTS = strategies.builds(
    AuthnRequest,
    id=IDS,
    issue_instant=INSTANTS,
    issuer=TEXTS,
    acs_url=TEXTS,
    destination=OPTIONAL_TEXTS,
    protocol_binding=OPTIONAL_TEXTS,
    name_id_format=OPTIONAL_TEXTS,
)


@settings(max_examples=200, deadline=None)
@given(document=DOCUMENTS)
def test_canonicalize_fixed_point(document):
    first = canonicalize(document)
    assert canonicalize(parse_xml(first)) == first


@mark.parametrize(['values', 'emit', 'parse'], [
    [ASSERTIONS, emit_assertion, parse_assertion],
    [RESPONSES, emit_response, parse_response],
    [REQUESTS, emit_authn_request, parse_authn_request],
])
@settings(max_examples=200, deadline=None)
@given(data=strategies.data())
def test_emission_round_trip(values, emit, parse, data):
    value = data.draw(values)
    emitted = emit(value)
    parsed = parse(emitted)

    assert parsed == value
    assert emit(parsed) == emitted
