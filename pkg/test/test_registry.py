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
Test suite for the federation registry.
"""

from pytest import fixture, mark, raises

from samlforge.logging import setup_logging
from samlforge.codec import parse_metadata
from samlforge.crypto import KeyEntry, KeyStore, generate_identity
from samlforge.bindings import source_id_for
from samlforge.registry import (
    MalformedMetadata, SelfRegistration, IncompleteLocalConfig,
    UnknownPartner, PolicyConflict, FederationRegistry, describe_partner,
    resolve_policy, load_registry, save_registry,
)

from conftest import TEST_KEY_SIZE


def setup_module(module):
    setup_logging(verbosity=2)


@fixture(scope='module')
def entry():
    return KeyEntry(
        'idp-signing', *generate_identity('mycompany:saml2.0', TEST_KEY_SIZE)
    )


@fixture
def registry(corpus, entry):
    local = parse_metadata((corpus / 'idp_metadata.xml').read_bytes())
    return FederationRegistry(local, KeyStore([entry]), {
        'signing_alias': 'idp-signing',
    })


def test_local_settings_defaults(registry):
    settings = registry.settings
    assert registry.entity_id == 'mycompany:saml2.0'
    assert settings.signing_alias == 'idp-signing'
    assert settings.encryption_alias is None
    assert settings.artifact_ttl == 300
    assert settings.logout_timeout == 60
    assert settings.request_ttl == 300


def test_register_partner(registry, corpus):
    partner = registry.register_partner(
        (corpus / 'sp_metadata.xml').read_bytes()
    )
    policy = partner.policy

    assert partner.entity.entity_id == 'mypartner:saml2.0'
    assert policy.sign_assertion is True
    assert policy.encrypt_assertion is True
    assert policy.require_signed_requests is True
    assert policy.default_binding == 'post'
    assert policy.validity == 300
    assert policy.release == ['*']

    assert describe_partner(partner) == \
        'mypartner:saml2.0 sign=true encrypt=true acs=2 endpoints'
    assert registry.has_partner('mypartner:saml2.0')
    assert registry.service_providers() == [partner]
    assert registry.identity_providers() == []

    # Placeholder certificates are not trusted
    assert registry.store.signing_anchors('mypartner:saml2.0') == ()

    assert registry.find_partner_by_source_id(
        source_id_for('mypartner:saml2.0')
    ) == partner
    assert registry.find_partner_by_source_id(bytes(20)) is None


def test_register_with_policy(registry, corpus):
    partner = registry.register_partner(
        (corpus / 'sp_metadata.xml').read_bytes(), {
            'encrypt_assertion': False,
            'validity': '2m',
            'default_binding': 'artifact',
            'withhold': ['uid'],
        }
    )
    assert partner.policy.encrypt_assertion is False
    assert partner.policy.validity == 120
    assert partner.policy.default_binding == 'artifact'
    assert partner.policy.withhold == ['uid']


@mark.parametrize(['settings', 'error'], [
    [{'sign_assertion': False}, PolicyConflict],
    [{'bogus': True}, MalformedMetadata],
    [{'validity': 0}, MalformedMetadata],
])
def test_bad_policy(registry, corpus, settings, error):
    with raises(error):
        registry.register_partner(
            (corpus / 'sp_metadata.xml').read_bytes(), settings
        )
    assert not registry.has_partner('mypartner:saml2.0')


def test_register_self(registry, corpus):
    with raises(SelfRegistration):
        registry.register_partner((corpus / 'idp_metadata.xml').read_bytes())


def test_register_same_role(registry, corpus):
    other = (corpus / 'idp_metadata.xml').read_bytes().replace(
        b'entityID="mycompany:saml2.0"', b'entityID="other:saml2.0"'
    )
    with raises(MalformedMetadata):
        registry.register_partner(other)


def test_register_garbage(registry):
    with raises(MalformedMetadata):
        registry.register_partner(b'<md:EntityDescriptor')


def test_remove_partner(registry, corpus):
    registry.register_partner((corpus / 'sp_metadata.xml').read_bytes())
    registry.remove_partner('mypartner:saml2.0')

    assert not registry.has_partner('mypartner:saml2.0')
    with raises(UnknownPartner):
        registry.partner('mypartner:saml2.0')
    with raises(UnknownPartner):
        registry.remove_partner('mypartner:saml2.0')


def test_export_needs_published_certificate(registry):
    with raises(IncompleteLocalConfig):
        registry.export_metadata()


def test_idp_partner_policy(corpus):
    entity = parse_metadata((corpus / 'idp_metadata.xml').read_bytes())
    policy = resolve_policy(entity)

    assert policy.sign_assertion is True
    assert policy.encrypt_assertion is False
    assert policy.require_signed_requests is True
    assert policy.default_binding == 'post'


def test_load_demo_registry(demo):
    idp = load_registry(demo.idp, 'secret')
    sp = load_registry(demo.sp, 'secret')

    assert idp.entity_id == 'mycompany:saml2.0'
    assert sp.entity_id == 'mypartner:saml2.0'
    assert [p.entity.entity_id for p in idp.partners] == ['mypartner:saml2.0']
    assert [p.entity.entity_id for p in sp.partners] == ['mycompany:saml2.0']

    # Trust anchors come from the partner metadata
    assert len(idp.store.signing_anchors('mypartner:saml2.0')) == 1
    assert len(idp.store.encryption_anchors('mypartner:saml2.0')) == 1
    assert sp.encryption_alias == 'sp-encryption'

    assert parse_metadata(idp.export_metadata()) == idp.local


def test_save_registry_round_trip(demo, tmp_path):
    idp = load_registry(demo.idp, 'secret')
    idp.register_partner(
        idp.partner('mypartner:saml2.0').metadata, {'validity': 60}
    )
    save_registry(idp, tmp_path / 'idp', 'other')

    loaded = load_registry(tmp_path / 'idp', 'other')
    assert loaded.partner('mypartner:saml2.0').policy.validity == 60
    assert loaded.partner('mypartner:saml2.0').policy == \
        idp.partner('mypartner:saml2.0').policy

    loaded.remove_partner('mypartner:saml2.0')
    save_registry(loaded, tmp_path / 'idp')
    assert list((tmp_path / 'idp' / 'partners').iterdir()) == []
