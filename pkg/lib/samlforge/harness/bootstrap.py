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
Demo federation generator.

Creates a directory with everything the simulator and the service need:

- ``idp/`` registry of the identity provider ``mycompany:saml2.0``.
- ``sp/`` registry of the service provider ``mypartner:saml2.0``, signing its
  requests and asking for signed and encrypted assertions.
- ``users.txt`` records of the attribute source.
- ``config.toml`` service configuration.
- ``scenarios.toml`` every flow, without faults and with each fault that
  applies to it.
"""

from pathlib import Path
from collections import namedtuple

from toml import dumps as toml_dumps

from .scenario import FAULT_FLOWS, expected_step, expected_outcome
from ..schema import FLOWS, FAULTS
from ..codec import (
    Endpoint, IndexedEndpoint, EncryptionMethod, RequestedAttribute,
    IdpSsoDescriptor, SpSsoDescriptor, EntityDescriptor, emit_metadata,
)
from ..codec.security import b64
from ..core.urns import (
    BINDING_POST, BINDING_REDIRECT, BINDING_ARTIFACT, BINDING_SOAP,
    NAMEID_EMAIL, ALG_AES128_CBC, ATTRNAME_BASIC,
)
from ..crypto import (
    KeyEntry, KeyStore, certificate_der, generate_identity, save_keystore,
)
from ..registry import FederationRegistry, save_registry
from ..logging import get_logger


log = get_logger(__name__)


IDP_ENTITY_ID = 'mycompany:saml2.0'
SP_ENTITY_ID = 'mypartner:saml2.0'

DEFAULT_BASE_URL = 'http://127.0.0.1:8080'
DEFAULT_PASSPHRASE = 'secret'
DEFAULT_KEY_SIZE = 2048

USERS = """\
# user-key name_id attributes
jdoe the.user@mycompany.com clientId=1234 uid=the.user@mycompany.com
asmith asmith@mycompany.com clientId=5678 uid=asmith@mycompany.com
"""


Bootstrapped = namedtuple(
    'Bootstrapped', ['directory', 'config', 'scenarios', 'idp', 'sp']
)


def new_identity(alias, common_name, key_size=DEFAULT_KEY_SIZE):
    """
    :rtype: KeyEntry
    """
    certificate, private_key = generate_identity(
        common_name, key_size=key_size
    )
    return KeyEntry(alias, certificate, private_key)


def keygen(path, alias, common_name, passphrase, key_size=DEFAULT_KEY_SIZE):
    """
    Write a keystore with a single fresh entry.

    :rtype: KeyStore
    """
    store = KeyStore([new_identity(alias, common_name, key_size)])
    save_keystore(store, path, passphrase)
    return store


def _cert(entry):
    return b64(certificate_der(entry.certificate))


def idp_metadata(base_url, signing):
    """
    Identity provider descriptor with POST and redirect single sign-on,
    artifact resolution and single logout endpoints.

    :rtype: EntityDescriptor
    """
    return EntityDescriptor(IDP_ENTITY_ID, IdpSsoDescriptor(
        want_authn_requests_signed=False,
        sso_endpoints=[
            Endpoint(BINDING_POST, base_url + '/sso'),
            Endpoint(BINDING_REDIRECT, base_url + '/sso'),
        ],
        signing_certs=[_cert(signing)],
        single_logout_endpoints=[Endpoint(BINDING_POST, base_url + '/slo')],
        artifact_resolution_endpoints=[
            IndexedEndpoint(
                0, True, BINDING_SOAP, base_url + '/artifact-resolve'
            ),
        ],
        name_id_formats=[NAMEID_EMAIL],
    ))


def sp_metadata(base_url, signing, encryption):
    """
    Service provider descriptor with a POST and an artifact consumer
    endpoint, asking for signed and encrypted assertions.

    :rtype: EntityDescriptor
    """
    return EntityDescriptor(SP_ENTITY_ID, SpSsoDescriptor(
        authn_requests_signed=True,
        want_assertions_signed=True,
        acs_endpoints=[
            IndexedEndpoint(0, True, BINDING_POST, base_url + '/acs'),
            IndexedEndpoint(
                1, False, BINDING_ARTIFACT, base_url + '/acs/artifact'
            ),
        ],
        name_id_formats=[NAMEID_EMAIL],
        signing_certs=[_cert(signing)],
        encryption_certs=[_cert(encryption)],
        encryption_methods=[EncryptionMethod(ALG_AES128_CBC, 128)],
        single_logout_endpoints=[Endpoint(BINDING_POST, base_url + '/slo')],
        requested_attributes=[
            RequestedAttribute('clientId', None, ATTRNAME_BASIC, True),
            RequestedAttribute('uid', None, ATTRNAME_BASIC, True),
        ],
    ))


def demo_scenarios():
    """
    Every flow without faults, then with each fault that applies to it.

    :rtype: list
    """
    scenarios = []
    for flow in FLOWS:
        scenarios.append({
            'name': '{} clean'.format(flow),
            'flow': flow,
            'expect': 'success',
        })

    for flow in FLOWS:
        for fault in FAULTS:
            flows = FAULT_FLOWS.get(fault)
            if flows is not None and flow not in flows:
                continue
            scenarios.append({
                'name': '{} {}'.format(flow, fault),
                'flow': flow,
                'faults': [fault],
                'expect': 'failure',
                'expect_step': expected_step([fault]),
                'expect_outcome': expected_outcome([fault]),
            })
    return scenarios


def demo_config(base_url, passphrase):
    return {
        'service': {
            'base_url': base_url,
            'fixture_user': 'jdoe',
            'timeout': '10s',
        },
        'idp': {
            'registry': '{config.dir}/idp',
            'passphrase': passphrase,
            'source': {
                'type': 'records',
                'config': {
                    'path': '{config.dir}/users.txt',
                },
            },
        },
        'sp': {
            'registry': '{config.dir}/sp',
            'passphrase': passphrase,
            'default_landing': base_url + '/app',
            'skew': '30s',
            'check_locality': True,
        },
    }


def bootstrap(
        directory, base_url=DEFAULT_BASE_URL, passphrase=DEFAULT_PASSPHRASE,
        key_size=DEFAULT_KEY_SIZE):
    """
    Create a demo federation.

    :param directory: Where to create it. Created if missing.
    :param str base_url: URL the service will be reachable at.
    :param str passphrase: Passphrase of both keystores.
    :param int key_size: RSA modulus size of the generated keys.

    :return: The paths of what was created.
    :rtype: Bootstrapped
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    base_url = base_url.rstrip('/')

    idp_signing = new_identity('idp-signing', IDP_ENTITY_ID, key_size)
    sp_signing = new_identity('sp-signing', SP_ENTITY_ID, key_size)
    sp_encryption = new_identity('sp-encryption', SP_ENTITY_ID, key_size)

    idp_local = idp_metadata(base_url, idp_signing)
    sp_local = sp_metadata(base_url, sp_signing, sp_encryption)

    idp = FederationRegistry(idp_local, KeyStore([idp_signing]), {
        'signing_alias': 'idp-signing',
    })
    sp = FederationRegistry(
        sp_local, KeyStore([sp_signing, sp_encryption]), {
            'signing_alias': 'sp-signing',
            'encryption_alias': 'sp-encryption',
            'default_landing': base_url + '/app',
        }
    )

    idp.register_partner(emit_metadata(sp_local))
    sp.register_partner(emit_metadata(idp_local))

    save_registry(idp, directory / 'idp', passphrase)
    save_registry(sp, directory / 'sp', passphrase)

    (directory / 'users.txt').write_text(USERS, encoding='utf-8')

    config = directory / 'config.toml'
    config.write_text(
        toml_dumps(demo_config(base_url, passphrase)), encoding='utf-8'
    )

    scenarios = directory / 'scenarios.toml'
    scenarios.write_text(
        toml_dumps({'scenario': demo_scenarios()}), encoding='utf-8'
    )

    log.info('Demo federation created in {}'.format(directory))
    return Bootstrapped(
        directory, config, scenarios, directory / 'idp', directory / 'sp'
    )


__all__ = [
    'IDP_ENTITY_ID',
    'SP_ENTITY_ID',
    'Bootstrapped',
    'keygen',
    'idp_metadata',
    'sp_metadata',
    'demo_scenarios',
    'bootstrap',
]
