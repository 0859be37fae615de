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
Test suite for module samlforge and its command line.
"""

from pytest import mark

from samlforge import __version__
from samlforge.args import parse_args
from samlforge.main import (
    main, EXIT_OK, EXIT_USAGE, EXIT_DECODE, EXIT_MISMATCH, EXIT_CONFIG,
)
from samlforge.idp import IdentityProvider
from samlforge.bindings import serialize_post
from samlforge.harness import load_federation

from conftest import TEST_KEY_SIZE, CLIENT_IP


START = '2009-04-22T12:28:36Z'


def run(*argv):
    return main(parse_args([str(arg) for arg in argv]))


def test_semantic_version():
    """
    Check that version follows the Semantic Versioning 2.0.0 specification.

        http://semver.org/
    """
    mayor, minor, rev = map(int, __version__.split('.'))

    assert mayor >= 0
    assert minor >= 0
    assert rev >= 0


def test_bootstrap(tmp_path, capsys):
    assert run(
        'bootstrap', tmp_path / 'demo', '--key-size', TEST_KEY_SIZE
    ) == EXIT_OK

    assert (tmp_path / 'demo' / 'config.toml').is_file()
    assert (tmp_path / 'demo' / 'idp' / 'keystore.pem').is_file()
    assert 'Scenarios: ' in capsys.readouterr().out


def test_keygen(tmp_path):
    path = tmp_path / 'keystore.pem'
    arguments = [
        'keygen', path, '--alias', 'signing', '--common-name', 'x',
        '--passphrase', 'pw', '--key-size', TEST_KEY_SIZE,
    ]
    assert run(*arguments) == EXIT_OK

    # Never overwrite a keystore
    assert run(*arguments) == EXIT_USAGE


def test_simulate(demo, capsys):
    assert run(
        'simulate', demo.scenarios, '--config', demo.config,
        '--start', START, '--seed', 3,
    ) == EXIT_OK

    out = capsys.readouterr().out
    assert 'FAIL' not in out
    assert 'PASS idp_initiated clean [idp_initiated] Valid: session' in out


def test_simulate_journal(demo, tmp_path):
    journal = tmp_path / 'journal.json'
    assert run(
        'simulate', demo.scenarios, '--config', demo.config,
        '--start', START, '--journal', journal,
    ) == EXIT_OK
    assert journal.is_file()


@mark.parametrize(['scenario', 'code'], [
    [
        '[[scenario]]\nname = "a"\nflow = "idp_initiated"\n'
        'faults = ["wrong_audience"]\nexpect_outcome = "Expired"\n',
        EXIT_MISMATCH,
    ],
    [
        '[[scenario]]\nname = "a"\nflow = "idp_initiated"\n'
        'faults = ["replay_artifact"]\n',
        EXIT_CONFIG,
    ],
    [
        '[[scenario]]\nname = "a"\nflow = "telepathy"\n',
        EXIT_CONFIG,
    ],
])
def test_simulate_exit_codes(demo, tmp_path, scenario, code):
    path = tmp_path / 'scenarios.toml'
    path.write_text(scenario, encoding='utf-8')

    assert run(
        'simulate', path, '--config', demo.config, '--start', START
    ) == code


def test_metadata_list(demo, capsys):
    assert run(
        'metadata', 'list', '--registry-dir', demo.idp,
        '--passphrase', 'secret',
    ) == EXIT_OK
    assert 'mypartner:saml2.0 sign=true encrypt=true acs=2 endpoints' in \
        capsys.readouterr().out


def test_metadata_export(demo, tmp_path):
    output = tmp_path / 'idp.xml'
    assert run(
        'metadata', 'export', '--registry-dir', demo.idp,
        '--passphrase', 'secret', '--output', output,
    ) == EXIT_OK
    assert b'mycompany:saml2.0' in output.read_bytes()


def test_metadata_import_garbage(demo, tmp_path):
    garbage = tmp_path / 'garbage.xml'
    garbage.write_text('<md:EntityDescriptor', encoding='utf-8')

    assert run(
        'metadata', 'import', garbage, '--registry-dir', demo.sp,
        '--passphrase', 'secret',
    ) == EXIT_DECODE


def test_metadata_wrong_passphrase(demo):
    assert run(
        'metadata', 'list', '--registry-dir', demo.idp,
        '--passphrase', 'wrong',
    ) == EXIT_DECODE


def test_decode(demo, config, now, tmp_path, capsys):
    federation = load_federation(config)
    idp = IdentityProvider(federation.idp, federation.source)
    session = idp.login('jdoe', now, client_ip=CLIENT_IP)
    form = idp.sso(session, 'mypartner:saml2.0', now).form

    capture = tmp_path / 'capture.txt'
    capture.write_bytes(serialize_post(form))

    assert run(
        'decode', capture, '--registry-dir', demo.sp,
        '--passphrase', 'secret',
    ) == EXIT_OK

    out = capsys.readouterr().out
    assert 'Field: SAMLResponse' in out
    assert 'Subject: the.user@mycompany.com' in out


def test_decode_garbage(tmp_path):
    capture = tmp_path / 'capture.txt'
    capture.write_text('SAMLResponse=%%%', encoding='utf-8')
    assert run('decode', capture) == EXIT_DECODE
