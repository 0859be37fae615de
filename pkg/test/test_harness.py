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
Test suite for the simulator, the capture decoder and the demo federation.
"""

from pytest import fixture, mark, raises
from ujson import loads

from samlforge.logging import setup_logging
from samlforge.core.types import AuthnRequest, Response
from samlforge.crypto import load_keystore
from samlforge.bindings import serialize_post
from samlforge.sp import ServiceProvider
from samlforge.harness import (
    InconsistentScenario, Scenario, Trace, Simulator, load_scenarios,
    write_journal, decode_capture, format_decoded, keygen,
)
from samlforge.harness.scenario import (
    FAULT_STEPS, expected_step, expected_outcome,
)
from samlforge.harness.browser import drop_field
from samlforge.harness.bootstrap import demo_scenarios

from conftest import TEST_KEY_SIZE, CLIENT_IP


SP = 'mypartner:saml2.0'


def setup_module(module):
    setup_logging(verbosity=2)


@fixture
def simulator(federation, now):
    return Simulator(federation, start=now, seed=42)


# Scenarios

def test_demo_scenarios_cover_every_fault():
    scenarios = [Scenario(**stanza) for stanza in demo_scenarios()]
    injected = {
        fault for scenario in scenarios for fault in scenario.faults
    }
    assert injected == set(FAULT_STEPS)
    assert sum(1 for scenario in scenarios if not scenario.faults) == 5


@mark.parametrize(['faults', 'step'], [
    [['wrong_audience'], 'audience'],
    [['replay_assertion', 'wrong_audience'], 'audience'],
    [['wrong_recipient', 'expire_window'], 'window'],
    [['replay_assertion'], 'replay'],
    [[], None],
])
def test_expected_step(faults, step):
    assert expected_step(faults) == step


def test_expected_outcome():
    assert expected_outcome(['strip_signature']) == 'SignatureMissing'
    assert expected_outcome(['strip_signature', 'wrong_audience']) is None


def test_scenario_defaults():
    scenario = Scenario('late', 'artifact', ['expire_window'])
    assert scenario.expect == 'failure'
    assert scenario.expect_step == 'window'
    assert not scenario.expects_success


@mark.parametrize(['kwargs'], [
    [{'flow': 'idp_initiated', 'faults': ['replay_artifact']}],
    [{'flow': 'artifact', 'faults': ['single_token_of_pair']}],
    [{'flow': 'idp_initiated', 'expect': 'failure'}],
    [{
        'flow': 'idp_initiated', 'faults': ['wrong_audience'],
        'expect': 'success',
    }],
    [{
        'flow': 'idp_initiated', 'faults': ['wrong_audience'],
        'expect_step': 'bearer',
    }],
])
def test_inconsistent_scenario(kwargs):
    with raises(InconsistentScenario):
        Scenario('broken', **kwargs)


def test_load_scenarios(demo):
    scenarios = load_scenarios(demo.scenarios)
    assert len(scenarios) == len(demo_scenarios())
    assert scenarios[0].name == 'idp_initiated clean'


def test_load_duplicated_scenarios(tmp_path):
    path = tmp_path / 'scenarios.toml'
    path.write_text(
        '[[scenario]]\nname = "a"\nflow = "artifact"\n'
        '[[scenario]]\nname = "a"\nflow = "idp_initiated"\n',
        encoding='utf-8',
    )
    with raises(InconsistentScenario):
        load_scenarios(path)


# Simulation

def test_simulate_demo(simulator, demo):
    results = simulator.simulate(load_scenarios(demo.scenarios))

    failures = [
        '{}: {} at {}'.format(
            result.scenario.name, result.outcome, result.failed_step
        )
        for result in results if not result.passed
    ]
    assert failures == []

    for result in results:
        scenario = result.scenario
        if scenario.faults:
            assert result.failed_step == scenario.expect_step
            assert result.outcome == scenario.expect_outcome
        else:
            assert result.outcome == 'Valid'


@mark.parametrize(['flow'], [
    ['idp_initiated'],
    ['sp_initiated'],
    ['artifact'],
    ['artifact_pair'],
    ['single_logout'],
])
def test_simulate_flow(simulator, flow):
    result = simulator.run(Scenario(flow, flow))
    events = result.events

    assert result.passed
    assert [event.sequence for event in events] == list(range(len(events)))
    assert all(
        earlier.timestamp <= later.timestamp
        for earlier, later in zip(events, events[1:])
    )
    assert 'ValidationReport' in [event.kind for event in events]


def test_simulate_logout_steps(simulator):
    result = simulator.run(Scenario('logout', 'single_logout'))
    assert result.report.steps[-1] == 'logout'


def test_simulate_sp_initiated_lands_on_target(simulator):
    result = simulator.run(Scenario(
        'deep link', 'sp_initiated', target='http://127.0.0.1:8080/app/doc'
    ))
    assert result.passed
    assert result.report.redirect_url == 'http://127.0.0.1:8080/app/doc'


def test_simulate_mismatch(simulator):
    # The flow succeeds, the expectation is wrong
    scenario = Scenario('skewed', 'idp_initiated')._replace(
        expect='failure', expect_step='window'
    )
    result = simulator.run(scenario)
    assert not result.passed
    assert result.outcome == 'Valid'


def test_simulate_unknown_user(simulator):
    with raises(LookupError):
        simulator.run(Scenario('ghost', 'idp_initiated', user='ghost'))


def test_write_journal(simulator, tmp_path):
    results = simulator.simulate([
        Scenario('clean', 'artifact'),
        Scenario('replayed', 'artifact', ['replay_artifact']),
    ])
    path = tmp_path / 'journal.json'
    write_journal(results, path)

    journal = loads(path.read_text(encoding='utf-8'))
    assert [entry['scenario'] for entry in journal] == ['clean', 'replayed']
    assert journal[1]['failed_step'] == 'artifact'
    assert journal[1]['outcome'] == 'AlreadyConsumed'

    kinds = [event['kind'] for event in journal[0]['events']]
    assert 'SAMLart' in kinds
    assert 'ArtifactResolve' in kinds
    assert journal[0]['events'][0]['timestamp'] == '2009-04-22T12:28:36Z'


def test_trace():
    trace = Trace()
    event = trace.record(None, 'browser', 'idp->sp', 'SAMLResponse', b'x', '')
    assert event.sequence == 0
    assert len(event.digest) == 64
    assert len(trace) == 1

    with raises(ValueError):
        trace.record(None, 'proxy', 'idp->sp', 'SAMLResponse', b'x', '')


def test_drop_field():
    url = 'https://sp/acs/artifact?SAMLart=a&SAMLart2=b&RelayState=c'
    assert drop_field(url, 'SAMLart2') == \
        'https://sp/acs/artifact?SAMLart=a&RelayState=c'


# Capture decoding

def test_decode_post_capture(federation, idp, now):
    session = idp.login('jdoe', now, client_ip=CLIENT_IP)
    form = idp.sso(session, SP, now, relay_state='token').form
    sp_metadata = federation.sp.local

    sealed = decode_capture(serialize_post(form), metadata=sp_metadata)
    assert sealed.binding == 'post'
    assert sealed.field == 'SAMLResponse'
    assert sealed.relay_state == 'token'
    assert isinstance(sealed.message, Response)
    assert sealed.assertion is None

    opened = decode_capture(
        serialize_post(form), metadata=sp_metadata,
        store=federation.sp.store,
    )
    assert opened.assertion.subject.name_id == 'the.user@mycompany.com'
    assert opened.missing == []
    assert opened.extra == []

    text = format_decoded(opened)
    assert 'Encrypted assertion: yes' in text
    assert '  clientId = 1234' in text
    assert 'RelayState: token' in text


def test_decode_attribute_mismatch(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'encrypt_assertion': False, 'withhold': ['uid']},
    )
    session = idp.login('jdoe', now)
    form = idp.sso(session, SP, now).form

    decoded = decode_capture(
        serialize_post(form), metadata=federation.sp.local
    )
    assert decoded.missing == ['uid']
    assert 'Missing attributes: uid' in format_decoded(decoded)


def test_decode_redirect_capture(federation, now):
    sp = ServiceProvider(federation.sp)
    redirect = sp.build_authn_request('/app', now)

    decoded = decode_capture(redirect.url)
    assert decoded.binding == 'redirect'
    assert decoded.field == 'SAMLRequest'
    assert isinstance(decoded.message, AuthnRequest)
    assert decoded.assertion is None
    assert 'Message: AuthnRequest' in format_decoded(decoded)


# Bootstrap

def test_demo_federation(demo, config):
    assert demo.config.is_file()
    assert (demo.directory / 'users.txt').is_file()
    assert config['sp']['skew'] == 30
    assert config['idp']['registry'].endswith('idp')


def test_keygen(tmp_path):
    path = tmp_path / 'keystore.pem'
    keygen(path, 'signing', 'example:saml2.0', 'pw', key_size=TEST_KEY_SIZE)

    store = load_keystore(path, 'pw')
    assert store.aliases == ['signing']


def test_simulate_with_skew(federation, now):
    # A window shifted by an hour is never rescued by a minute of skew
    simulator = Simulator(federation, start=now, skew=60)
    result = simulator.run(
        Scenario('late', 'idp_initiated', ['expire_window'])
    )
    assert result.passed
    assert result.report.failed_step == 'window'
