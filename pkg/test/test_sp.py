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
Test suite for the service provider engine and its stores.
"""

from random import Random
from threading import Thread, Barrier

from pytest import fixture, mark, raises

from samlforge.logging import setup_logging
from samlforge.core.types import Response, LogoutRequest, new_id
from samlforge.core.urns import STATUS_SUCCESS, NAMEID_EMAIL
from samlforge.core.instant import seconds
from samlforge.codec import emit_message
from samlforge.bindings import encode_post, decode_post, serialize_post
from samlforge.sp import (
    InvalidRequestSignature, ReplayCache, RelayStateStore,
    resolve_relay_state, ValidationReport, ServiceProvider,
)
from samlforge.harness.faults import ENGINE_FAULTS, FaultyIdentityProvider
from samlforge.harness.scenario import expected_step

from conftest import CLIENT_IP


IDP = 'mycompany:saml2.0'
SP = 'mypartner:saml2.0'
ACS = 'http://127.0.0.1:8080/acs'
LANDING = 'http://127.0.0.1:8080/app'

STEPS = [
    'decode', 'parse', 'issuer', 'signature', 'status', 'destination',
    'window', 'audience', 'bearer', 'replay', 'locality', 'relay_state',
]


def setup_module(module):
    setup_logging(verbosity=2)


@fixture
def session(idp, now):
    return idp.login('jdoe', now, client_ip=CLIENT_IP)


@fixture
def plain(federation, idp):
    """
    Make the identity provider issue unencrypted assertions.
    """
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata, {'encrypt_assertion': False}
    )
    return idp


def posted(idp, session, now, **kwargs):
    return serialize_post(idp.sso(session, SP, now, **kwargs).form)


def altered(body, old, new):
    decoded = decode_post(body)
    return serialize_post(encode_post(
        decoded.message.replace(old, new), 'response', ACS,
        decoded.relay_state,
    ))


# Consumer pipeline

def test_consume(idp, sp, session, now):
    report = sp.consume(posted(idp, session, now), CLIENT_IP, now)

    assert report.valid
    assert report.steps == STEPS
    assert report.failed_step is None
    assert report.redirect_url == LANDING
    assert report.warnings == []

    established = report.session
    assert established.name_id == 'the.user@mycompany.com'
    assert established.issuer == IDP
    assert established.session_index == session.session_index
    assert established.client_ip == CLIENT_IP
    assert {
        attribute.name: attribute.values
        for attribute in established.attributes
    } == {
        'clientId': ('1234',),
        'uid': ('the.user@mycompany.com',),
    }
    assert sp.sessions.get(established.session_id) == established
    assert report.summary().startswith('Valid: session ')


def test_consume_far_future_assertion(federation, idp, sp, session, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'validity': 8000 * 365 * 24 * 3600, 'clock_skew': 30},
    )
    report = sp.consume(posted(idp, session, now), CLIENT_IP, now)

    assert report.valid
    assert report.steps == STEPS


def test_expire(idp, sp, session, now):
    sp.build_authn_request(LANDING, now)
    assert sp.consume(posted(idp, session, now), CLIENT_IP, now).valid
    assert len(sp.relay_states) == 1
    assert len(sp.replay) == 1

    assert sp.expire(now) == 0

    later = now + seconds(24 * 3600)
    assert sp.expire(later) == 3
    assert len(sp.relay_states) == 0
    assert len(sp.replay) == 0
    assert sp.expire(later) == 0


@mark.parametrize(['elapsed', 'step', 'outcome'], [
    [1, 'replay', 'Replayed'],
    [299, 'replay', 'Replayed'],
    [301, 'window', 'Expired'],
])
def test_replay(idp, sp, session, now, elapsed, step, outcome):
    body = posted(idp, session, now)
    assert sp.consume(body, CLIENT_IP, now).valid

    report = sp.consume(body, CLIENT_IP, now + seconds(elapsed))
    assert not report.valid
    assert report.failed_step == step
    assert report.outcome == outcome
    assert report.session is None


def test_consume_plain(plain, sp, session, now):
    report = sp.consume(posted(plain, session, now), CLIENT_IP, now)
    assert report.valid


def test_tampered_assertion(plain, sp, session, now):
    body = altered(posted(plain, session, now), b'>1234<', b'>9999<')
    report = sp.consume(body, CLIENT_IP, now)

    assert report.failed_step == 'signature'
    assert report.outcome == 'DigestMismatch'
    assert len(sp.sessions) == 0


def test_single_byte_tampering(plain, sp, session, now):
    message = decode_post(posted(plain, session, now)).message
    start = message.index(b'<saml:Assertion')
    end = message.index(b'</saml:Assertion>') + len(b'</saml:Assertion>')

    accepted = []
    for position in range(start, end):
        tampered = bytearray(message)
        tampered[position] ^= 0x01
        body = serialize_post(encode_post(bytes(tampered), 'response', ACS))
        if sp.consume(body, CLIENT_IP, now).valid:
            accepted.append(position)

    assert accepted == []
    assert len(sp.sessions) == 0


def test_concurrent_consume(idp, sp, session, now):
    body = posted(idp, session, now)

    workers = 32
    barrier = Barrier(workers)
    reports = []

    def consume():
        barrier.wait()
        reports.append(sp.consume(body, CLIENT_IP, now))

    threads = [Thread(target=consume) for _ in range(workers)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert len(reports) == workers
    assert sum(report.valid for report in reports) == 1
    assert {
        report.outcome for report in reports if not report.valid
    } == {'Replayed'}
    assert len(sp.sessions) == 1


def test_random_faults_are_never_accepted(federation, sp, now):
    rng = Random(7)
    faults = sorted(ENGINE_FAULTS)

    for trial in range(1000):
        chosen = rng.sample(faults, rng.randint(1, 3))
        faulty = FaultyIdentityProvider(
            federation.idp, federation.source, chosen, seed=trial
        )
        session = faulty.login('jdoe', now, client_ip=CLIENT_IP)
        report = sp.consume(posted(faulty, session, now), CLIENT_IP, now)

        assert not report.valid, chosen
        assert report.failed_step == expected_step(chosen)

    assert len(sp.sessions) == 0


def test_unknown_issuer(plain, sp, session, now):
    body = altered(posted(plain, session, now), IDP.encode(), b'stranger')
    report = sp.consume(body, CLIENT_IP, now)

    assert report.failed_step == 'issuer'
    assert report.outcome == 'UnknownIssuer'


def test_wrong_locality(idp, sp, session, now):
    report = sp.consume(posted(idp, session, now), '10.0.0.1', now)
    assert report.failed_step == 'locality'
    assert report.outcome == 'LocalityMismatch'


def test_locality_check_disabled(federation, idp, session, now):
    sp = ServiceProvider(federation.sp, skew=0, check_locality=False)
    report = sp.consume(posted(idp, session, now), '10.0.0.1', now)
    assert report.valid


def test_wrong_destination(idp, sp, session, now):
    report = sp.consume(
        posted(idp, session, now), CLIENT_IP, now,
        acs_url='http://127.0.0.1:8080/elsewhere',
    )
    assert report.failed_step == 'destination'
    assert report.outcome == 'DestinationMismatch'


def test_not_yet_valid(idp, sp, session, now):
    report = sp.consume(
        posted(idp, session, now), CLIENT_IP, now - seconds(1)
    )
    assert report.failed_step == 'window'
    assert report.outcome == 'NotYetValid'


@mark.parametrize(['body', 'step', 'outcome'], [
    [b'junk', 'decode', 'BadUrlEncoding'],
    [b'RelayState=abc', 'decode', 'MissingField'],
    [b'SAMLResponse=%%%', 'decode', 'BadBase64'],
    [b'SAMLResponse=bm90IHhtbA%3D%3D', 'parse', 'MalformedXml'],
])
def test_hostile_input(sp, now, body, step, outcome):
    report = sp.consume(body, CLIENT_IP, now)
    assert report.failed_step == step
    assert report.outcome == outcome
    assert report.checks[-1].passed is False


def test_missing_assertion(sp, now):
    response = Response(
        id=new_id(),
        issue_instant=now,
        issuer=IDP,
        destination=ACS,
        status=STATUS_SUCCESS,
    )
    body = serialize_post(
        encode_post(emit_message(response), 'response', ACS)
    )
    report = sp.consume(body, CLIENT_IP, now)

    assert report.failed_step == 'parse'
    assert report.outcome == 'MissingAssertion'


def test_unknown_request(idp, sp, session, now):
    body = posted(idp, session, now, in_response_to=new_id())
    report = sp.consume(body, CLIENT_IP, now)

    assert report.failed_step == 'bearer'
    assert report.outcome == 'UnknownRequest'


# Relay state

def test_sp_initiated(idp, sp, session, now):
    target = 'http://127.0.0.1:8080/app/reports?year=2009'
    redirect = sp.build_authn_request(target, now)

    assert len(redirect.relay_state) == 22
    assert target not in redirect.url

    delivery = idp.handle_authn_request(redirect.url, session, now)
    report = sp.consume(serialize_post(delivery.form), CLIENT_IP, now)

    assert report.valid
    assert report.redirect_url == target


def test_sp_initiated_matches_idp_initiated(idp, sp, session, now):
    unsolicited = sp.consume(posted(idp, session, now), CLIENT_IP, now)

    redirect = sp.build_authn_request(LANDING, now)
    delivery = idp.handle_authn_request(redirect.url, session, now)
    solicited = sp.consume(serialize_post(delivery.form), CLIENT_IP, now)

    assert unsolicited.valid and solicited.valid
    assert unsolicited.session.session_id != solicited.session.session_id

    fields = [
        'name_id', 'name_id_format', 'attributes', 'issuer',
        'session_index', 'client_ip',
    ]
    for field in fields:
        assert getattr(unsolicited.session, field) == \
            getattr(solicited.session, field)


def test_forged_relay_state(idp, sp, session, now):
    body = posted(idp, session, now, relay_state='http://evil/phish')
    report = sp.consume(body, CLIENT_IP, now)

    assert report.valid
    assert report.redirect_url == LANDING
    assert len(report.warnings) == 1


def test_relay_state_store(now):
    store = RelayStateStore()
    token = store.issue('/doc', now, 300)

    assert len(token) == 22
    assert store.redeem(token, now) == '/doc'
    assert store.redeem(token, now) is None

    token = store.issue('/doc', now, 300)
    assert store.redeem(token, now + seconds(300)) is None

    store.issue('/doc', now, 300)
    assert store.evict(now + seconds(300)) == 1
    assert len(store) == 0


def test_relay_state_map(now):
    store = RelayStateStore()

    assert resolve_relay_state(store, None, now, LANDING) == (LANDING, None)
    assert resolve_relay_state(
        store, 'reports', now, LANDING, {'reports': '/reports'}
    ) == ('/reports', None)

    landing, warning = resolve_relay_state(store, 'other', now, LANDING)
    assert landing == LANDING
    assert 'other' in warning


# Artifact binding

def test_artifact(idp, sp, desk, session, now):
    delivery = idp.sso(session, SP, now, binding='artifact')
    report = sp.consume_artifact(delivery.url, CLIENT_IP, now)

    assert report.valid
    assert report.steps == ['artifact'] + STEPS[1:]
    assert desk.calls == 1

    replayed = sp.consume_artifact(delivery.url, CLIENT_IP, now)
    assert replayed.failed_step == 'artifact'
    assert replayed.outcome == 'AlreadyConsumed'
    assert desk.calls == 2


def test_artifact_pair(idp, sp, session, now):
    delivery = idp.sso(
        session, SP, now, binding='artifact', artifact_pair=True
    )
    assert sp.consume_artifact(delivery.url, CLIENT_IP, now).valid


def test_artifact_expired(idp, sp, desk, session, now):
    delivery = idp.sso(session, SP, now, binding='artifact')
    desk.now = now + seconds(301)

    report = sp.consume_artifact(
        delivery.url, CLIENT_IP, now + seconds(301)
    )
    assert report.failed_step == 'artifact'
    assert report.outcome == 'ArtifactExpired'


def test_artifact_without_artifact(sp, now):
    report = sp.consume_artifact('RelayState=token', CLIENT_IP, now)
    assert report.failed_step == 'decode'
    assert report.outcome == 'MissingField'


# Single logout

def test_logout_is_idempotent(idp, sp, session, now):
    assert sp.consume(posted(idp, session, now), CLIENT_IP, now).valid
    body = serialize_post(
        idp.initiate_single_logout(session.session_index, now)[0]
    )

    first = sp.handle_logout_request(body, now)
    second = sp.handle_logout_request(body, now)

    assert len(sp.sessions) == 0
    assert first.action_url == second.action_url == \
        'http://127.0.0.1:8080/slo'
    assert decode_post(serialize_post(second)).field == 'SAMLResponse'


def test_unsigned_logout_request(sp, now):
    request = LogoutRequest(
        id=new_id(),
        issue_instant=now,
        issuer=IDP,
        destination='http://127.0.0.1:8080/slo',
        name_id='the.user@mycompany.com',
        name_id_format=NAMEID_EMAIL,
        session_index='index',
    )
    body = serialize_post(encode_post(
        emit_message(request), 'request', 'http://127.0.0.1:8080/slo'
    ))
    with raises(InvalidRequestSignature):
        sp.handle_logout_request(body, now)


# Stores

def test_replay_cache(now):
    cache = ReplayCache()
    expiry = now + seconds(60)

    assert cache.check_and_record('_1', expiry, now)
    assert not cache.check_and_record('_1', expiry, now + seconds(59))
    assert cache.seen('_1', now)

    # Expired entries can be recorded again
    assert cache.check_and_record('_1', expiry, now + seconds(60))

    assert cache.evict(now + seconds(59)) == 0
    assert cache.evict(now + seconds(60)) == 1
    assert '_1' not in cache


def test_report_summary():
    report = ValidationReport()
    report.passed('decode')
    report.fail('window', 'Expired', 'expired 1s ago')

    assert not report.valid
    assert report.summary() == 'Rejected at window: Expired (expired 1s ago)'
    assert report.to_dict()['failed_step'] == 'window'
