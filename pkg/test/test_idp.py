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
Test suite for the identity provider engine and its stores.
"""

from threading import Thread, Barrier

from pytest import fixture, mark, raises

from samlforge.logging import setup_logging
from samlforge.core.types import AuthnRequest, new_id
from samlforge.core.instant import seconds, format_instant
from samlforge.codec import emit_message
from samlforge.bindings import (
    FaultResponse, encode_redirect, decode_post, serialize_post,
    decode_artifact_form, unwrap_envelope, wrap_envelope,
)
from samlforge.idp import (
    UnknownUser, PolicyViolation, UnknownIssuer, SignatureRequired,
    ReplayedRequestId, UnknownArtifact, AlreadyConsumed, ArtifactExpired,
    WrongRequester, IncompletePair, MismatchedPair, UnknownSession,
    StaleRequest,
    ArtifactStore, SessionStore,
)

from conftest import CLIENT_IP


SP = 'mypartner:saml2.0'
MESSAGE = b'<samlp:Response/>'


def setup_module(module):
    setup_logging(verbosity=2)


@fixture
def plain_idp(federation, idp):
    """
    Identity provider whose assertions for the service provider are not
    encrypted, so they can be inspected.
    """
    partner = federation.idp.partner(SP)
    federation.idp.register_partner(
        partner.metadata, {'encrypt_assertion': False}
    )
    return idp


# Sessions

def test_session_store(now):
    store = SessionStore()
    session = store.create(
        'jdoe', 'the.user@mycompany.com', None, now, client_ip=CLIENT_IP
    )

    assert len(session.session_index) == 24
    assert store.get(session.session_index) == session
    assert session.participants == frozenset()

    store.add_participant(session.session_index, SP)
    assert store.get(session.session_index).participants == {SP}

    with raises(ValueError):
        store.create(
            'asmith', 'asmith@mycompany.com', None, now,
            session_index=session.session_index,
        )

    store.terminate(session.session_index)
    assert session.session_index not in store
    assert store.was_terminated(session.session_index)
    with raises(UnknownSession):
        store.get(session.session_index)


def test_login_unknown_user(idp, now):
    with raises(UnknownUser):
        idp.login('nobody', now)


# Issuance

def test_issued_validity(plain_idp, now):
    session = plain_idp.login('jdoe', now, client_ip=CLIENT_IP)
    response = plain_idp.issue_assertion(session, SP, now)
    assertion = response.assertion
    conditions = assertion.conditions
    confirmation = assertion.subject.confirmation

    assert format_instant(conditions.not_before) == '2009-04-22T12:28:36Z'
    assert format_instant(conditions.not_on_or_after) == \
        '2009-04-22T12:33:36Z'
    assert format_instant(confirmation.not_on_or_after) == \
        '2009-04-22T12:43:36Z'

    assert conditions.audiences == (SP,)
    assert confirmation.recipient == 'http://127.0.0.1:8080/acs'
    assert response.destination == 'http://127.0.0.1:8080/acs'
    assert assertion.subject.name_id == 'the.user@mycompany.com'
    assert assertion.authn_statement.locality_address == CLIENT_IP
    assert assertion.authn_statement.session_index == session.session_index
    assert assertion.signature is not None

    assert {attribute.name for attribute in assertion.attributes} == \
        {'clientId', 'uid'}
    assert plain_idp.sessions.get(session.session_index).participants == \
        {SP}


def test_withheld_attributes(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'encrypt_assertion': False, 'withhold': ['uid']},
    )
    session = idp.login('jdoe', now)
    assertion = idp.issue_assertion(session, SP, now).assertion
    assert [attribute.name for attribute in assertion.attributes] == \
        ['clientId']


def test_issued_encrypted(idp, now):
    session = idp.login('jdoe', now)
    response = idp.issue_assertion(session, SP, now)
    assert response.is_encrypted


def test_issue_to_unknown_partner(idp, now):
    session = idp.login('jdoe', now)
    with raises(LookupError):
        idp.issue_assertion(session, 'stranger:saml2.0', now)


def test_sso_post(idp, now):
    session = idp.login('jdoe', now)
    delivery = idp.sso(session, SP, now, relay_state='token')

    assert delivery.binding == 'post'
    assert delivery.url is None
    assert delivery.form.action_url == 'http://127.0.0.1:8080/acs'
    assert delivery.form.relay_state == 'token'

    decoded = decode_post(serialize_post(delivery.form))
    assert decoded.message == emit_message(delivery.response)


@mark.parametrize(['artifact_pair', 'count'], [
    [False, 1],
    [True, 2],
])
def test_sso_artifact(idp, now, artifact_pair, count):
    session = idp.login('jdoe', now)
    delivery = idp.sso(
        session, SP, now, binding='artifact', artifact_pair=artifact_pair
    )

    assert delivery.binding == 'artifact'
    assert delivery.form is None
    assert delivery.url.startswith('http://127.0.0.1:8080/acs/artifact?')

    artifacts, relay_state = decode_artifact_form(delivery.url)
    assert len(artifacts) == count
    assert relay_state is None
    assert len(idp.artifacts) == count
    assert all(artifact.endpoint_index == 0 for artifact in artifacts)


# Authentication requests

def unsigned_request(now, issuer=SP, acs_url='http://127.0.0.1:8080/acs'):
    request = AuthnRequest(
        id=new_id(),
        issue_instant=now,
        issuer=issuer,
        acs_url=acs_url,
        destination='http://127.0.0.1:8080/sso',
    )
    return encode_redirect(
        emit_message(request), 'http://127.0.0.1:8080/sso', 'token'
    ).url


def test_handle_authn_request(idp, sp, now):
    redirect = sp.build_authn_request('http://127.0.0.1:8080/app/doc', now)
    session = idp.login('jdoe', now, client_ip=CLIENT_IP)

    delivery = idp.handle_authn_request(redirect.url, session, now)
    assert delivery.binding == 'post'
    assert delivery.form.relay_state == redirect.relay_state
    assert delivery.response.in_response_to is not None

    with raises(ReplayedRequestId):
        idp.handle_authn_request(redirect.url, session, now + seconds(1))


def test_authn_request_outside_replay_window(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'require_signed_requests': False},
    )
    ttl = federation.idp.settings.request_ttl
    session = idp.login('jdoe', now)
    url = unsigned_request(now)

    idp.handle_authn_request(url, session, now)

    # Last accepted instant, the ID is still remembered
    with raises(ReplayedRequestId):
        idp.handle_authn_request(url, session, now + seconds(ttl))

    # Forgetting the ID must not make the request acceptable again
    idp.requests.evict(now + seconds(ttl + 1))
    with raises(StaleRequest):
        idp.handle_authn_request(url, session, now + seconds(ttl + 1))


def test_authn_request_from_the_future(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'require_signed_requests': False, 'clock_skew': 30},
    )
    session = idp.login('jdoe', now)

    with raises(StaleRequest):
        idp.handle_authn_request(
            unsigned_request(now + seconds(31)), session, now
        )

    delivery = idp.handle_authn_request(
        unsigned_request(now + seconds(30)), session, now
    )
    assert delivery.form.relay_state == 'token'


def test_handle_authn_request_post(idp, sp, now):
    form = sp.build_authn_request(
        'http://127.0.0.1:8080/app', now, binding='post'
    )
    session = idp.login('jdoe', now)

    delivery = idp.handle_authn_request(serialize_post(form), session, now)
    assert delivery.form.relay_state == form.relay_state


def test_unsigned_authn_request(idp, now):
    session = idp.login('jdoe', now)
    with raises(SignatureRequired):
        idp.handle_authn_request(unsigned_request(now), session, now)


def test_unknown_requester(idp, now):
    session = idp.login('jdoe', now)
    with raises(UnknownIssuer):
        idp.handle_authn_request(
            unsigned_request(now, 'stranger:saml2.0'), session, now
        )


def test_unregistered_consumer_url(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'require_signed_requests': False},
    )
    session = idp.login('jdoe', now)

    delivery = idp.handle_authn_request(unsigned_request(now), session, now)
    assert delivery.form.relay_state == 'token'

    with raises(PolicyViolation):
        idp.handle_authn_request(
            unsigned_request(now, acs_url='https://elsewhere/acs'),
            session, now,
        )


# Artifact store

def test_artifact_single_use(now):
    store = ArtifactStore()
    store.put(b'a' * 20, MESSAGE, SP, now)

    assert store.resolve(b'a' * 20, now, requester=SP) == MESSAGE
    with raises(AlreadyConsumed):
        store.resolve(b'a' * 20, now, requester=SP)


@mark.parametrize(['elapsed', 'error'], [
    [0, None],
    [300, None],
    [301, ArtifactExpired],
])
def test_artifact_retention(now, elapsed, error):
    store = ArtifactStore(ttl=300)
    store.put(b'a' * 20, MESSAGE, SP, now)
    later = now + seconds(elapsed)

    if error is None:
        assert store.resolve(b'a' * 20, later) == MESSAGE
        return

    with raises(error):
        store.resolve(b'a' * 20, later)


def test_artifact_lookup_errors(now):
    store = ArtifactStore()
    store.put(b'a' * 20, MESSAGE, SP, now)

    with raises(UnknownArtifact):
        store.resolve(b'b' * 20, now)
    with raises(WrongRequester):
        store.resolve(b'a' * 20, now, requester='stranger:saml2.0')

    # A wrong requester does not burn the artifact
    assert store.resolve(b'a' * 20, now, requester=SP) == MESSAGE


@mark.parametrize(['swapped'], [[False], [True]])
def test_artifact_pair(now, swapped):
    store = ArtifactStore()
    first, second = b'1' * 20, b'2' * 20
    store.put_pair(first, second, MESSAGE, SP, now)

    with raises(IncompletePair):
        store.resolve(first, now)
    with raises(IncompletePair):
        store.resolve(second, now)
    with raises(MismatchedPair):
        store.resolve_pair(first, first, now)

    if swapped:
        first, second = second, first

    assert store.resolve_pair(first, second, now, requester=SP) == MESSAGE
    with raises(AlreadyConsumed):
        store.resolve_pair(first, second, now, requester=SP)
    with raises(AlreadyConsumed):
        store.resolve_pair(second, first, now, requester=SP)


def test_artifact_pair_from_different_pairs(now):
    store = ArtifactStore()
    store.put_pair(b'1' * 20, b'2' * 20, MESSAGE, SP, now)
    store.put_pair(b'3' * 20, b'4' * 20, MESSAGE, SP, now)

    with raises(MismatchedPair):
        store.resolve_pair(b'1' * 20, b'4' * 20, now)
    with raises(MismatchedPair):
        store.resolve_pair(b'2' * 20, b'4' * 20, now)
    with raises(MismatchedPair):
        store.resolve_pair(b'1' * 20, b'3' * 20, now)


def test_artifact_expire(now):
    store = ArtifactStore(ttl=300)
    store.put(b'a' * 20, MESSAGE, SP, now)
    store.put(b'b' * 20, MESSAGE, SP, now + seconds(100))

    assert store.expire(now + seconds(300)) == 0
    assert store.expire(now + seconds(301)) == 1
    assert b'a' * 20 not in store
    assert b'b' * 20 in store


def test_artifact_concurrent_resolution(now):
    store = ArtifactStore()
    store.put(b'a' * 20, MESSAGE, SP, now)

    workers = 100
    barrier = Barrier(workers)
    outcomes = []

    def resolve():
        barrier.wait()
        try:
            outcomes.append(store.resolve(b'a' * 20, now))
        except AlreadyConsumed:
            outcomes.append(None)

    threads = [Thread(target=resolve) for _ in range(workers)]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()

    assert len(outcomes) == workers
    assert outcomes.count(MESSAGE) == 1


def test_serve_malformed_resolve(idp, now):
    with raises(FaultResponse) as info:
        unwrap_envelope(idp.serve_artifact_resolve(b'garbage', now))
    assert info.value.fault_code == 'MalformedEnvelope'


def test_serve_unsigned_resolve(idp, now):
    envelope = wrap_envelope(
        b'<samlp:ArtifactResolve '
        b'xmlns:samlp="urn:oasis:names:tc:SAML:2.0:protocol" '
        b'xmlns:saml="urn:oasis:names:tc:SAML:2.0:assertion" '
        b'ID="_1" Version="2.0" IssueInstant="2009-04-22T12:28:36Z">'
        b'<saml:Issuer>mypartner:saml2.0</saml:Issuer>'
        b'<samlp:Artifact>AAQAAA==</samlp:Artifact>'
        b'</samlp:ArtifactResolve>'
    )
    with raises(FaultResponse) as info:
        unwrap_envelope(idp.serve_artifact_resolve(envelope, now))
    assert info.value.fault_code == 'SignatureRequired'


# Single logout

def test_single_logout(idp, sp, now):
    session = idp.login('jdoe', now, client_ip=CLIENT_IP)
    delivery = idp.sso(session, SP, now)
    report = sp.consume(serialize_post(delivery.form), CLIENT_IP, now)
    assert report.valid

    forms = idp.initiate_single_logout(session.session_index, now)
    assert len(forms) == 1
    assert forms[0].action_url == 'http://127.0.0.1:8080/slo'
    assert idp.sessions.is_logging_out(session.session_index)

    # Already in progress
    assert idp.initiate_single_logout(session.session_index, now) == []

    answer = sp.handle_logout_request(serialize_post(forms[0]), now)
    assert len(sp.sessions) == 0

    assert idp.handle_logout_response(serialize_post(answer), now) == \
        session.session_index
    assert session.session_index not in idp.sessions

    # Terminated sessions log out quietly
    assert idp.initiate_single_logout(session.session_index, now) == []


def test_single_logout_without_participants(idp, now):
    session = idp.login('jdoe', now)
    assert idp.initiate_single_logout(session.session_index, now) == []
    assert session.session_index not in idp.sessions


def test_single_logout_unknown_session(idp, now):
    with raises(UnknownSession):
        idp.initiate_single_logout('nope', now)


def test_single_logout_timeout(idp, now):
    session = idp.login('jdoe', now)
    idp.sso(session, SP, now)
    idp.initiate_single_logout(session.session_index, now)

    assert idp.expire_logouts(now + seconds(59)) == []
    assert session.session_index in idp.sessions

    assert idp.expire_logouts(now + seconds(60)) == [session.session_index]
    assert session.session_index not in idp.sessions
    assert not idp.sessions.is_logging_out(session.session_index)


def test_expire(federation, idp, now):
    federation.idp.register_partner(
        federation.idp.partner(SP).metadata,
        {'require_signed_requests': False},
    )
    session = idp.login('jdoe', now)
    idp.handle_authn_request(unsigned_request(now), session, now)
    idp.sso(session, SP, now, binding='artifact', artifact_pair=False)
    idp.initiate_single_logout(session.session_index, now)

    assert idp.expire(now) == 0
    assert len(idp.artifacts) == 1
    assert len(idp.requests) == 1

    assert idp.expire(now + seconds(3600)) == 3
    assert len(idp.artifacts) == 0
    assert len(idp.requests) == 0
    assert session.session_index not in idp.sessions
