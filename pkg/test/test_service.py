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
Test suite for the HTTP service, called through its WSGI application.
"""

from io import BytesIO
from datetime import timedelta
from wsgiref.util import setup_testing_defaults

from pytest import fixture

from samlforge.logging import setup_logging
from samlforge.core.instant import utcnow
from samlforge.codec import parse_metadata
from samlforge.bindings import serialize_post
from samlforge.harness.service import (
    FederationService, METADATA_TYPE, SESSION_COOKIE,
)

from conftest import CLIENT_IP


SP = 'mypartner:saml2.0'
BASE_URL = 'http://127.0.0.1:8080'


def setup_module(module):
    setup_logging(verbosity=2)


def call(app, method, path, query='', body=b'', remote=CLIENT_IP):
    """
    Call a WSGI application.

    :return: A tuple with the status line, the headers and the body.
    """
    environ = {
        'REQUEST_METHOD': method,
        'PATH_INFO': path,
        'QUERY_STRING': query,
        'REMOTE_ADDR': remote,
        'CONTENT_TYPE': 'application/x-www-form-urlencoded',
        'CONTENT_LENGTH': str(len(body)),
        'wsgi.input': BytesIO(body),
    }
    setup_testing_defaults(environ)

    captured = {}

    def start_response(status, headers, exc_info=None):
        captured['status'] = status
        captured['headers'] = headers

    chunks = app(environ, start_response)
    payload = b''.join(chunks)
    if hasattr(chunks, 'close'):
        chunks.close()

    headers = {}
    for name, value in captured['headers']:
        headers.setdefault(name.lower(), []).append(value)
    return captured['status'], headers, payload


@fixture
def service(config, federation):
    return FederationService(config, federation)


def test_metadata(service):
    status, headers, body = call(service.app, 'GET', '/metadata/idp')

    assert status.startswith('200')
    assert headers['content-type'] == [METADATA_TYPE]
    assert parse_metadata(body).entity_id == 'mycompany:saml2.0'

    status, _, body = call(service.app, 'GET', '/metadata/sp')
    assert parse_metadata(body).entity_id == SP


def test_acs_post(service):
    session = service.idp.login('jdoe', utcnow(), client_ip=CLIENT_IP)
    form = service.idp.sso(session, SP, utcnow()).form

    status, headers, _ = call(
        service.app, 'POST', '/acs', body=serialize_post(form)
    )
    assert status.startswith('303')
    assert headers['location'] == [BASE_URL + '/app']
    assert any(
        cookie.startswith(SESSION_COOKIE + '=')
        for cookie in headers['set-cookie']
    )
    assert len(service.sp.sessions) == 1


def test_acs_post_expired(service):
    earlier = utcnow() - timedelta(hours=2)
    session = service.idp.login('jdoe', earlier, client_ip=CLIENT_IP)
    form = service.idp.sso(session, SP, earlier).form

    status, _, body = call(
        service.app, 'POST', '/acs', body=serialize_post(form)
    )
    assert status.startswith('400')
    assert b'window' in body
    assert len(service.sp.sessions) == 0


def test_acs_post_from_elsewhere(service):
    session = service.idp.login('jdoe', utcnow(), client_ip=CLIENT_IP)
    form = service.idp.sso(session, SP, utcnow()).form

    status, _, body = call(
        service.app, 'POST', '/acs', body=serialize_post(form),
        remote='203.0.113.7',
    )
    assert status.startswith('400')
    assert b'locality' in body


def test_idp_initiated_form(service):
    status, headers, body = call(service.app, 'GET', '/sso')

    assert status.startswith('200')
    assert b'SAMLResponse' in body
    assert BASE_URL.encode('ascii') + b'/acs' in body


def test_start(service):
    status, headers, _ = call(
        service.app, 'GET', '/start', query='target=%2Fapp%2Fdoc'
    )
    assert status.startswith('302')
    assert headers['location'][0].startswith(BASE_URL + '/sso?SAMLRequest=')


def test_artifact_resolve_fault(service):
    status, headers, body = call(
        service.app, 'POST', '/artifact-resolve', body=b'garbage'
    )
    assert status.startswith('200')
    assert headers['content-type'][0].startswith('text/xml')
    assert b'MalformedEnvelope' in body


def test_slo_without_message(service):
    status, _, _ = call(service.app, 'POST', '/slo', body=b'RelayState=x')
    assert status.startswith('400')


def test_slo_without_session(service):
    status, _, body = call(service.app, 'GET', '/slo')
    assert status.startswith('200')
    assert b'Signed out' in body


def test_landing(service):
    status, _, body = call(service.app, 'GET', '/app/reports')
    assert status.startswith('200')
    assert b'Application' in body


def test_unknown_route(service):
    status, _, _ = call(service.app, 'GET', '/nowhere')
    assert status.startswith('404')


def test_sweep(service):
    earlier = utcnow() - timedelta(hours=2)
    session = service.idp.login('jdoe', earlier, client_ip=CLIENT_IP)
    service.idp.sso(
        session, SP, earlier, binding='artifact', artifact_pair=False
    )
    service.sp.build_authn_request(BASE_URL + '/app', earlier)
    assert len(service.idp.artifacts) == 1
    assert len(service.sp.relay_states) == 1

    # Not due yet
    call(service.app, 'GET', '/metadata/idp')
    assert len(service.idp.artifacts) == 1

    service._swept_at -= service.sweep_interval
    status, _, _ = call(service.app, 'GET', '/metadata/idp')

    assert status.startswith('200')
    assert len(service.idp.artifacts) == 0
    assert len(service.sp.relay_states) == 0
