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
Shared fixtures: a demo federation generated once per session, and fresh
engines over it for each test.
"""

from pathlib import Path

from pytest import fixture

from samlforge.inputs import load_config
from samlforge.idp import IdentityProvider
from samlforge.sp import ServiceProvider
from samlforge.bindings import LoopbackBackChannel
from samlforge.harness.bootstrap import bootstrap
from samlforge.harness.simulator import load_federation
from samlforge.core.instant import parse_instant


# Small keys keep the suite fast, OAEP still fits the wrapped key
TEST_KEY_SIZE = 1024

CLIENT_IP = '192.168.0.189'


class ResolutionDesk:
    """
    Artifact resolution endpoint of the ``idp`` fixture, answering at the
    instant set in ``now``.
    """

    def __init__(self, idp, now):
        self.idp = idp
        self.now = now
        self.calls = 0

    def __call__(self, envelope):
        self.calls += 1
        return self.idp.serve_artifact_resolve(envelope, self.now)


@fixture(scope='session')
def corpus():
    return Path(__file__).resolve().parent / 'corpus'


@fixture(scope='session')
def demo(tmp_path_factory):
    return bootstrap(
        tmp_path_factory.mktemp('demo'),
        base_url='http://127.0.0.1:8080',
        passphrase='secret',
        key_size=TEST_KEY_SIZE,
    )


@fixture(scope='session')
def config(demo):
    return load_config(demo.config)


@fixture
def federation(config):
    return load_federation(config)


@fixture
def now():
    return parse_instant('2009-04-22T12:28:36Z')


@fixture
def idp(federation):
    return IdentityProvider(federation.idp, federation.source)


@fixture
def desk(idp, now):
    return ResolutionDesk(idp, now)


@fixture
def sp(federation, desk):
    back_channel = LoopbackBackChannel()
    partner = federation.sp.partner(federation.idp.entity_id)
    for endpoint in partner.entity.role.artifact_resolution_endpoints:
        back_channel.register(endpoint.location, desk)

    return ServiceProvider(
        federation.sp, back_channel=back_channel, skew=0,
        check_locality=True,
    )
