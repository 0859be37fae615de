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
In process simulation of the single sign-on flows.

Both parties run in this process with their own registry. The browser is an
actor relaying messages, and the artifact back channel is a loopback, so no
network is used. Given the same registries, start instant and seed a run is
deterministic up to the random identifiers.
"""

from collections import namedtuple

from .trace import Trace
from .browser import Browser, drop_field
from .faults import FaultyIdentityProvider
from .scenario import ScenarioResult, check_result
from ..sp import ServiceProvider, SpError, ValidationReport
from ..idp import IdpError
from ..codec import PARSE_ERRORS
from ..registry import RegistryError, load_registry
from ..bindings import BindingError, LoopbackBackChannel, PostForm
from ..bindings.artifact import FIELD_ARTIFACT_PAIR
from ..loaders import create_source
from ..core.instant import to_instant, utcnow, seconds
from ..logging import get_logger


log = get_logger(__name__)


# Address of a browser other than the one that authenticated
FOREIGN_IP = '203.0.113.7'

EXCHANGE_ERRORS = (
    IdpError, SpError, RegistryError, BindingError,
) + PARSE_ERRORS


Federation = namedtuple('Federation', ['idp', 'sp', 'source'])
Federation.__doc__ = """
Registries of both parties and the attribute source of the identity
provider.
"""


def load_federation(config):
    """
    Load the registries and the attribute source named in a configuration.

    :param dict config: Validated service configuration.

    :rtype: Federation
    """
    idp = load_registry(config['idp']['registry'], config['idp']['passphrase'])
    sp = load_registry(config['sp']['registry'], config['sp']['passphrase'])

    source = config['idp']['source']
    return Federation(
        idp, sp, create_source(source['type'], source['config'])
    )


class Clock:
    """
    Simulated time, moving one second per hop.
    """

    def __init__(self, start):
        self._now = to_instant(start)

    def __call__(self):
        return self._now

    def tick(self, amount=1):
        self._now = self._now + seconds(amount)
        return self._now


class ScenarioRun:
    """
    State of the run of one scenario.
    """

    def __init__(self, simulator, scenario):
        self.scenario = scenario
        self.faults = frozenset(scenario.faults)

        self.trace = Trace()
        self.clock = Clock(simulator.start)
        self.browser = Browser(self.trace, self.clock)
        self.observed_ip = (
            FOREIGN_IP if 'wrong_locality' in self.faults else
            self.browser.ip
        )

        self.idp = FaultyIdentityProvider(
            simulator.federation.idp, simulator.federation.source,
            faults=scenario.faults, seed=simulator.seed,
        )
        self.sp = ServiceProvider(
            simulator.federation.sp,
            back_channel=LoopbackBackChannel(),
            skew=simulator.skew,
            check_locality=simulator.check_locality,
        )
        self.sp_id = simulator.federation.sp.entity_id
        self.idp_id = simulator.federation.idp.entity_id
        self.target = scenario.target or simulator.target

        partner = simulator.federation.sp.partner(self.idp_id)
        for endpoint in partner.entity.role.artifact_resolution_endpoints:
            self.sp.back_channel.register(
                endpoint.location, self.resolve_artifact
            )

        self.session = self.idp.login(
            scenario.user or simulator.user, self.clock(),
            client_ip=self.browser.ip,
        )

    def resolve_artifact(self, envelope):
        self.trace.record(
            self.clock(), 'sp', 'sp->idp', 'ArtifactResolve', envelope,
            'artifact resolution request',
        )
        answer = self.idp.serve_artifact_resolve(envelope, self.clock())
        self.trace.record(
            self.clock(), 'idp', 'idp->sp', 'ArtifactResponse', answer,
            'artifact resolution answer',
        )
        return answer

    def record_report(self, report):
        self.trace.record(
            self.clock(), 'sp', 'sp', 'ValidationReport', None,
            report.summary(),
        )
        return report

    # Delivery to the service provider

    def post(self, form):
        body = self.browser.submit(form, 'idp->sp')
        self.clock.tick()
        report = self.sp.consume(
            body, self.observed_ip, self.clock(), acs_url=form.action_url
        )
        self.record_report(report)

        if report.valid and 'replay_assertion' in self.faults:
            self.clock.tick()
            report = self.record_report(self.sp.consume(
                body, self.observed_ip, self.clock(),
                acs_url=form.action_url,
            ))
        return report

    def redirect_artifacts(self, url):
        if 'single_token_of_pair' in self.faults:
            url = drop_field(url, FIELD_ARTIFACT_PAIR)

        url = self.browser.follow(url, 'idp->sp')
        self.clock.tick()
        report = self.record_report(
            self.sp.consume_artifact(url, self.observed_ip, self.clock())
        )

        if report.valid and 'replay_artifact' in self.faults:
            url = self.browser.follow(url, 'idp->sp')
            self.clock.tick()
            report = self.record_report(self.sp.consume_artifact(
                url, self.observed_ip, self.clock()
            ))
        return report

    def deliver(self, delivery):
        if delivery.binding == 'post':
            return self.post(delivery.form)
        return self.redirect_artifacts(delivery.url)

    # Flows

    def idp_initiated(self):
        return self.deliver(self.idp.sso(
            self.session, self.sp_id, self.clock(), binding='post'
        ))

    def sp_initiated(self):
        request = self.sp.build_authn_request(self.target, self.clock())
        if isinstance(request, PostForm):
            data = self.browser.submit(request, 'sp->idp')
        else:
            data = self.browser.follow(request.url, 'sp->idp')

        self.clock.tick()
        report = self.deliver(self.idp.handle_authn_request(
            data, self.session, self.clock()
        ))

        if report.valid and report.redirect_url != self.target:
            report.fail(
                'relay_state', 'RelayStateLost',
                'landed on {}, asked for {}'.format(
                    report.redirect_url, self.target
                )
            )
        return report

    def artifact(self):
        return self.deliver(self.idp.sso(
            self.session, self.sp_id, self.clock(),
            binding='artifact', artifact_pair=False,
        ))

    def artifact_pair(self):
        return self.deliver(self.idp.sso(
            self.session, self.sp_id, self.clock(),
            binding='artifact', artifact_pair=True,
        ))

    def single_logout(self):
        report = self.idp_initiated()
        if not report.valid:
            return report

        index = self.session.session_index
        forms = self.idp.initiate_single_logout(index, self.clock())
        if not forms:
            return report.fail(
                'logout', 'NoParticipant', 'no logout request was sent'
            )

        bodies = []
        for form in forms:
            body = self.browser.submit(form, 'idp->sp')
            bodies.append(body)
            self.clock.tick()
            answer = self.sp.handle_logout_request(body, self.clock())
            answer = self.browser.submit(answer, 'sp->idp')
            self.clock.tick()
            self.idp.handle_logout_response(answer, self.clock())

        survivors = [
            session.session_id for session in self.sp.sessions
            if session.issuer == self.idp_id and
            session.session_index == index
        ]
        if survivors:
            return report.fail(
                'logout', 'SessionSurvived',
                'service provider sessions {} still open'.format(survivors)
            )
        if index in self.idp.sessions:
            return report.fail(
                'logout', 'SessionSurvived',
                'identity provider session {} still open'.format(index)
            )

        # A replayed request is answered again without effect
        self.clock.tick()
        self.sp.handle_logout_request(bodies[0], self.clock())

        report.passed('logout', '{} participants'.format(len(forms)))
        return report

    def run(self):
        """
        :rtype: ValidationReport
        """
        try:
            return getattr(self, self.scenario.flow)()
        except EXCHANGE_ERRORS as e:
            log.warning('Exchange aborted: {}'.format(e))
            return self.record_report(
                ValidationReport().fail('exchange', e.code, str(e))
            )


class Simulator:
    """
    Runs scenarios against a federation.

    :param Federation federation: Registries and attribute source.
    :param datetime start: Simulated instant every run starts at. The
     current instant when not given.
    :param int seed: Seed of the fault injection choices.
    :param int skew: Clock skew of the service provider, overriding its
     partner policy.
    :param bool check_locality: Locality toggle of the service provider,
     overriding its partner policy.
    :param str user: User of the runs that do not name one.
    :param str target: Resource asked for in service provider initiated
     runs that do not name one.
    """

    def __init__(
            self, federation, start=None, seed=None, skew=None,
            check_locality=None, user='jdoe', target=None):
        self.federation = federation
        self.start = to_instant(start or utcnow())
        self.seed = seed
        self.skew = skew
        self.check_locality = check_locality
        self.user = user
        self.target = target or (
            federation.sp.settings.default_landing or '/'
        ).rstrip('/') + '/reports'

    def run(self, scenario):
        """
        Run one scenario.

        :rtype: ScenarioResult
        """
        log.info('Running scenario {!r} ({} {})'.format(
            scenario.name, scenario.flow, list(scenario.faults)
        ))
        run = ScenarioRun(self, scenario)
        report = run.run()
        mismatches = check_result(scenario, report)

        for mismatch in mismatches:
            log.error('Scenario {!r}: {}'.format(scenario.name, mismatch))
        if not mismatches:
            log.info('Scenario {!r} passed: {}'.format(
                scenario.name, report.summary()
            ))

        return ScenarioResult(
            scenario=scenario,
            passed=not mismatches,
            outcome=report.outcome,
            failed_step=report.failed_step,
            report=report,
            events=run.trace.events,
        )

    def simulate(self, scenarios):
        """
        Run scenarios in order.

        :rtype: list
        """
        return [self.run(scenario) for scenario in scenarios]


__all__ = [
    'FOREIGN_IP',
    'Federation',
    'load_federation',
    'Clock',
    'ScenarioRun',
    'Simulator',
]
