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
Scenario files of the simulator.

A scenario file is a TOML document with one ``[[scenario]]`` table per
scenario:

.. code-block:: toml

    [[scenario]]
    name = "replayed post"
    flow = "sp_initiated"
    faults = ["replay_assertion"]
    expect = "failure"
    expect_step = "replay"

``expect_step`` defaults to the step the faults are caught at, and
``expect_outcome`` is only compared when given.
"""

from collections import namedtuple

from ..inputs import load_document
from ..schema import SCENARIOS_SCHEMA
from ..logging import get_logger


log = get_logger(__name__)


FAULT_STEPS = {
    'tamper_signature': 'signature',
    'strip_signature': 'signature',
    'expire_window': 'window',
    'not_yet_valid': 'window',
    'wrong_audience': 'audience',
    'wrong_recipient': 'bearer',
    'wrong_destination': 'destination',
    'replay_assertion': 'replay',
    'wrong_locality': 'locality',
    'replay_artifact': 'artifact',
    'single_token_of_pair': 'artifact',
}

FAULT_OUTCOMES = {
    'tamper_signature': 'DigestMismatch',
    'strip_signature': 'SignatureMissing',
    'expire_window': 'Expired',
    'not_yet_valid': 'NotYetValid',
    'wrong_audience': 'AudienceMismatch',
    'wrong_recipient': 'RecipientMismatch',
    'wrong_destination': 'DestinationMismatch',
    'replay_assertion': 'Replayed',
    'wrong_locality': 'LocalityMismatch',
    'replay_artifact': 'AlreadyConsumed',
    'single_token_of_pair': 'IncompletePair',
}

# Faults only visible when a message is presented a second time
REPLAY_FAULTS = frozenset(('replay_assertion', 'replay_artifact'))

FAULT_FLOWS = {
    'replay_assertion': {'idp_initiated', 'sp_initiated', 'single_logout'},
    'replay_artifact': {'artifact', 'artifact_pair'},
    'single_token_of_pair': {'artifact_pair'},
}

PIPELINE = [
    'decode', 'issuer', 'artifact', 'parse', 'signature', 'status',
    'destination', 'window', 'audience', 'bearer', 'replay', 'locality',
    'relay_state', 'logout',
]


class InconsistentScenario(ValueError):
    """
    The expectations of a scenario contradict its faults.
    """

    code = 'InconsistentScenario'

    def __init__(self, name, reason):
        super().__init__('Scenario {!r}: {}'.format(name, reason))
        self.name = name
        self.reason = reason


def expected_step(faults):
    """
    Step at which a list of faults is caught.

    Faults spoiling the first presentation of a message are caught before
    the replay faults.

    :rtype: str
    """
    faults = set(faults)
    first = faults - REPLAY_FAULTS
    candidates = first or faults
    if not candidates:
        return None
    return min(
        (FAULT_STEPS[fault] for fault in candidates), key=PIPELINE.index
    )


def expected_outcome(faults):
    """
    Outcome code of a single fault, ``None`` for several faults.
    """
    faults = set(faults)
    if len(faults) != 1:
        return None
    return FAULT_OUTCOMES[faults.pop()]


class Scenario(namedtuple('Scenario', [
        'name', 'flow', 'faults', 'expect', 'expect_step', 'expect_outcome',
        'user', 'target'])):
    """
    One simulated exchange.

    :raise InconsistentScenario: if a fault does not apply to the flow, or
     if the expectation disagrees with the faults.
    """

    __slots__ = ()

    def __new__(
            cls, name, flow, faults=(), expect=None, expect_step=None,
            expect_outcome=None, user=None, target=None):
        faults = tuple(faults)

        for fault in faults:
            flows = FAULT_FLOWS.get(fault)
            if flows is not None and flow not in flows:
                raise InconsistentScenario(
                    name, 'fault {} does not apply to flow {}'.format(
                        fault, flow
                    )
                )

        if expect is None:
            expect = 'failure' if faults else 'success'

        if not faults and expect != 'success':
            raise InconsistentScenario(
                name, 'no faults injected, success must be expected'
            )
        if faults and expect != 'failure':
            raise InconsistentScenario(
                name, 'faults {} cannot succeed'.format(', '.join(faults))
            )

        if faults and expect_step is None:
            expect_step = expected_step(faults)
        if faults and expect_step != expected_step(faults):
            raise InconsistentScenario(
                name, 'faults {} are caught at step {}, not {}'.format(
                    ', '.join(faults), expected_step(faults), expect_step
                )
            )

        return super().__new__(
            cls, name, flow, faults, expect, expect_step, expect_outcome,
            user, target,
        )

    @property
    def expects_success(self):
        return self.expect == 'success'


ScenarioResult = namedtuple('ScenarioResult', [
    'scenario', 'passed', 'outcome', 'failed_step', 'report', 'events',
])
ScenarioResult.__doc__ = """
Result of one simulated scenario.

:var Scenario scenario: The scenario.
:var bool passed: Whether the actual result matches the expected one.
:var str outcome: Actual outcome code, ``Valid`` on success.
:var str failed_step: Actual failed step, ``None`` on success.
:var ValidationReport report: The report deciding the result.
:var list events: :class:`TraceEvent` of the run.
"""


def check_result(scenario, report):
    """
    Compare the report of a run with the expectations of its scenario.

    :return: A list of mismatch descriptions, empty when the run is as
     expected.
    :rtype: list
    """
    mismatches = []
    if scenario.expects_success:
        if not report.valid:
            mismatches.append('expected success, failed at {} ({})'.format(
                report.failed_step, report.outcome
            ))
        return mismatches

    if report.valid:
        mismatches.append('expected failure at {}, succeeded'.format(
            scenario.expect_step
        ))
        return mismatches

    if report.failed_step != scenario.expect_step:
        mismatches.append('expected failure at {}, failed at {}'.format(
            scenario.expect_step, report.failed_step
        ))
    if scenario.expect_outcome is not None and \
            report.outcome != scenario.expect_outcome:
        mismatches.append('expected outcome {}, got {}'.format(
            scenario.expect_outcome, report.outcome
        ))
    return mismatches


def load_scenarios(path):
    """
    Load and check a scenario file.

    :param Path path: The scenario file.

    :raise InvalidDocument: if the file does not validate.
    :raise InconsistentScenario: if a scenario contradicts itself.

    :rtype: list
    """
    document = load_document(path, SCENARIOS_SCHEMA)
    scenarios = []
    for stanza in document['scenario']:
        scenarios.append(Scenario(
            name=stanza['name'],
            flow=stanza['flow'],
            faults=stanza['faults'],
            expect=stanza['expect'],
            expect_step=stanza['expect_step'],
            expect_outcome=stanza['expect_outcome'],
            user=stanza['user'],
            target=stanza['target'],
        ))

    names = [scenario.name for scenario in scenarios]
    duplicated = sorted({name for name in names if names.count(name) > 1})
    if duplicated:
        raise InconsistentScenario(
            duplicated[0], 'name used by more than one scenario'
        )

    log.info('Loaded {} scenarios from {}'.format(len(scenarios), path))
    return scenarios


__all__ = [
    'FAULT_STEPS',
    'FAULT_OUTCOMES',
    'FAULT_FLOWS',
    'PIPELINE',
    'InconsistentScenario',
    'expected_step',
    'expected_outcome',
    'Scenario',
    'ScenarioResult',
    'check_result',
    'load_scenarios',
]
