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
Ordered log of the messages exchanged during a simulation.
"""

from hashlib import sha256
from threading import Lock
from collections import namedtuple

from ujson import dumps

from ..core.instant import format_instant
from ..logging import get_logger


log = get_logger(__name__)


ACTORS = ('browser', 'idp', 'sp')


TraceEvent = namedtuple('TraceEvent', [
    'sequence', 'timestamp', 'actor', 'direction', 'kind', 'digest',
    'summary',
])
TraceEvent.__doc__ = """
One message seen by an actor.

:var int sequence: Position of the event in its trace.
:var datetime timestamp: Simulated instant of the event.
:var str actor: ``browser``, ``idp`` or ``sp``.
:var str direction: Hop of the message, as in ``idp->sp``.
:var str kind: Message kind, as in ``SAMLResponse``.
:var str digest: SHA-256 of the payload, in hex.
:var str summary: Human readable description.
"""


def digest_of(payload):
    if payload is None:
        return None
    if isinstance(payload, str):
        payload = payload.encode('utf-8')
    return sha256(payload).hexdigest()


class Trace:
    """
    Strictly ordered events of one run.
    """

    def __init__(self):
        self._events = []
        self._lock = Lock()

    def __len__(self):
        return len(self._events)

    def __iter__(self):
        return iter(list(self._events))

    def record(self, timestamp, actor, direction, kind, payload, summary):
        """
        Append an event.

        :param bytes payload: Message bytes, only their digest is kept.

        :rtype: TraceEvent
        """
        if actor not in ACTORS:
            raise ValueError('Unknown actor {!r}'.format(actor))

        with self._lock:
            event = TraceEvent(
                len(self._events), timestamp, actor, direction, kind,
                digest_of(payload), summary,
            )
            self._events.append(event)

        log.debug('#{} {} {} {}: {}'.format(
            event.sequence, actor, direction, kind, summary
        ))
        return event

    @property
    def events(self):
        return list(self._events)


def event_to_dict(event):
    data = event._asdict()
    data['timestamp'] = format_instant(event.timestamp)
    return data


def write_journal(results, path):
    """
    Write the events of simulated scenarios as JSON.

    :param list results: :class:`ScenarioResult` of the runs.
    :param Path path: Destination file.
    """
    journal = [
        {
            'scenario': result.scenario.name,
            'flow': result.scenario.flow,
            'faults': list(result.scenario.faults),
            'passed': result.passed,
            'outcome': result.outcome,
            'failed_step': result.failed_step,
            'events': [event_to_dict(event) for event in result.events],
        }
        for result in results
    ]
    path.write_text(dumps(journal, indent=4), encoding='utf-8')
    log.info('Journal of {} scenarios written to {}'.format(
        len(journal), path
    ))


__all__ = [
    'TraceEvent',
    'Trace',
    'event_to_dict',
    'write_journal',
]
