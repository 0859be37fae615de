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
Result of running an inbound message through the consumer pipeline.
"""

from collections import namedtuple

from ujson import dumps

from ..core.instant import format_instant


VALID = 'Valid'


Check = namedtuple('Check', ['step', 'passed', 'detail'])


class ValidationReport:
    """
    Every check executed on an inbound message, in order.

    The pipeline stops at the first failed check, so a failed report ends
    with exactly one failed check.
    """

    def __init__(self):
        self.checks = []
        self.warnings = []
        self.outcome = None
        self.failed_step = None
        self.session = None
        self.redirect_url = None

    @property
    def valid(self):
        return self.outcome == VALID

    def passed(self, step, detail=None):
        self.checks.append(Check(step, True, detail))

    def fail(self, step, outcome, detail=None):
        """
        Record the failed check that ends the pipeline.

        :return: The report itself.
        """
        self.checks.append(Check(step, False, detail))
        self.outcome = outcome
        self.failed_step = step
        return self

    def succeed(self, session, redirect_url):
        self.outcome = VALID
        self.session = session
        self.redirect_url = redirect_url
        return self

    def warn(self, message):
        self.warnings.append(message)

    @property
    def steps(self):
        return [check.step for check in self.checks]

    def to_dict(self):
        session = None
        if self.session is not None:
            session = {
                'session_id': self.session.session_id,
                'name_id': self.session.name_id,
                'issuer': self.session.issuer,
                'session_index': self.session.session_index,
                'established_at': format_instant(
                    self.session.established_at
                ),
                'attributes': {
                    attribute.name: list(attribute.values)
                    for attribute in self.session.attributes
                },
            }

        return {
            'outcome': self.outcome,
            'failed_step': self.failed_step,
            'checks': [check._asdict() for check in self.checks],
            'warnings': list(self.warnings),
            'redirect_url': self.redirect_url,
            'session': session,
        }

    def to_json(self):
        return dumps(self.to_dict(), indent=4)

    def summary(self):
        """
        One line description of the report.

        :rtype: str
        """
        if self.valid:
            text = 'Valid: session {} for {} -> {}'.format(
                self.session.session_id, self.session.name_id,
                self.redirect_url,
            )
        else:
            last = self.checks[-1] if self.checks else None
            text = 'Rejected at {}: {}'.format(
                self.failed_step, self.outcome
            )
            if last is not None and last.detail:
                text += ' ({})'.format(last.detail)

        if self.warnings:
            text += ' [{}]'.format('; '.join(self.warnings))
        return text

    def __str__(self):
        return self.summary()


__all__ = [
    'VALID',
    'Check',
    'ValidationReport',
]
