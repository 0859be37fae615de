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
Fault injection into the messages of the identity provider.

Faults spoiling the content of a response are applied by
:class:`FaultyIdentityProvider` through the hooks of the engine. The other
faults are played by the simulator: the browser replays messages, drops an
artifact of a pair or shows up from another address.
"""

from random import Random

from ..core.instant import seconds
from ..idp import IdentityProvider
from ..logging import get_logger


log = get_logger(__name__)


ENGINE_FAULTS = frozenset((
    'tamper_signature',
    'strip_signature',
    'expire_window',
    'not_yet_valid',
    'wrong_audience',
    'wrong_recipient',
    'wrong_destination',
))

FOREIGN_AUDIENCE = 'urn:samlforge:another-party'
FOREIGN_URL = 'https://elsewhere.invalid/acs'

# Shift of the conditions window, far beyond any sensible clock skew
WINDOW_SHIFT = 3600


def flip(text, rng):
    """
    Change one character of a text.
    """
    position = rng.randrange(len(text))
    replacement = 'x' if text[position] != 'x' else 'y'
    return text[:position] + replacement + text[position + 1:]


def tamper(assertion, rng):
    """
    Change the subject or one attribute value of a signed assertion.

    :rtype: Assertion
    """
    targets = [(None, None)] + [
        (index, position)
        for index, attribute in enumerate(assertion.attributes)
        for position, value in enumerate(attribute.values)
        if value
    ]
    index, position = targets[rng.randrange(len(targets))]

    if index is None:
        subject = assertion.subject
        return assertion._replace(subject=subject._replace(
            name_id=flip(subject.name_id, rng)
        ))

    attributes = list(assertion.attributes)
    attribute = attributes[index]
    values = list(attribute.values)
    values[position] = flip(values[position], rng)
    attributes[index] = attribute._replace(values=tuple(values))
    return assertion._replace(attributes=attributes)


class FaultyIdentityProvider(IdentityProvider):
    """
    Identity provider spoiling the responses it issues.

    :param FederationRegistry registry: As in :class:`IdentityProvider`.
    :param AttributeSource source: As in :class:`IdentityProvider`.
    :param faults: Names of the faults to inject.
    :param int seed: Seed of the choices made while tampering.
    """

    def __init__(self, registry, source, faults=(), seed=None):
        super().__init__(registry, source)
        self.faults = frozenset(faults) & ENGINE_FAULTS
        self.rng = Random(seed)

    def prepare_assertion(self, assertion, partner):
        conditions = assertion.conditions
        confirmation = assertion.subject.confirmation
        validity = seconds(partner.policy.validity)

        if 'expire_window' in self.faults:
            not_on_or_after = assertion.issue_instant - seconds(WINDOW_SHIFT)
            conditions = conditions._replace(
                not_before=not_on_or_after - validity,
                not_on_or_after=not_on_or_after,
            )

        if 'not_yet_valid' in self.faults:
            not_before = assertion.issue_instant + seconds(WINDOW_SHIFT)
            conditions = conditions._replace(
                not_before=not_before,
                not_on_or_after=not_before + validity,
            )

        if 'wrong_audience' in self.faults:
            conditions = conditions._replace(audiences=[FOREIGN_AUDIENCE])

        if 'wrong_recipient' in self.faults:
            confirmation = confirmation._replace(recipient=FOREIGN_URL)

        if self.faults:
            log.info('Injecting {} into assertion {}'.format(
                ', '.join(sorted(self.faults)), assertion.id
            ))

        return assertion._replace(
            conditions=conditions,
            subject=assertion.subject._replace(confirmation=confirmation),
        )

    def signed_assertion(self, assertion, partner):
        if 'tamper_signature' in self.faults:
            assertion = tamper(assertion, self.rng)
        if 'strip_signature' in self.faults:
            assertion = assertion._replace(signature=None)
        return assertion

    def prepare_response(self, response, partner):
        if 'wrong_destination' in self.faults:
            response = response._replace(destination=FOREIGN_URL)
        return response


__all__ = [
    'ENGINE_FAULTS',
    'tamper',
    'FaultyIdentityProvider',
]
