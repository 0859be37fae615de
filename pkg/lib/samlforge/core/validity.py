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
Pure validity predicates over assertion content.

All predicates are total and return a
:class:`samlforge.core.types.ValidityVerdict`. Clock skew is given in
seconds and widens both ends of a window.
"""

from datetime import timedelta
from ipaddress import ip_address

from .urns import CM_BEARER
from .instant import format_instant, to_instant, shift
from .types import Outcome, ValidityVerdict, UnsupportedMethod


def _skew(skew):
    if isinstance(skew, timedelta):
        skew = skew.total_seconds()
    if skew < 0:
        raise ValueError('Clock skew must be positive, got {}'.format(skew))
    return timedelta(seconds=skew)


def evaluate_window(not_before, not_on_or_after, now, skew=0):
    """
    Evaluate a validity window.

    ``not_before`` is inclusive and ``not_on_or_after`` exclusive, both
    widened by the skew. Bounds at the edges of the calendar saturate instead
    of overflowing.

    :param datetime not_before: Start of the window.
    :param datetime not_on_or_after: End of the window.
    :param datetime now: Instant to evaluate at.
    :param int skew: Allowed clock skew in seconds.

    :return: A Valid, NotYetValid or Expired verdict.
    :rtype: ValidityVerdict
    """
    delta = _skew(skew)
    now = to_instant(now)

    if now < shift(to_instant(not_before), -delta):
        return ValidityVerdict(
            Outcome.NotYetValid,
            'now {} is before NotBefore {} (skew {}s)'.format(
                format_instant(now), format_instant(not_before),
                int(delta.total_seconds())
            )
        )

    if now >= shift(to_instant(not_on_or_after), delta):
        return ValidityVerdict(
            Outcome.Expired,
            'now {} is on or after NotOnOrAfter {} (skew {}s)'.format(
                format_instant(now), format_instant(not_on_or_after),
                int(delta.total_seconds())
            )
        )

    return ValidityVerdict(Outcome.Valid, 'within validity window')


def check_audience(conditions, local):
    """
    Check the audience restriction against the local entity id.

    An empty audience list means no restriction.

    :param Conditions conditions: Conditions of the assertion.
    :param str local: Local entity id.

    :rtype: ValidityVerdict
    """
    if not conditions.audiences:
        return ValidityVerdict(Outcome.Valid, 'no audience restriction')

    if local in conditions.audiences:
        return ValidityVerdict(Outcome.Valid, 'audience matches')

    return ValidityVerdict(
        Outcome.AudienceMismatch,
        '{} not in audiences {}'.format(local, list(conditions.audiences))
    )


def check_bearer(confirmation, acs_url, now, skew=0):
    """
    Check a bearer subject confirmation.

    :param SubjectConfirmation confirmation: The confirmation to check.
    :param str acs_url: URL the assertion was delivered to.
    :param datetime now: Instant to evaluate at.
    :param int skew: Allowed clock skew in seconds.

    :raise UnsupportedMethod: if the confirmation method is not bearer.

    :return: A Valid, RecipientMismatch or Expired verdict.
    :rtype: ValidityVerdict
    """
    if confirmation.method != CM_BEARER:
        raise UnsupportedMethod(confirmation.method)

    delta = _skew(skew)

    if confirmation.recipient.rstrip('/') != acs_url.rstrip('/'):
        return ValidityVerdict(
            Outcome.RecipientMismatch,
            'recipient {} does not match {}'.format(
                confirmation.recipient, acs_url
            )
        )

    expiry = shift(to_instant(confirmation.not_on_or_after), delta)
    if to_instant(now) >= expiry:
        return ValidityVerdict(
            Outcome.Expired,
            'bearer confirmation expired at {}'.format(
                format_instant(confirmation.not_on_or_after)
            )
        )

    return ValidityVerdict(Outcome.Valid, 'bearer confirmation valid')


def check_locality(statement, observed_ip):
    """
    Check the subject locality against the address of the requesting user.

    Addresses are compared as IP addresses, so two spellings of the same IPv6
    address match. An unparseable address on either side is compared as
    plain text.

    :param AuthnStatement statement: The authentication statement.
    :param str observed_ip: Address the request came from.

    :rtype: ValidityVerdict
    """
    expected = statement.locality_address
    if expected is None:
        return ValidityVerdict(Outcome.Valid, 'no locality in statement')

    try:
        matches = ip_address(expected) == ip_address(observed_ip)
    except ValueError:
        matches = expected == observed_ip

    if matches:
        return ValidityVerdict(Outcome.Valid, 'locality matches')

    return ValidityVerdict(
        Outcome.LocalityMismatch,
        'locality {} does not match observed {}'.format(expected, observed_ip)
    )


__all__ = [
    'evaluate_window',
    'check_audience',
    'check_bearer',
    'check_locality',
]
