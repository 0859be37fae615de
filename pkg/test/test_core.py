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
Test suite for the domain model and validity predicates.
"""

from datetime import datetime, timezone, timedelta

from pytest import mark, raises

from samlforge.logging import setup_logging
from samlforge.core import (
    BadTimestamp, InvalidValue, UnsupportedMethod,
    parse_instant, format_instant, to_instant, new_id,
    EntityId, Conditions, SubjectConfirmation, AuthnStatement, Attribute,
    Outcome, evaluate_window, check_audience, check_bearer, check_locality,
)
from samlforge.core.urns import CM_BEARER
from samlforge.core.instant import shift, seconds, EARLIEST, LATEST


ACS = 'https://mypartner.com/metaAlias/sp'


def setup_module(module):
    setup_logging(verbosity=2)


def instant(text):
    return parse_instant(text)


@mark.parametrize(['text', 'expected'], [
    [
        '2009-04-22T12:33:36Z',
        datetime(2009, 4, 22, 12, 33, 36, tzinfo=timezone.utc),
    ],
    [
        '2009-04-22T12:33:36.789Z',
        datetime(2009, 4, 22, 12, 33, 36, tzinfo=timezone.utc),
    ],
])
def test_parse_instant(text, expected):
    assert parse_instant(text) == expected
    assert format_instant(parse_instant(text)) == '2009-04-22T12:33:36Z'


@mark.parametrize(['text'], [
    ['2009-04-22T12:33:36'],
    ['2009-04-22T12:33:36+00:00'],
    ['2009-02-30T12:33:36Z'],
    ['yesterday'],
    [''],
])
def test_parse_instant_rejects(text):
    with raises(BadTimestamp) as info:
        parse_instant(text)
    assert info.value.code == 'BadTimestamp'


def test_to_instant_assumes_utc():
    naive = datetime(2009, 4, 22, 12, 33, 36, 500)
    assert to_instant(naive) == instant('2009-04-22T12:33:36Z')

    shifted = datetime(
        2009, 4, 22, 14, 33, 36, tzinfo=timezone(timedelta(hours=2))
    )
    assert to_instant(shifted) == instant('2009-04-22T12:33:36Z')


def test_new_id():
    first = new_id()
    assert first.startswith('_')
    assert len(first) == 41
    assert first != new_id()


def test_entity_id():
    assert EntityId('mycompany:saml2.0') == 'mycompany:saml2.0'

    with raises(InvalidValue):
        EntityId('')
    with raises(InvalidValue):
        EntityId(' mycompany:saml2.0')


def test_attribute_requires_values():
    with raises(InvalidValue) as info:
        Attribute('uid', 'uid', None, [])
    assert info.value.typename == 'Attribute'


@mark.parametrize(['now', 'skew', 'outcome'], [
    ['2009-04-22T12:28:35Z', 0, Outcome.NotYetValid],
    ['2009-04-22T12:28:36Z', 0, Outcome.Valid],
    ['2009-04-22T12:30:00Z', 0, Outcome.Valid],
    ['2009-04-22T12:33:35Z', 0, Outcome.Valid],
    ['2009-04-22T12:33:36Z', 0, Outcome.Expired],
    ['2009-04-22T12:34:05Z', 30, Outcome.Valid],
    ['2009-04-22T12:34:06Z', 30, Outcome.Expired],
    ['2009-04-22T12:28:06Z', 30, Outcome.Valid],
    ['2009-04-22T12:28:05Z', 30, Outcome.NotYetValid],
])
def test_evaluate_window(now, skew, outcome):
    verdict = evaluate_window(
        instant('2009-04-22T12:28:36Z'),
        instant('2009-04-22T12:33:36Z'),
        instant(now),
        skew=skew,
    )
    assert verdict.outcome is outcome
    assert verdict.valid == (outcome is Outcome.Valid)


def test_evaluate_window_reversed_never_valid():
    start = instant('2009-04-22T12:33:36Z')
    end = instant('2009-04-22T12:28:36Z')
    for minute in range(20, 40):
        now = instant('2009-04-22T12:{:02d}:00Z'.format(minute))
        assert not evaluate_window(start, end, now).valid


def test_evaluate_window_negative_skew():
    with raises(ValueError):
        evaluate_window(
            instant('2009-04-22T12:28:36Z'),
            instant('2009-04-22T12:33:36Z'),
            instant('2009-04-22T12:30:00Z'),
            skew=-1,
        )


@mark.parametrize(['not_before', 'not_on_or_after', 'now', 'outcome'], [
    ['2009-04-22T12:28:36Z', '9999-12-31T23:59:59Z',
     '2009-04-22T12:30:00Z', Outcome.Valid],
    ['0001-01-01T00:00:00Z', '2009-04-22T12:33:36Z',
     '2009-04-22T12:30:00Z', Outcome.Valid],
    ['0001-01-01T00:00:00Z', '9999-12-31T23:59:59Z',
     '0001-01-01T00:00:00Z', Outcome.Valid],
    ['9999-12-31T23:59:59Z', '9999-12-31T23:59:59Z',
     '2009-04-22T12:30:00Z', Outcome.NotYetValid],
    ['0001-01-01T00:00:00Z', '0001-01-01T00:00:01Z',
     '2009-04-22T12:30:00Z', Outcome.Expired],
])
def test_evaluate_window_calendar_edges(
        not_before, not_on_or_after, now, outcome):
    verdict = evaluate_window(
        instant(not_before), instant(not_on_or_after), instant(now), skew=30,
    )
    assert verdict.outcome is outcome


def test_shift_saturates():
    assert shift(instant('9999-12-31T23:59:59Z'), seconds(30)) == LATEST
    assert shift(instant('0001-01-01T00:00:10Z'), -seconds(30)) == EARLIEST
    assert format_instant(LATEST) == '9999-12-31T23:59:59Z'
    assert format_instant(
        shift(instant('2009-04-22T12:28:36Z'), seconds(30))
    ) == '2009-04-22T12:29:06Z'


@mark.parametrize(['audiences', 'outcome'], [
    [[], Outcome.Valid],
    [['mypartner:saml2.0'], Outcome.Valid],
    [['other:saml2.0', 'mypartner:saml2.0'], Outcome.Valid],
    [['mypartner.com:saml2.0'], Outcome.AudienceMismatch],
])
def test_check_audience(audiences, outcome):
    conditions = Conditions(
        instant('2009-04-22T12:28:36Z'),
        instant('2009-04-22T12:33:36Z'),
        audiences,
    )
    assert check_audience(conditions, 'mypartner:saml2.0').outcome is outcome


@mark.parametrize(['acs', 'now', 'outcome'], [
    [ACS, '2009-04-22T12:33:36Z', Outcome.Valid],
    [ACS + '/', '2009-04-22T12:43:35Z', Outcome.Valid],
    [ACS, '2009-04-22T12:43:36Z', Outcome.Expired],
    ['https://attacker.example/acs', '2009-04-22T12:33:36Z',
     Outcome.RecipientMismatch],
])
def test_check_bearer(acs, now, outcome):
    confirmation = SubjectConfirmation(
        CM_BEARER, instant('2009-04-22T12:43:36Z'), ACS
    )
    assert check_bearer(confirmation, acs, instant(now)).outcome is outcome


def test_check_bearer_far_future_expiry():
    confirmation = SubjectConfirmation(
        CM_BEARER, instant('9999-12-31T23:59:59Z'), ACS
    )
    verdict = check_bearer(
        confirmation, ACS, instant('2009-04-22T12:33:36Z'), skew=30
    )
    assert verdict.outcome is Outcome.Valid


def test_check_bearer_unsupported_method():
    confirmation = SubjectConfirmation(
        'urn:oasis:names:tc:SAML:2.0:cm:holder-of-key',
        instant('2009-04-22T12:43:36Z'),
        ACS,
    )
    with raises(UnsupportedMethod):
        check_bearer(confirmation, ACS, instant('2009-04-22T12:33:36Z'))


@mark.parametrize(['address', 'observed', 'outcome'], [
    [None, '10.0.0.1', Outcome.Valid],
    ['192.168.0.189', '192.168.0.189', Outcome.Valid],
    ['192.168.0.189', '10.0.0.7', Outcome.LocalityMismatch],
    ['2001:db8::1', '2001:0db8:0:0:0:0:0:1', Outcome.Valid],
    ['not-an-ip', 'not-an-ip', Outcome.Valid],
])
def test_check_locality(address, observed, outcome):
    statement = AuthnStatement(
        instant('2009-04-22T12:33:20Z'),
        'ccda16bc322adf4f74d556bd',
        locality_address=address,
    )
    assert check_locality(statement, observed).outcome is outcome
