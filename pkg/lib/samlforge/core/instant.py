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
UTC instants with second precision.

An instant is represented as a timezone aware :py:class:`datetime.datetime`
in UTC with the microseconds dropped. On the wire it is always written as
``YYYY-MM-DDTHH:MM:SSZ``.
"""

from re import compile as regex
from datetime import datetime, timezone, timedelta

from ..logging import get_logger


log = get_logger(__name__)


INSTANT_REGEX = regex(
    r'^(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.\d+)?Z$'
)


class BadTimestamp(ValueError):
    """
    Raised when a timestamp is not an ISO 8601 UTC instant ending with ``Z``.
    """

    code = 'BadTimestamp'

    def __init__(self, value):
        super().__init__(
            'Bad timestamp "{}", expected YYYY-MM-DDTHH:MM:SSZ'.format(value)
        )
        self.value = value


def to_instant(value):
    """
    Normalize a datetime to an instant.

    Naive datetimes are assumed to be in UTC.

    :param datetime value: Any datetime.

    :return: A UTC aware datetime with second precision.
    :rtype: datetime
    """
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc).replace(microsecond=0)


def parse_instant(text):
    """
    Parse an ISO 8601 UTC timestamp.

    Fractional seconds are accepted and truncated.

    :param str text: Timestamp as found in a document.

    :raise BadTimestamp: if the text is not a valid UTC timestamp.

    :return: The parsed instant.
    :rtype: datetime
    """
    if not isinstance(text, str):
        raise BadTimestamp(text)

    found = INSTANT_REGEX.match(text)
    if found is None:
        raise BadTimestamp(text)

    try:
        return datetime(
            *(int(group) for group in found.groups()),
            tzinfo=timezone.utc
        )
    except ValueError:
        raise BadTimestamp(text)


def format_instant(value):
    """
    Serialize an instant.

    :param datetime value: The instant to serialize.

    :return: The timestamp in ``YYYY-MM-DDTHH:MM:SSZ`` form.
    :rtype: str
    """
    return to_instant(value).strftime('%Y-%m-%dT%H:%M:%SZ')


def utcnow():
    """
    Current instant.
    """
    return to_instant(datetime.now(timezone.utc))


def seconds(amount):
    """
    Shortcut for a timedelta of the given seconds.
    """
    return timedelta(seconds=amount)


EARLIEST = datetime.min.replace(tzinfo=timezone.utc)
LATEST = datetime.max.replace(tzinfo=timezone.utc, microsecond=0)


def shift(value, delta):
    """
    Move an instant by a delta, saturating at the representable range.

    :param datetime value: The instant to move.
    :param timedelta delta: How far to move it. May be negative.

    :return: The moved instant, or the earliest or latest instant when the
     result would fall outside the calendar.
    :rtype: datetime
    """
    try:
        return value + delta
    except OverflowError:
        return LATEST if delta > timedelta(0) else EARLIEST


__all__ = [
    'BadTimestamp',
    'to_instant',
    'parse_instant',
    'format_instant',
    'utcnow',
    'seconds',
    'shift',
    'EARLIEST',
    'LATEST',
]
