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
Cache of consumed message IDs.
"""

from threading import Lock

from ..core.instant import to_instant
from ..logging import get_logger


log = get_logger(__name__)


class ReplayCache:
    """
    Message IDs with the instant until which they must be remembered.

    An ID present and unexpired blocks re-acceptance. Eviction only removes
    expired entries. :meth:`check_and_record` is atomic, so two concurrent
    submissions of one ID give exactly one acceptance.

    :param str name: Name used in log lines.
    """

    def __init__(self, name='replay'):
        self.name = name
        self._entries = {}
        self._lock = Lock()

    def __len__(self):
        return len(self._entries)

    def __contains__(self, message_id):
        return message_id in self._entries

    def seen(self, message_id, now):
        """
        Check if an ID is present and unexpired.
        """
        expiry = self._entries.get(message_id)
        return expiry is not None and to_instant(now) < expiry

    def check_and_record(self, message_id, expiry, now):
        """
        Record an ID unless it is already present and unexpired.

        :param str message_id: The ID.
        :param datetime expiry: Instant after which the ID can be forgotten.
        :param datetime now: Current instant.

        :return: ``True`` if the ID was recorded, ``False`` for a replay.
        :rtype: bool
        """
        now = to_instant(now)
        expiry = to_instant(expiry)

        with self._lock:
            current = self._entries.get(message_id)
            if current is not None and now < current:
                log.warning('{} cache: replay of {} detected'.format(
                    self.name, message_id
                ))
                return False

            self._entries[message_id] = max(expiry, now)
            return True

    def evict(self, now):
        """
        Forget expired IDs.

        :return: Number of IDs forgotten.
        :rtype: int
        """
        now = to_instant(now)
        with self._lock:
            expired = [
                message_id for message_id, expiry in self._entries.items()
                if expiry <= now
            ]
            for message_id in expired:
                del self._entries[message_id]

        if expired:
            log.debug('{} cache: evicted {} entries'.format(
                self.name, len(expired)
            ))
        return len(expired)


__all__ = ['ReplayCache']
