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
Sessions of authenticated users at the identity provider.
"""

from secrets import token_hex
from threading import Lock
from collections import namedtuple

from .errors import UnknownSession
from ..core.instant import to_instant, seconds, shift
from ..logging import get_logger


log = get_logger(__name__)


SESSION_INDEX_BYTES = 12


class IdpSession(namedtuple(
        'IdpSession', [
            'session_index', 'user_key', 'name_id', 'name_id_format',
            'authenticated_at', 'client_ip', 'participants',
        ])):
    """
    Authenticated user.

    :var str session_index: Opaque index, unique among live sessions.
    :var str user_key: Key of the user in the attribute source.
    :var str name_id: Name identifier asserted for the user.
    :var datetime authenticated_at: When the user authenticated.
    :var str client_ip: Address the user authenticated from.
    :var frozenset participants: Service providers that received an
     assertion in this session.
    """

    __slots__ = ()

    def __new__(
            cls, session_index, user_key, name_id, name_id_format,
            authenticated_at, client_ip=None, participants=()):
        return super().__new__(
            cls, session_index, user_key, name_id, name_id_format,
            to_instant(authenticated_at), client_ip, frozenset(participants),
        )


PendingLogout = namedtuple(
    'PendingLogout', ['session_index', 'started_at', 'requests']
)
PendingLogout.__doc__ = """
Logout waiting for the answers of the participants.

:var dict requests: Maps each LogoutRequest ID to the partner it was sent
 to.
"""


class SessionStore:
    """
    Live sessions, by session index.

    Every mutation is serialized by a lock.
    """

    def __init__(self):
        self._sessions = {}
        self._terminated = set()
        self._pending = {}
        self._lock = Lock()

    def __len__(self):
        return len(self._sessions)

    def __contains__(self, session_index):
        return session_index in self._sessions

    def create(self, user_key, name_id, name_id_format, now,
               client_ip=None, session_index=None):
        """
        Open a session.

        :param str session_index: Force the index of the session. A fresh
         random index is used when not given.

        :raise ValueError: if the forced index is already live.

        :rtype: IdpSession
        """
        with self._lock:
            if session_index is None:
                session_index = token_hex(SESSION_INDEX_BYTES)
                while session_index in self._sessions:
                    session_index = token_hex(SESSION_INDEX_BYTES)
            elif session_index in self._sessions:
                raise ValueError(
                    'Session {} is already live'.format(session_index)
                )

            session = IdpSession(
                session_index=session_index,
                user_key=user_key,
                name_id=name_id,
                name_id_format=name_id_format,
                authenticated_at=now,
                client_ip=client_ip,
            )
            self._sessions[session_index] = session
            self._terminated.discard(session_index)

        log.info('Session {} opened for {}'.format(session_index, user_key))
        return session

    def get(self, session_index):
        """
        :raise UnknownSession: if the session is not live.

        :rtype: IdpSession
        """
        session = self._sessions.get(session_index)
        if session is None:
            raise UnknownSession(session_index)
        return session

    def was_terminated(self, session_index):
        return session_index in self._terminated

    def add_participant(self, session_index, partner):
        """
        Record that a partner received an assertion in a session.

        :rtype: IdpSession
        """
        with self._lock:
            session = self.get(session_index)
            session = session._replace(
                participants=session.participants | {partner}
            )
            self._sessions[session_index] = session
            return session

    def start_logout(self, session_index, requests, now):
        """
        Wait for the answers of the LogoutRequests sent for a session.

        The session is terminated immediately if there is nothing to wait
        for.

        :param dict requests: LogoutRequest ID to partner entity id.
        """
        with self._lock:
            self.get(session_index)
            if not requests:
                self._terminate(session_index)
                return
            self._pending[session_index] = PendingLogout(
                session_index, to_instant(now), dict(requests)
            )

    def complete_logout(self, request_id, partner):
        """
        Record the answer of one participant.

        :return: The index of the session, if this answer was awaited.
        :rtype: str
        """
        with self._lock:
            for pending in self._pending.values():
                if pending.requests.get(request_id) == partner:
                    del pending.requests[request_id]
                    if not pending.requests:
                        del self._pending[pending.session_index]
                        self._terminate(pending.session_index)
                    return pending.session_index
        return None

    def expire_logouts(self, now, timeout):
        """
        Terminate the sessions whose logout is waiting for too long.

        :param int timeout: Seconds to wait for the answers.

        :return: Indexes of the terminated sessions.
        :rtype: list
        """
        limit = shift(to_instant(now), -seconds(timeout))
        with self._lock:
            expired = [
                pending.session_index
                for pending in self._pending.values()
                if pending.started_at <= limit
            ]
            for session_index in expired:
                missing = sorted(set(
                    self._pending.pop(session_index).requests.values()
                ))
                log.warning(
                    'Logout of session {} timed out waiting for {}'.format(
                        session_index, missing
                    )
                )
                self._terminate(session_index)
        return expired

    def is_logging_out(self, session_index):
        return session_index in self._pending

    def _terminate(self, session_index):
        self._sessions.pop(session_index, None)
        self._terminated.add(session_index)
        log.info('Session {} terminated'.format(session_index))

    def terminate(self, session_index):
        with self._lock:
            self._pending.pop(session_index, None)
            self._terminate(session_index)


__all__ = [
    'IdpSession',
    'PendingLogout',
    'SessionStore',
]
