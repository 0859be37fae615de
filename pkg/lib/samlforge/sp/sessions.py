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
Sessions established at the service provider.
"""

from secrets import token_urlsafe
from threading import Lock
from collections import namedtuple

from ..logging import get_logger


log = get_logger(__name__)


SsoSession = namedtuple('SsoSession', [
    'session_id',
    'name_id',
    'name_id_format',
    'attributes',
    'issuer',
    'session_index',
    'established_at',
    'client_ip',
])
SsoSession.__doc__ = """
Local session opened from a valid assertion.

:var str session_id: Random local identifier.
:var str name_id: Subject of the assertion.
:var str name_id_format: Format of the subject.
:var list attributes: :class:`Attribute` values released to us.
:var str issuer: Identity provider that asserted the subject.
:var str session_index: Session index at the identity provider.
:var datetime established_at: When the assertion was accepted.
:var str client_ip: Address the assertion was posted from.
"""


class SessionStore:
    """
    Sessions by local id, indexed by ``(issuer, session_index)`` for single
    logout.
    """

    def __init__(self):
        self._sessions = {}
        self._by_index = {}
        self._lock = Lock()

    def __len__(self):
        return len(self._sessions)

    def __contains__(self, session_id):
        return session_id in self._sessions

    def __iter__(self):
        return iter(list(self._sessions.values()))

    def open(self, name_id, name_id_format, attributes, issuer,
             session_index, established_at, client_ip=None):
        """
        :rtype: SsoSession
        """
        session = SsoSession(
            session_id=token_urlsafe(16),
            name_id=name_id,
            name_id_format=name_id_format,
            attributes=list(attributes),
            issuer=issuer,
            session_index=session_index,
            established_at=established_at,
            client_ip=client_ip,
        )
        with self._lock:
            self._sessions[session.session_id] = session
            self._by_index.setdefault(
                (issuer, session_index), set()
            ).add(session.session_id)

        log.info('Session {} opened for {} from {}'.format(
            session.session_id, name_id, issuer
        ))
        return session

    def get(self, session_id):
        return self._sessions.get(session_id)

    def terminate_by_index(self, issuer, session_index):
        """
        Terminate every session opened by an identity provider session.

        :return: The terminated sessions.
        :rtype: list
        """
        with self._lock:
            ids = self._by_index.pop((issuer, session_index), set())
            terminated = [
                self._sessions.pop(session_id) for session_id in sorted(ids)
                if session_id in self._sessions
            ]

        for session in terminated:
            log.info('Session {} terminated'.format(session.session_id))
        return terminated


__all__ = [
    'SsoSession',
    'SessionStore',
]
