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
Identity provider: sessions, artifacts and the assertion issuing engine.
"""

from .errors import (
    IdpError, UnknownUser, PolicyViolation, UnknownIssuer,
    SignatureRequired, InvalidRequestSignature, ReplayedRequestId,
    StaleRequest,
    ArtifactError, UnknownArtifact, AlreadyConsumed, ArtifactExpired,
    WrongSourceId, WrongRequester, IncompletePair, MismatchedPair,
    UnknownSession,
)
from .sessions import IdpSession, SessionStore
from .artifacts import ArtifactEntry, ArtifactStore
from .engine import Delivery, IdentityProvider


__all__ = [
    'IdpError',
    'UnknownUser',
    'PolicyViolation',
    'UnknownIssuer',
    'SignatureRequired',
    'InvalidRequestSignature',
    'ReplayedRequestId',
    'StaleRequest',
    'ArtifactError',
    'UnknownArtifact',
    'AlreadyConsumed',
    'ArtifactExpired',
    'WrongSourceId',
    'WrongRequester',
    'IncompletePair',
    'MismatchedPair',
    'UnknownSession',
    'IdpSession',
    'SessionStore',
    'ArtifactEntry',
    'ArtifactStore',
    'Delivery',
    'IdentityProvider',
]
