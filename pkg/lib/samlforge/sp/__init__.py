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
Service provider: consumer pipeline, replay cache, relay states and
sessions.
"""

from .errors import (
    SpError, NoIdpRegistered, UnsupportedBinding, UnknownIssuer,
    InvalidRequestSignature,
)
from .replay import ReplayCache
from .relay import RelayStateStore, resolve_relay_state
from .report import VALID, Check, ValidationReport
from .sessions import SsoSession, SessionStore
from .engine import ServiceProvider


__all__ = [
    'SpError',
    'NoIdpRegistered',
    'UnsupportedBinding',
    'UnknownIssuer',
    'InvalidRequestSignature',
    'ReplayCache',
    'RelayStateStore',
    'resolve_relay_state',
    'VALID',
    'Check',
    'ValidationReport',
    'SsoSession',
    'SessionStore',
    'ServiceProvider',
]
