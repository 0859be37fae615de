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
Federation domain model and validity predicates.
"""

from .instant import (
    BadTimestamp, to_instant, parse_instant, format_instant, utcnow, seconds,
    shift,
)
from .types import (
    InvalidValue, UnsupportedMethod, new_id,
    EntityId, Conditions, SubjectConfirmation, Subject, AuthnStatement,
    Attribute, Signature, EncryptedAssertion, Assertion, Response,
    AuthnRequest, LogoutRequest, LogoutResponse, ArtifactResolve,
    ArtifactResponse, Outcome, ValidityVerdict,
)
from .validity import (
    evaluate_window, check_audience, check_bearer, check_locality,
)


__all__ = [
    'BadTimestamp',
    'to_instant',
    'parse_instant',
    'format_instant',
    'utcnow',
    'seconds',
    'shift',
    'InvalidValue',
    'UnsupportedMethod',
    'new_id',
    'EntityId',
    'Conditions',
    'SubjectConfirmation',
    'Subject',
    'AuthnStatement',
    'Attribute',
    'Signature',
    'EncryptedAssertion',
    'Assertion',
    'Response',
    'AuthnRequest',
    'LogoutRequest',
    'LogoutResponse',
    'ArtifactResolve',
    'ArtifactResponse',
    'Outcome',
    'ValidityVerdict',
    'evaluate_window',
    'check_audience',
    'check_bearer',
    'check_locality',
]
