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
Errors raised by the identity provider engine.

The ``code`` of each error travels in back channel faults, so the service
provider reports the same name the identity provider raised.
"""


class IdpError(Exception):
    """
    Base of all identity provider errors.
    """

    code = 'IdpError'


class UnknownUser(IdpError, LookupError):
    code = 'UnknownUser'

    def __init__(self, user_key):
        super().__init__('No attribute record for user {!r}'.format(user_key))
        self.user_key = user_key

    def __str__(self):
        return self.args[0]


class PolicyViolation(IdpError):
    """
    Raised when the partner policy cannot be honored, for example when the
    partner wants signed assertions but there is no signing key.
    """

    code = 'PolicyViolation'

    def __init__(self, partner, reason):
        super().__init__('Policy of {} violated: {}'.format(partner, reason))
        self.partner = partner
        self.reason = reason


class UnknownIssuer(IdpError):
    code = 'UnknownIssuer'

    def __init__(self, issuer):
        super().__init__('Issuer {} is not a registered partner'.format(
            issuer
        ))
        self.issuer = issuer


class SignatureRequired(IdpError):
    code = 'SignatureRequired'

    def __init__(self, issuer):
        super().__init__('Requests of {} must be signed'.format(issuer))
        self.issuer = issuer


class InvalidRequestSignature(IdpError):
    code = 'InvalidRequestSignature'

    def __init__(self, issuer, reason):
        super().__init__('Bad request signature from {}: {}'.format(
            issuer, reason
        ))
        self.issuer = issuer
        self.reason = reason


class ReplayedRequestId(IdpError):
    code = 'ReplayedRequestId'

    def __init__(self, request_id):
        super().__init__('Request {} was already seen'.format(request_id))
        self.request_id = request_id


class StaleRequest(IdpError):
    """
    Raised when a request was issued outside the window the identity
    provider remembers request identifiers for.
    """

    code = 'StaleRequest'

    def __init__(self, request_id, issue_instant):
        super().__init__('Request {} issued at {} is out of time'.format(
            request_id, issue_instant
        ))
        self.request_id = request_id
        self.issue_instant = issue_instant


class ArtifactError(IdpError):
    """
    Base of the artifact resolution errors.
    """

    code = 'ArtifactError'


class UnknownArtifact(ArtifactError):
    code = 'UnknownArtifact'

    def __init__(self, handle):
        super().__init__('No message for artifact handle {}'.format(
            handle.hex()
        ))
        self.handle = handle


class AlreadyConsumed(ArtifactError):
    code = 'AlreadyConsumed'

    def __init__(self, handle):
        super().__init__('Artifact handle {} already resolved'.format(
            handle.hex()
        ))
        self.handle = handle


class ArtifactExpired(ArtifactError):
    code = 'ArtifactExpired'

    def __init__(self, handle, age):
        super().__init__(
            'Artifact handle {} expired {} seconds after issuance'.format(
                handle.hex(), age
            )
        )
        self.handle = handle
        self.age = age


class WrongSourceId(ArtifactError):
    code = 'WrongSourceId'

    def __init__(self, source_id):
        super().__init__(
            'Artifact source {} is not this identity provider'.format(
                source_id.hex()
            )
        )
        self.source_id = source_id


class WrongRequester(ArtifactError):
    code = 'WrongRequester'

    def __init__(self, requester, partner):
        super().__init__(
            'Artifact issued to {} requested by {}'.format(partner, requester)
        )
        self.requester = requester
        self.partner = partner


class IncompletePair(ArtifactError):
    code = 'IncompletePair'

    def __init__(self, handle):
        super().__init__(
            'Artifact handle {} is one half of a pair'.format(handle.hex())
        )
        self.handle = handle


class MismatchedPair(ArtifactError):
    code = 'MismatchedPair'

    def __init__(self, first, second):
        super().__init__(
            'Artifact handles {} and {} are not one pair'.format(
                first.hex(), second.hex()
            )
        )
        self.first = first
        self.second = second


class UnknownSession(IdpError, LookupError):
    code = 'UnknownSession'

    def __init__(self, session_index):
        super().__init__('No live session {!r}'.format(session_index))
        self.session_index = session_index

    def __str__(self):
        return self.args[0]


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
]
