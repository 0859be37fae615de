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
Service provider errors.

Rejections of inbound assertions are not errors, they are reported in a
:class:`samlforge.sp.report.ValidationReport`. These exceptions are for
misuse of the engine and for the requests it receives from its identity
providers.
"""


class SpError(Exception):
    """
    Base class for service provider errors.
    """

    code = 'SpError'


class NoIdpRegistered(SpError, LookupError):
    code = 'NoIdpRegistered'

    def __init__(self):
        super().__init__('No identity provider is registered')


class UnsupportedBinding(SpError, ValueError):
    code = 'UnsupportedBinding'

    def __init__(self, binding, idp):
        super().__init__(
            'Identity provider {} has no endpoint for binding {}'.format(
                idp, binding
            )
        )
        self.binding = binding
        self.idp = idp


class UnknownIssuer(SpError):
    code = 'UnknownIssuer'

    def __init__(self, issuer):
        super().__init__(
            'Issuer {} is not a registered identity provider'.format(issuer)
        )
        self.issuer = issuer


class InvalidRequestSignature(SpError):
    code = 'InvalidRequestSignature'

    def __init__(self, issuer, reason):
        super().__init__(
            'Signature of request from {} rejected: {}'.format(issuer, reason)
        )
        self.issuer = issuer
        self.reason = reason


__all__ = [
    'SpError',
    'NoIdpRegistered',
    'UnsupportedBinding',
    'UnknownIssuer',
    'InvalidRequestSignature',
]
