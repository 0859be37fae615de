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
Exceptions raised by the transport bindings.
"""


class BindingError(ValueError):
    """
    Base class of encoding and decoding errors of the front channel bindings.
    """

    code = 'BindingError'


class RelayStateTooLong(BindingError):
    code = 'RelayStateTooLong'

    def __init__(self, length, limit):
        super().__init__(
            'RelayState is {} bytes long, limit is {}'.format(length, limit)
        )
        self.length = length
        self.limit = limit


class MissingField(BindingError):
    code = 'MissingField'

    def __init__(self, name):
        super().__init__('Missing field {}'.format(name))
        self.name = name


class BadBase64(BindingError):
    code = 'BadBase64'

    def __init__(self, field):
        super().__init__('Field {} is not valid base64'.format(field))
        self.field = field


class BadUrlEncoding(BindingError):
    code = 'BadUrlEncoding'

    def __init__(self, reason):
        super().__init__('Bad URL encoding: {}'.format(reason))
        self.reason = reason


class UrlTooLong(BindingError):
    code = 'UrlTooLong'

    def __init__(self, length, limit):
        super().__init__(
            'Redirect URL is {} bytes long, limit is {}'.format(length, limit)
        )
        self.length = length
        self.limit = limit


class BadDeflate(BindingError):
    code = 'BadDeflate'

    def __init__(self, reason):
        super().__init__('Bad DEFLATE stream: {}'.format(reason))
        self.reason = reason


class BadLength(BindingError):
    code = 'BadLength'

    def __init__(self, length):
        super().__init__(
            'Artifact is {} bytes long, expected 44'.format(length)
        )
        self.length = length


class BadTypeCode(BindingError):
    code = 'BadTypeCode'

    def __init__(self, type_code):
        super().__init__(
            'Unsupported artifact type code 0x{:04X}'.format(type_code)
        )
        self.type_code = type_code


class BackChannelError(Exception):
    """
    Base class of back channel exchange errors.
    """

    code = 'BackChannelError'


class ConnectFailed(BackChannelError):
    code = 'ConnectFailed'

    def __init__(self, endpoint, reason):
        super().__init__('Unable to reach {}: {}'.format(endpoint, reason))
        self.endpoint = endpoint
        self.reason = reason


class Timeout(BackChannelError):
    code = 'Timeout'

    def __init__(self, endpoint, seconds):
        super().__init__(
            'No answer from {} after {} seconds'.format(endpoint, seconds)
        )
        self.endpoint = endpoint
        self.seconds = seconds


class FaultResponse(BackChannelError):
    """
    The remote party answered with a fault envelope.

    :var str fault_code: Error code sent by the remote party.
    :var str detail: Human readable fault description.
    """

    code = 'FaultResponse'

    def __init__(self, fault_code, detail):
        super().__init__('Fault {}: {}'.format(fault_code, detail))
        self.fault_code = fault_code
        self.detail = detail


class MalformedEnvelope(BackChannelError):
    code = 'MalformedEnvelope'

    def __init__(self, reason):
        super().__init__('Malformed envelope: {}'.format(reason))
        self.reason = reason


__all__ = [
    'BindingError',
    'RelayStateTooLong',
    'MissingField',
    'BadBase64',
    'BadUrlEncoding',
    'UrlTooLong',
    'BadDeflate',
    'BadLength',
    'BadTypeCode',
    'BackChannelError',
    'ConnectFailed',
    'Timeout',
    'FaultResponse',
    'MalformedEnvelope',
]
