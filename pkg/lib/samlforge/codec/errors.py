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
Exceptions raised by the XML codec.
"""

from ..core.instant import BadTimestamp


class CodecError(ValueError):
    """
    Base class of all codec errors.
    """

    code = 'CodecError'


class MalformedXml(CodecError):
    code = 'MalformedXml'

    def __init__(self, reason):
        super().__init__('Malformed XML: {}'.format(reason))
        self.reason = reason


class UnexpectedElement(MalformedXml):
    """
    An element of a SAML namespace that has no place where it was found.
    """

    code = 'UnexpectedElement'

    def __init__(self, name, parent=None):
        where = ' inside {}'.format(parent) if parent else ''
        super().__init__('unexpected element {}{}'.format(name, where))
        self.name = name
        self.parent = parent


class UnknownBinding(MalformedXml):
    code = 'UnknownBinding'

    def __init__(self, binding):
        super().__init__('unknown binding {!r}'.format(binding))
        self.binding = binding


class MissingRequiredElement(CodecError):
    code = 'MissingRequiredElement'

    def __init__(self, name):
        super().__init__('Missing required element {}'.format(name))
        self.name = name


class UnknownRole(CodecError):
    code = 'UnknownRole'

    def __init__(self, reason):
        super().__init__('Unknown role: {}'.format(reason))
        self.reason = reason


class DuplicateDefaultAcs(CodecError):
    code = 'DuplicateDefaultAcs'

    def __init__(self, indexes):
        super().__init__(
            'More than one default assertion consumer service: {}'.format(
                indexes
            )
        )
        self.indexes = indexes


class DuplicateAcsIndex(CodecError):
    code = 'DuplicateAcsIndex'

    def __init__(self, index):
        super().__init__(
            'Assertion consumer service index {} used twice'.format(index)
        )
        self.index = index


PARSE_ERRORS = (CodecError, BadTimestamp)
"""
Every error a parse function can raise for hostile input.
"""


__all__ = [
    'CodecError',
    'MalformedXml',
    'UnexpectedElement',
    'UnknownBinding',
    'MissingRequiredElement',
    'UnknownRole',
    'DuplicateDefaultAcs',
    'DuplicateAcsIndex',
    'BadTimestamp',
    'PARSE_ERRORS',
]
