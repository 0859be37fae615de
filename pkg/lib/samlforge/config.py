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
Declarative options of pluggable components.
"""

from re import match
from copy import deepcopy
from collections import OrderedDict, namedtuple

from pprintpp import pformat

from .schema import SLUG_REGEX, DurationValidator
from .logging import get_logger


log = get_logger(__name__)


ConfigItem = namedtuple('ConfigItem', ['key', 'value', 'is_secret'])


class ConfigurationError(ValueError):
    code = 'ConfigurationError'


class MissingOptions(ConfigurationError):
    code = 'MissingOptions'

    def __init__(self, keys):
        super().__init__(
            'Missing mandatory configuration options {}'.format(keys)
        )
        self.keys = keys


class UnknownOptions(ConfigurationError):
    code = 'UnknownOptions'

    def __init__(self, keys):
        super().__init__('Unknown configuration options {}'.format(keys))
        self.keys = keys


class InvalidOption(ConfigurationError):
    code = 'InvalidOption'

    def __init__(self, key, value, errors):
        super().__init__(
            'Invalid configuration option {} = {!r}'.format(key, value)
        )
        self.key = key
        self.errors = errors


class Configurator:
    """
    Options manager of a component, like an attribute source.

    Options are declared with :meth:`add_option` and the user configuration
    is checked against them with :meth:`validate`, producing an immutable
    named tuple of :class:`ConfigItem`.
    """

    def __init__(self):
        self._declared = OrderedDict()
        self._validators = []

    def add_option(
            self, key,
            default=None, optional=False,
            schema=None, secret=False):
        """
        Declare an option.

        :param str key: Key of the option. Must be a public Python name.
        :param default: Value used when the option is optional and missing.
        :param bool optional: Is the option optional. Default is mandatory.
        :param dict schema: Cerberus rules for the option value. The
         ``duration`` coercion is available.
        :param bool secret: Never log the value of this option.
        """
        if not key or not match(SLUG_REGEX, key):
            raise ValueError('Invalid option key {!r}. Keys match {}'.format(
                key, SLUG_REGEX
            ))

        if key in self._declared:
            raise ValueError('Option {} declared twice'.format(key))

        for name, flag in (('optional', optional), ('secret', secret)):
            if not isinstance(flag, bool):
                raise ValueError('{} must be a boolean'.format(name))

        if schema is not None and not isinstance(schema, dict):
            raise ValueError('schema must be a dict')

        self._declared[key] = {
            'default': default,
            'optional': optional,
            'schema': schema,
            'secret': secret,
        }

    def add_validator(self, validator):
        """
        Add a function called with the complete configuration dictionary
        after the per option validation.
        """
        self._validators.append(validator)

    def _check_keys(self, userconf):
        available = set(userconf)

        mandatory = {
            key for key, info in self._declared.items()
            if not info['optional']
        }
        if mandatory - available:
            raise MissingOptions(sorted(mandatory - available))

        unknown = available - set(self._declared)
        if unknown:
            raise UnknownOptions(sorted(unknown))

    def _check_value(self, key, value):
        schema = self._declared[key]['schema']
        if schema is None:
            return value

        validator = DurationValidator({key: schema})
        validated = validator.validated({key: value})
        if validated is None:
            log.critical('Invalid configuration option {}:\n{}'.format(
                key, pformat(validator.errors)
            ))
            raise InvalidOption(key, value, validator.errors)

        return validated[key]

    def _log(self, validated):
        lines = []
        for key, info in self._declared.items():
            if key not in validated:
                continue
            value = '*' * 20 if info['secret'] else validated[key]
            lines.append('{} = {}'.format(key, value))

        log.info('Using configuration:\n    {}'.format('\n    '.join(lines)))

    def validate(self, userconf):
        """
        Validate a user configuration against the declared options.

        :param dict userconf: The user configuration.

        :raise MissingOptions: if mandatory options are missing.
        :raise UnknownOptions: if undeclared options are present.
        :raise InvalidOption: if a value does not follow its schema.

        :return: A named tuple mapping each key to a :class:`ConfigItem`.
        :rtype: namedtuple
        """
        userconf = deepcopy(userconf or {})
        self._check_keys(userconf)

        validated = OrderedDict()
        for key, info in self._declared.items():
            if key in userconf:
                validated[key] = self._check_value(key, userconf[key])
            else:
                validated[key] = deepcopy(info['default'])

        for validator in self._validators:
            validator(validated)

        self._log(validated)

        configtype = namedtuple('config', list(validated))
        return configtype(**{
            key: ConfigItem(
                key=key,
                value=value,
                is_secret=self._declared[key]['secret'],
            )
            for key, value in validated.items()
        })


__all__ = [
    'ConfigItem',
    'ConfigurationError',
    'MissingOptions',
    'UnknownOptions',
    'InvalidOption',
    'Configurator',
]
