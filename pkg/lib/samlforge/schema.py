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
Schemas of the configuration, registry and scenario files.
"""

from datetime import timedelta

from cerberus import Validator
from pytimeparse import parse as parse_duration

from .core.urns import BINDING_NAMES
from .logging import get_logger


log = get_logger(__name__)


SLUG_REGEX = r'^[a-zA-Z][a-zA-Z0-9_]*$'

ALIAS_REGEX = r'^[A-Za-z0-9._-]+$'


def duration(default, minimum=0):
    return {
        'required': False,
        'coerce': 'duration',
        'type': 'integer',
        'min': minimum,
        'default': default,
    }


SERVICE_SCHEMA = {
    'host': {
        'required': False,
        'type': 'string',
        'empty': False,
        'default': '127.0.0.1',
    },
    'port': {
        'required': False,
        'type': 'integer',
        'min': 0,
        'max': 65535,
        'default': 8080,
    },
    'base_url': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    'fixture_user': {
        'required': False,
        'type': 'string',
        'empty': False,
        'default': 'jdoe',
    },
    'timeout': duration(10, minimum=1),
    'sweep_interval': duration(30, minimum=1),
}


SOURCE_SCHEMA = {
    'type': {
        'required': True,
        'type': 'string',
        'regex': SLUG_REGEX,
    },
    'config': {
        'required': False,
        'type': 'dict',
        'default': {},
        'keysrules': {
            'type': 'string',
            'regex': SLUG_REGEX,
        },
    },
}


ROLE_SCHEMA = {
    'registry': {
        'required': True,
        'type': 'string',
        'empty': False,
    },
    'passphrase': {
        'required': True,
        'type': 'string',
        'empty': False,
    },
}


IDP_SCHEMA = dict(ROLE_SCHEMA, source={
    'required': True,
    'type': 'dict',
    'schema': SOURCE_SCHEMA,
})


SP_SCHEMA = dict(
    ROLE_SCHEMA,
    default_landing={
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    skew={
        'required': False,
        'coerce': 'duration_nullable',
        'type': 'integer',
        'nullable': True,
        'min': 0,
        'default': None,
    },
    check_locality={
        'required': False,
        'type': 'boolean',
        'nullable': True,
        'default': None,
    },
)


CONFIG_SCHEMA = {
    'service': {
        'required': False,
        'type': 'dict',
        'schema': SERVICE_SCHEMA,
        'default': {},
    },
    'idp': {
        'required': True,
        'type': 'dict',
        'schema': IDP_SCHEMA,
    },
    'sp': {
        'required': True,
        'type': 'dict',
        'schema': SP_SCHEMA,
    },
}


LOCAL_SCHEMA = {
    'signing_alias': {
        'required': True,
        'type': 'string',
        'regex': ALIAS_REGEX,
    },
    'encryption_alias': {
        'required': False,
        'type': 'string',
        'regex': ALIAS_REGEX,
        'nullable': True,
        'default': None,
    },
    'keystore': {
        'required': False,
        'type': 'string',
        'empty': False,
        'default': 'keystore.pem',
    },
    'default_landing': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    'artifact_ttl': duration(300, minimum=1),
    'logout_timeout': duration(60, minimum=1),
    'request_ttl': duration(300, minimum=1),
}


PATTERNS = {
    'type': 'list',
    'schema': {
        'type': 'string',
        'empty': False,
    },
}


POLICY_SCHEMA = {
    'sign_assertion': {
        'required': False,
        'type': 'boolean',
        'nullable': True,
        'default': None,
    },
    'sign_response': {
        'required': False,
        'type': 'boolean',
        'default': False,
    },
    'encrypt_assertion': {
        'required': False,
        'type': 'boolean',
        'nullable': True,
        'default': None,
    },
    'default_binding': {
        'required': False,
        'type': 'string',
        'allowed': sorted(BINDING_NAMES),
        'default': 'post',
    },
    'artifact_pair': {
        'required': False,
        'type': 'boolean',
        'default': False,
    },
    'check_locality': {
        'required': False,
        'type': 'boolean',
        'nullable': True,
        'default': None,
    },
    'clock_skew': duration(0),
    'validity': duration(300, minimum=1),
    'release': dict(PATTERNS, required=False, default=['*']),
    'withhold': dict(PATTERNS, required=False, default=[]),
    'relay_state_map': {
        'required': False,
        'type': 'dict',
        'default': {},
        'keysrules': {
            'type': 'string',
            'empty': False,
            'maxlength': 80,
        },
        'valuesrules': {
            'type': 'string',
            'empty': False,
        },
    },
    'require_signed_requests': {
        'required': False,
        'type': 'boolean',
        'nullable': True,
        'default': None,
    },
}


FLOWS = [
    'idp_initiated',
    'sp_initiated',
    'artifact',
    'artifact_pair',
    'single_logout',
]


FAULTS = [
    'tamper_signature',
    'strip_signature',
    'expire_window',
    'not_yet_valid',
    'wrong_audience',
    'wrong_recipient',
    'wrong_destination',
    'replay_assertion',
    'wrong_locality',
    'replay_artifact',
    'single_token_of_pair',
]


SCENARIO_SCHEMA = {
    'name': {
        'required': True,
        'type': 'string',
        'empty': False,
    },
    'flow': {
        'required': True,
        'type': 'string',
        'allowed': FLOWS,
    },
    'faults': {
        'required': False,
        'type': 'list',
        'default': [],
        'schema': {
            'type': 'string',
            'allowed': FAULTS,
        },
    },
    'expect': {
        'required': False,
        'type': 'string',
        'allowed': ['success', 'failure'],
        'nullable': True,
        'default': None,
    },
    'expect_step': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    'expect_outcome': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    'user': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
    'target': {
        'required': False,
        'type': 'string',
        'nullable': True,
        'default': None,
    },
}


SCENARIOS_SCHEMA = {
    'scenario': {
        'required': True,
        'type': 'list',
        'empty': False,
        'schema': {
            'type': 'dict',
            'schema': SCENARIO_SCHEMA,
        },
    },
}


class DurationValidator(Validator):
    """
    Cerberus validator that coerces durations to a number of seconds.

    Durations are given as integers (seconds), as
    :class:`datetime.timedelta` or as strings understood by the pytimeparse_
    library, like ``"5m"`` or ``"1h 30s"``.

    .. _pytimeparse: https://github.com/wroberts/pytimeparse
    """

    def _normalize_coerce_duration_nullable(self, value):
        if value is None:
            return None
        return self._normalize_coerce_duration(value)

    def _normalize_coerce_duration(self, value):
        if isinstance(value, bool):
            raise ValueError('A boolean is not a duration')

        if isinstance(value, int):
            return value

        if isinstance(value, timedelta):
            return int(value.total_seconds())

        seconds = parse_duration(value)
        if seconds is None:
            raise ValueError('Unable to parse duration {}'.format(value))

        return int(seconds)


__all__ = [
    'SLUG_REGEX',
    'CONFIG_SCHEMA',
    'LOCAL_SCHEMA',
    'POLICY_SCHEMA',
    'SCENARIO_SCHEMA',
    'SCENARIOS_SCHEMA',
    'FLOWS',
    'FAULTS',
    'DurationValidator',
]
