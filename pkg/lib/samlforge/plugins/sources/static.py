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

Static
======

This source takes its users from the configuration itself. It is handy for
tests and demonstrations.

**Usage:**

.. code-block:: toml

    [idp.source]
    type = "static"

        [idp.source.config.users.jdoe]
        name_id = "the.user@mycompany.com"

            [idp.source.config.users.jdoe.attributes]
            clientId = "1234"
            uid = "the.user@mycompany.com"

users
-----

Users by user key. Attribute values can be a string or a list of strings.

- **Default**: ``N/A``
- **Optional**: ``False``
- **Schema**:

  .. code-block:: python3

     {
         'type': 'dict',
         'keysrules': {'type': 'string', 'empty': False},
         'valuesrules': {
             'type': 'dict',
             'schema': {
                 'name_id': {'type': 'string', 'empty': False},
                 'attributes': {'type': 'dict'},
             },
         },
     }

- **Secret**: ``False``

"""

from samlforge.core.types import Attribute
from samlforge.core.urns import NAMEID_UNSPECIFIED, ATTRNAME_BASIC
from samlforge.sources import Record, AttributeSource


USER_SCHEMA = {
    'name_id': {
        'required': True,
        'type': 'string',
        'empty': False,
    },
    'name_id_format': {
        'required': False,
        'type': 'string',
        'empty': False,
        'default': NAMEID_UNSPECIFIED,
    },
    'attributes': {
        'required': False,
        'type': 'dict',
        'default': {},
        'keysrules': {
            'type': 'string',
            'empty': False,
        },
        'valuesrules': {
            'type': ['string', 'list'],
            'schema': {
                'type': 'string',
            },
        },
    },
}


class StaticSource(AttributeSource):

    def declare_config(self, config):
        config.add_option(
            'users',
            schema={
                'type': 'dict',
                'keysrules': {
                    'type': 'string',
                    'empty': False,
                },
                'valuesrules': {
                    'type': 'dict',
                    'schema': USER_SCHEMA,
                },
            },
        )

    def load(self):
        for user_key, user in sorted(self.config.users.value.items()):
            attributes = []
            for name, values in user.get('attributes', {}).items():
                if isinstance(values, str):
                    values = [values]
                attributes.append(Attribute(
                    name=name,
                    friendly_name=None,
                    name_format=ATTRNAME_BASIC,
                    values=values,
                ))

            yield Record(
                user_key=user_key,
                name_id=user['name_id'],
                name_id_format=user.get('name_id_format', NAMEID_UNSPECIFIED),
                attributes=attributes,
            )


__all__ = ['StaticSource']
