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

Records
=======

This source reads the users of the identity provider from a records file.

**Records file:**

One user per line: the user key, the name identifier and any number of
``name=value`` attribute pairs, separated by whitespace. Fields are split
with shell quoting rules, so values with spaces can be quoted. Repeating an
attribute name gives a multi-valued attribute. Blank lines and lines starting
with ``#`` are ignored.

.. code-block:: text

    # user-key name_id attributes
    jdoe the.user@mycompany.com clientId=1234 uid=the.user@mycompany.com
    asmith asmith@mycompany.com uid=asmith "cn=Alice Smith"

**Usage:**

.. code-block:: toml

    [idp.source]
    type = "records"

        [idp.source.config]
        path = "{config.dir}/users.txt"

path
----

Path to the records file.

- **Default**: ``N/A``
- **Optional**: ``False``
- **Schema**:

  .. code-block:: python3

     {
         'type': 'string',
         'empty': False,
     }

- **Secret**: ``False``

name_id_format
--------------

Format URN of the name identifiers in the file.

- **Default**: ``urn:oasis:names:tc:SAML:1.1:nameid-format:unspecified``
- **Optional**: ``True``
- **Schema**:

  .. code-block:: python3

     {
         'type': 'string',
         'empty': False,
     }

- **Secret**: ``False``

name_format
-----------

Name format URN given to every attribute.

- **Default**: ``urn:oasis:names:tc:SAML:2.0:attrname-format:basic``
- **Optional**: ``True``
- **Schema**:

  .. code-block:: python3

     {
         'type': 'string',
         'empty': False,
     }

- **Secret**: ``False``

"""  # noqa

from shlex import split
from pathlib import Path
from collections import OrderedDict

from samlforge.logging import get_logger
from samlforge.core.types import Attribute
from samlforge.sources import Record, AttributeSource
from samlforge.core.urns import NAMEID_UNSPECIFIED, ATTRNAME_BASIC


log = get_logger(__name__)


class MalformedRecords(ValueError):
    code = 'MalformedRecords'

    def __init__(self, path, lineno, reason):
        super().__init__('{}:{}: {}'.format(path, lineno, reason))
        self.path = path
        self.lineno = lineno
        self.reason = reason


def parse_records(content, path='<records>', name_id_format=None,
                  name_format=ATTRNAME_BASIC):
    """
    Parse the content of a records file.

    :param str content: Content of the file.
    :param str path: Path reported in errors.

    :raise MalformedRecords: for lines that do not follow the format.

    :return: A list of :class:`samlforge.sources.Record`.
    :rtype: list
    """
    records = []

    for lineno, line in enumerate(content.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith('#'):
            continue

        try:
            fields = split(stripped, comments=True)
        except ValueError as e:
            raise MalformedRecords(path, lineno, str(e))

        if len(fields) < 2:
            raise MalformedRecords(
                path, lineno, 'expected a user key and a name identifier'
            )

        user_key, name_id, *pairs = fields

        values = OrderedDict()
        for pair in pairs:
            name, separator, value = pair.partition('=')
            if not separator or not name:
                raise MalformedRecords(
                    path, lineno,
                    'expected name=value, got {!r}'.format(pair)
                )
            values.setdefault(name, []).append(value)

        records.append(Record(
            user_key=user_key,
            name_id=name_id,
            name_id_format=name_id_format,
            attributes=[
                Attribute(
                    name=name,
                    friendly_name=None,
                    name_format=name_format,
                    values=attribute_values,
                )
                for name, attribute_values in values.items()
            ],
        ))

    return records


class RecordsSource(AttributeSource):

    def declare_config(self, config):
        config.add_option(
            'path',
            schema={
                'type': 'string',
                'empty': False,
            },
        )

        config.add_option(
            'name_id_format',
            default=NAMEID_UNSPECIFIED,
            optional=True,
            schema={
                'type': 'string',
                'empty': False,
            },
        )

        config.add_option(
            'name_format',
            default=ATTRNAME_BASIC,
            optional=True,
            schema={
                'type': 'string',
                'empty': False,
            },
        )

    def load(self):
        path = Path(self.config.path.value)
        if not path.is_file():
            raise FileNotFoundError(
                'Records file {} not found'.format(path)
            )

        log.debug('Reading records from {}'.format(path))
        return parse_records(
            path.read_text(encoding='utf-8'),
            path=str(path),
            name_id_format=self.config.name_id_format.value,
            name_format=self.config.name_format.value,
        )


__all__ = ['MalformedRecords', 'parse_records', 'RecordsSource']
