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
Loading of configuration, registry and scenario files.

Files are TOML or JSON. String keys and values can reference the
namespaces of :func:`samlforge.namespaces.get_namespaces`, as in
``"{config.dir}/users.txt"`` or ``"{env.HOME}"``.
"""

from pathlib import Path

from toml import loads as toml_loads, TomlDecodeError
from ujson import loads as json_loads
from pprintpp import pformat

from .schema import DurationValidator, CONFIG_SCHEMA
from .logging import get_logger


log = get_logger(__name__)


class InvalidDocument(ValueError):
    """
    A configuration document that cannot be read or does not follow its
    schema.
    """

    code = 'InvalidDocument'

    def __init__(self, path, reason, errors=None):
        super().__init__('Invalid {}: {}'.format(path, reason))
        self.path = path
        self.reason = reason
        self.errors = errors


def replace_values(document, path):
    """
    Perform string replacement on both keys and values of an arbitrarily
    nested data structure.

    :param dict document: The document.
    :param Path path: Path to the file the document was read from.

    :rtype: dict
    """
    from .namespaces import get_namespaces

    namespaces = get_namespaces(path)

    def replace(obj):
        if isinstance(obj, str):
            try:
                return obj.format(**namespaces)
            except (KeyError, AttributeError, IndexError, ValueError) as e:
                raise InvalidDocument(
                    path, 'bad replacement in {!r}: {}'.format(obj, e)
                )

        if isinstance(obj, list):
            return [replace(element) for element in obj]

        if isinstance(obj, dict):
            return {
                replace(key): replace(value)
                for key, value in obj.items()
            }

        return obj

    return replace(document)


def validate_document(document, schema, path):
    """
    Validate and normalize a document against a schema.

    :raise InvalidDocument: if the document does not follow the schema.

    :return: The normalized document, with the default values of all
     optional keys.
    :rtype: dict
    """
    validator = DurationValidator(schema)
    validated = validator.validated(document)

    if validated is None:
        log.critical('Invalid document {}:\n{}'.format(
            path, pformat(validator.errors)
        ))
        raise InvalidDocument(
            path, 'schema validation failed', validator.errors
        )

    return validated


def load_json(path):
    return json_loads(path.read_text(encoding='utf-8'))


def load_toml(path):
    return toml_loads(path.read_text(encoding='utf-8'))


FORMATS = {
    '.toml': load_toml,
    '.json': load_json,
}


def load_file(path):
    """
    Read a TOML or JSON file, depending on its extension.

    :raise FileNotFoundError: if the file does not exist.
    :raise InvalidDocument: if the file cannot be parsed.

    :rtype: dict
    """
    path = Path(path)
    if path.suffix not in FORMATS:
        raise InvalidDocument(
            path, 'unknown format "{}", supported formats are {}'.format(
                path.suffix, sorted(FORMATS)
            )
        )

    if not path.is_file():
        raise FileNotFoundError('No such file {}'.format(path))

    try:
        document = FORMATS[path.suffix](path)
    except (TomlDecodeError, ValueError, UnicodeDecodeError) as e:
        log.critical('Unable to parse {}'.format(path))
        raise InvalidDocument(path, str(e))

    if not isinstance(document, dict):
        raise InvalidDocument(path, 'top level value must be a table')
    return document


def load_document(path, schema, replace=True):
    """
    Load, replace and validate a file.

    :param path: Path to the file.
    :param dict schema: Cerberus schema of the document.
    :param bool replace: Perform namespace replacements.

    :rtype: dict
    """
    path = Path(path)
    document = load_file(path)

    if replace:
        document = replace_values(document, path)

    validated = validate_document(document, schema, path)
    log.debug('Loaded {}:\n{}'.format(path, pformat(validated)))
    return validated


def load_config(path):
    """
    Load the service configuration file.

    :rtype: dict
    """
    config = load_document(path, CONFIG_SCHEMA)
    log.info('Configuration {} loaded and validated'.format(path))
    return config


__all__ = [
    'InvalidDocument',
    'replace_values',
    'validate_document',
    'load_file',
    'load_document',
    'load_config',
]
