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
Namespaces available to ``{namespace.value}`` replacements in
configuration files.
"""

from re import match
from os import environ
from collections import namedtuple

from .schema import SLUG_REGEX
from .logging import get_logger


log = get_logger(__name__)


def namespace_env(path):
    """
    Environment variables whose names are valid Python identifiers.

    :param Path path: Path to the configuration file.

    :rtype: namedtuple
    """
    safe = sorted(key for key in environ if match(SLUG_REGEX, key))
    ignored = set(environ) - set(safe)
    if ignored:
        log.debug('Environment variables unsafe to load: {}'.format(
            sorted(ignored)
        ))

    env = namedtuple('env', safe)(**{key: environ[key] for key in safe})
    log.debug('env namespace loaded with {} variables'.format(len(safe)))
    return env


def namespace_config(path):
    """
    Information about the configuration file.

    Values available:

    - dir : Parent directory of the file.
    - ext : Extension of the file.
    - file : Complete filename.
    - name : Filename without the extension.

    :param Path path: Path to the configuration file.

    :rtype: namedtuple
    """
    config = namedtuple('config', ['dir', 'ext', 'file', 'name'])(
        dir=str(path.resolve().parent),
        ext=path.suffix,
        file=path.name,
        name=path.stem,
    )
    log.debug('config namespace: {}'.format(config))
    return config


def get_namespaces(path):
    """
    Get all replacement namespaces.

    - env : fetch data from the environment.
    - config : information about the configuration file.

    :param Path path: Path to the configuration file.

    :return: A dictionary mapping the name of each namespace to its values.
    :rtype: dict
    """
    return {
        'env': namespace_env(path),
        'config': namespace_config(path),
    }


__all__ = ['get_namespaces']
