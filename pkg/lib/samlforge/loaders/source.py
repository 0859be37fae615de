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
Discovery of the attribute source plugins.

Installed packages provide sources through the
``samlforge_plugin_attribute_sources_1_0`` entry point group. Sources can
also be registered from code with :func:`register`:

::

    from samlforge.loaders import register
    from samlforge.sources import Record, AttributeSource

    @register('directory')
    class DirectorySource(AttributeSource):
        def load(self):
            return [Record('jdoe', 'jdoe@example.com', None)]
"""

from inspect import isclass
from threading import Lock
from collections import OrderedDict

from pkg_resources import iter_entry_points

from ..sources import AttributeSource
from ..logging import get_logger


log = get_logger(__name__)


ENTRY_POINT = 'samlforge_plugin_attribute_sources_1_0'


class UnknownSourceType(ValueError):
    code = 'UnknownSourceType'

    def __init__(self, type_, available):
        super().__init__(
            'Unknown attribute source of type "{}". Available: {}'.format(
                type_, ', '.join(available) or 'none'
            )
        )
        self.type = type_


def is_source(plugin):
    return isclass(plugin) and issubclass(plugin, AttributeSource)


class AttributeSourcesLoader:
    """
    Registry of the attribute source classes by type key.

    Entry points are scanned once. Locally registered sources shadow
    installed ones with the same key.

    :param str group: Entry point group to scan.
    """

    _registered = OrderedDict()

    def __init__(self, group=ENTRY_POINT):
        self.group = group
        self._installed = None
        self._lock = Lock()

    @classmethod
    def register(cls, key):
        """
        Class decorator registering an attribute source under a type key.

        :param str key: Type key, as used in ``[idp.source] type``.
        """
        def decorator(plugin):
            if not is_source(plugin):
                raise ValueError(
                    'Source {} is not a subclass of {}'.format(
                        key, AttributeSource.__name__
                    )
                )
            cls._registered[key] = plugin
            return plugin
        return decorator

    def installed(self):
        """
        Sources declared by installed packages.

        Entry points that fail to import or do not provide an
        :class:`AttributeSource` are logged and left out.

        :rtype: OrderedDict
        """
        with self._lock:
            if self._installed is not None:
                return self._installed

            installed = OrderedDict()
            log.debug('Scanning entry points {}'.format(self.group))

            for entry in iter_entry_points(group=self.group):
                try:
                    plugin = entry.load()
                except Exception:
                    log.exception('Unable to load attribute source {}'.format(
                        entry.name
                    ))
                    continue

                if not is_source(plugin):
                    log.error(
                        'Ignoring attribute source {}: {!r} is not a '
                        'subclass of {}'.format(
                            entry.name, plugin, AttributeSource.__name__
                        )
                    )
                    continue

                installed[entry.name] = plugin

            self._installed = installed
            return installed

    def available(self):
        """
        Every known source, by type key.

        :rtype: OrderedDict
        """
        available = OrderedDict(self.installed())
        for key, plugin in self._registered.items():
            if key in available and available[key] is not plugin:
                log.warning(
                    'Attribute source {} shadows installed {}'.format(
                        plugin, available[key]
                    )
                )
            available[key] = plugin
        return available

    def create(self, type_, config=None):
        """
        Create an attribute source.

        :param str type_: Type key of the source, as in ``records``.
        :param dict config: User configuration of the source.

        :raise UnknownSourceType: if no source is known by that key.

        :rtype: :class:`samlforge.sources.AttributeSource`
        """
        available = self.available()
        if type_ not in available:
            raise UnknownSourceType(type_, list(available))

        clss = available[type_]
        log.info('Creating attribute source {} of type "{}"'.format(
            clss, type_
        ))
        try:
            return clss(type_, config=config)
        except Exception:
            log.critical('Unable to create attribute source {} ({})'.format(
                type_, clss
            ))
            raise


_LOADER = AttributeSourcesLoader()


def register(key):
    return AttributeSourcesLoader.register(key)


def create_source(type_, config=None):
    return _LOADER.create(type_, config=config)


__all__ = [
    'ENTRY_POINT',
    'UnknownSourceType',
    'AttributeSourcesLoader',
    'register',
    'create_source',
]
