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
Base class of the attribute sources.

An attribute source maps the key of an authenticated user to the name
identifier and the attributes the identity provider asserts about them. All
custom sources must extend from the :class:`AttributeSource` class and
implement :meth:`AttributeSource.load`.
"""

from threading import Lock
from collections import namedtuple
from abc import ABCMeta, abstractmethod

from ..config import Configurator
from ..logging import get_logger
from ..core.types import Attribute
from ..idp.errors import UnknownUser


log = get_logger(__name__)


class Record(namedtuple(
        'Record', ['user_key', 'name_id', 'name_id_format', 'attributes'])):
    """
    What an attribute source knows about one user.

    :var str user_key: Key the user is looked up by.
    :var str name_id: Name identifier asserted for the user.
    :var str name_id_format: Format URN of the name identifier, or ``None``.
    :var tuple attributes: Tuple of
     :class:`samlforge.core.types.Attribute`.
    """

    __slots__ = ()

    def __new__(cls, user_key, name_id, name_id_format, attributes=()):
        if not user_key:
            raise ValueError('Empty user key')
        if not name_id:
            raise ValueError('Empty name identifier for {}'.format(user_key))
        attributes = tuple(attributes)
        for attribute in attributes:
            if not isinstance(attribute, Attribute):
                raise ValueError('Bad attribute {!r} for {}'.format(
                    attribute, user_key
                ))
        return super().__new__(
            cls, user_key, name_id, name_id_format, attributes
        )


class NamedABCMeta(ABCMeta):
    """
    Metaclass for abstract classes that pretty print the name of the class.
    """

    def __str__(cls):  # noqa: N805
        return cls.__name__

    def __repr__(cls):  # noqa: N805
        return str(cls)


class AttributeSource(metaclass=NamedABCMeta):
    """
    Main base class to implement an attribute source.

    Records are loaded once, on the first lookup, and kept for the lifetime
    of the source, so lookups are deterministic.

    **Properties**:

    :var str type: Type key this source was created with.
    :var namedtuple AttributeSource.config: Frozen configuration after
     validation.

    **Parameters**:

    :param str type_: Type key used to fetch this source.
    :param dict config: User configuration for this source.
    """

    def __init__(self, type_, config=None):
        self._type = type_
        self._records = None
        self._lock = Lock()

        configurator = Configurator()
        self.declare_config(configurator)

        self.config = configurator.validate(config or {})

    @property
    def type(self):
        return self._type

    def declare_config(self, config):
        """
        Declare the configuration options of this source.

        :param config: The configuration manager for this source.
        :type config: :class:`samlforge.config.Configurator`
        """
        pass

    @abstractmethod
    def load(self):
        """
        Load all the records of this source.

        All sources subclasses must implement this abstract method.

        :return: An iterable of :class:`Record`.
        """
        pass

    def records(self):
        """
        Records of this source, by user key.

        :raise ValueError: if two records share a user key.

        :rtype: dict
        """
        with self._lock:
            if self._records is None:
                records = {}
                for record in self.load():
                    if record.user_key in records:
                        raise ValueError(
                            'Source {} has two records for user {}'.format(
                                self, record.user_key
                            )
                        )
                    records[record.user_key] = record

                log.info('Source {} loaded {} records'.format(
                    self, len(records)
                ))
                self._records = records

            return self._records

    def lookup(self, user_key):
        """
        Fetch the record of a user.

        :param str user_key: Key of the user.

        :raise UnknownUser: if the source has no record for the user.

        :rtype: Record
        """
        record = self.records().get(user_key)
        if record is None:
            raise UnknownUser(user_key)
        return record

    def __str__(self):
        return '{}.{}'.format(self.__class__.__name__, self._type)

    def __repr__(self):
        return str(self)


__all__ = [
    'Record',
    'NamedABCMeta',
    'AttributeSource',
]
