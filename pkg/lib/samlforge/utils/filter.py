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
Attribute release filtering with shell style patterns.
"""

from fnmatch import fnmatchcase


def included_in(value, patterns):
    """
    Check if the given value matches any of the given patterns.

    Matching is case sensitive on every platform.

    :param str value: The value to check for.
    :param list patterns: List of patterns to check for.

    :return: True if the value matches, False otherwise.
    :rtype: bool
    """
    return any(fnmatchcase(value, pattern) for pattern in patterns)


def filter_attributes(attributes, release, withhold):
    """
    Select the attributes released to a partner.

    An attribute is released when its name or its friendly name is wanted.

    :param list attributes: :class:`samlforge.core.types.Attribute` list.
    :param list release: Patterns of attribute names to release.
    :param list withhold: Patterns of attribute names never released.

    :return: The released attributes, in their original order.
    :rtype: list
    """
    def wanted(attribute):
        names = [attribute.name]
        if attribute.friendly_name:
            names.append(attribute.friendly_name)

        if any(included_in(name, withhold) for name in names):
            return False
        return any(included_in(name, release) for name in names)

    return [attribute for attribute in attributes if wanted(attribute)]


__all__ = [
    'included_in',
    'filter_attributes',
]
