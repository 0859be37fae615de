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
HTML pages rendered with Jinja2 from the package ``data/templates``
directory.
"""

from pathlib import Path
from functools import lru_cache

from jinja2 import Environment, FileSystemLoader, StrictUndefined


TEMPLATES_DIR = Path(__file__).resolve().parent / 'data' / 'templates'


@lru_cache(maxsize=1)
def environment():
    """
    Shared template environment. Autoescaping is always on.
    """
    return Environment(
        loader=FileSystemLoader(str(TEMPLATES_DIR)),
        autoescape=True,
        undefined=StrictUndefined,
        trim_blocks=True,
        lstrip_blocks=True,
    )


def render(template_name, **context):
    """
    Render a template.

    :param str template_name: File name in the templates directory.

    :rtype: str
    """
    return environment().get_template(template_name).render(**context)


__all__ = ['render']
