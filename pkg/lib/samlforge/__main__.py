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
Console entry point of the ``samlforge`` command.
"""

from sys import exit

from setproctitle import setproctitle


def run(argv=None):
    """
    Parse the command line, run the requested command and exit with its
    code.

    :param list argv: Arguments, ``sys.argv[1:]`` when ``None``.
    """
    setproctitle('samlforge')

    from .args import parse_args
    from .main import main

    exit(main(parse_args(argv)))


if __name__ == '__main__':
    run()


__all__ = ['run']
