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
Thread safe logging management module.

The federation engines run inside a threaded HTTP service, so a single
colored stream handler is installed on the root logger and every module uses
a named child logger.

The verbosity can be raised with ``-v`` flags or overridden with the
``SAMLFORGE_LOG`` environment variable, which accepts a level name:

.. code-block:: sh

    SAMLFORGE_LOG=debug samlforge simulate scenarios.toml
"""

import sys
import logging
from os import environ
from functools import wraps
from threading import Lock

from colorlog import ColoredFormatter


log = logging.getLogger(__name__)

ENVIRONMENT_VARIABLE = 'SAMLFORGE_LOG'


def threaded_except_hook(exctype, value, traceback):
    """
    Unhandled exception hook that sends the exception to the log.
    """
    log.critical(
        'Uncaught exception',
        exc_info=(exctype, value, traceback)
    )


class LoggingManager:
    """
    Logging manager class.

    This class is expected to run as a singleton. It installs one colored
    stream handler on the root logger and serializes the prints performed by
    the command line interface so they don't interleave with log lines.
    """

    FORMAT = (
        '  {log_color}{levelname:8}{reset} | '
        '{log_color}{message}{reset}'
    )
    FORMAT_DEBUG = (
        '  {log_color}{levelname:8}{reset} | '
        '{threadName} - {log_color}{message}{reset}'
    )

    LEVELS = {
        0: logging.ERROR,
        1: logging.WARNING,
        2: logging.INFO,
        3: logging.DEBUG,
    }

    def __init__(self):
        self._handler = None
        self._print_lock = Lock()

    def level_for(self, verbosity):
        """
        Determine the logging level to use.

        The ``SAMLFORGE_LOG`` environment variable takes precedence over the
        verbosity count. Unknown level names are ignored.

        :param int verbosity: Verbosity level, as defined by
         ``LoggingManager.LEVELS``.

        :return: A logging level.
        :rtype: int
        """
        override = environ.get(ENVIRONMENT_VARIABLE, '').strip().upper()
        if override:
            level = logging.getLevelName(override)
            if isinstance(level, int):
                return level

        return self.LEVELS.get(verbosity, logging.DEBUG)

    def setup_logging(self, verbosity=0):
        """
        Setup logging for this process.

        The first call installs the handler, further calls only adjust the
        level and format.

        :param int verbosity: Verbosity level, as defined by
         ``LoggingManager.LEVELS``. The greater the number the more information
         is provided, with 0 as initial level.
        """
        level = self.level_for(verbosity)

        if level != logging.DEBUG:
            format_tpl = self.FORMAT
        else:
            format_tpl = self.FORMAT_DEBUG
        formatter = ColoredFormatter(fmt=format_tpl, style='{')

        root = logging.getLogger()

        if self._handler is None:
            sys.excepthook = threaded_except_hook

            self._handler = logging.StreamHandler()
            root.addHandler(self._handler)

        self._handler.setFormatter(formatter)
        root.setLevel(level)

    def print(self, obj, fd='stdout'):
        """
        Print to the given fd.

        :param obj: Object to print.
        :param str fd: Name of the file descriptor.
         Either stdout or stderr only.
        """
        stream = {
            'stdout': sys.stdout,
            'stderr': sys.stderr,
        }.get(fd)

        if stream is None:
            log.error('Unknown fd to print to: {}'.format(fd))
            return

        with self._print_lock:
            stream.write(str(obj) + '\n')
            stream.flush()


_INSTANCE = LoggingManager()


@wraps(_INSTANCE.setup_logging)
def setup_logging(verbosity=0):
    _INSTANCE.setup_logging(verbosity=verbosity)


@wraps(_INSTANCE.print)
def print(obj, fd='stdout'):
    _INSTANCE.print(obj, fd=fd)


def get_logger(name):
    """
    Return a named logger.

    :param str name: Name of the logger.

    :return: A logger.
    :rtype: :py:class:`logging.Logger`.
    """
    return logging.getLogger(name)


__all__ = ['setup_logging', 'print', 'get_logger']
