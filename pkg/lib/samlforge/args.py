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
Argument management module.
"""

from pathlib import Path

from pytimeparse import parse as parse_duration

from . import __version__
from .core.instant import BadTimestamp, parse_instant
from .logging import get_logger, setup_logging


log = get_logger(__name__)


def _require_file(path):
    path = Path(path)
    if not path.is_file():
        log.error('No such file {}'.format(path))
        exit(1)
    return path.resolve()


def _require_directory(path):
    path = Path(path)
    if not path.is_dir():
        log.error('No such directory {}'.format(path))
        exit(1)
    return path.resolve()


def validate_args(args):
    """
    Validate that arguments are valid.

    :param args: An arguments namespace.
    :type args: :py:class:`argparse.Namespace`

    :return: The validated namespace.
    :rtype: :py:class:`argparse.Namespace`
    """
    setup_logging(args.verbose)
    log.debug('Raw arguments:\n{}'.format(args))

    if getattr(args, 'config', None) is not None:
        args.config = _require_file(args.config)

    if getattr(args, 'registry_dir', None) is not None and \
            args.command != 'bootstrap':
        args.registry_dir = _require_directory(args.registry_dir)

    if args.command == 'decode':
        if args.input != '-':
            args.input = _require_file(args.input)
        if args.metadata is not None:
            args.metadata = _require_file(args.metadata)

    if args.command == 'simulate':
        args.scenarios = _require_file(args.scenarios)

        if args.skew is not None:
            skew = parse_duration(args.skew)
            if skew is None and args.skew.isdigit():
                skew = int(args.skew)
            if skew is None or skew < 0:
                log.error('Invalid clock skew {}'.format(args.skew))
                exit(1)
            args.skew = int(skew)

        if args.start is not None:
            try:
                args.start = parse_instant(args.start)
            except BadTimestamp as e:
                log.error(str(e))
                exit(1)

        if args.journal is not None:
            args.journal = Path(args.journal)

    if args.command == 'metadata' and args.action == 'import':
        if args.metadata is None:
            log.error('No metadata file to import')
            exit(1)
        args.metadata = _require_file(args.metadata)
        if args.policy is not None:
            args.policy = _require_file(args.policy)

    if args.command in ('bootstrap', 'keygen'):
        args.path = Path(args.path)

    return args


def parse_args(argv=None):
    """
    Argument parsing routine.

    :param argv: A list of argument strings.
    :type argv: list

    :return: A parsed and verified arguments namespace.
    :rtype: :py:class:`argparse.Namespace`
    """
    from argparse import ArgumentParser

    parser = ArgumentParser(
        description=(
            'samlforge is a SAML 2.0 web single sign-on toolkit: identity and '
            'service provider engines, capture decoding, a fault injecting '
            'simulator and a live federation service.'
        )
    )
    parser.add_argument(
        '-v', '--verbose',
        help='Increase verbosity level',
        default=0,
        action='count'
    )
    parser.add_argument(
        '--version',
        action='version',
        version='samlforge v{}'.format(__version__)
    )

    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    # Decode
    decode = subparsers.add_parser(
        'decode', help='Decode a captured POST body or redirect URL'
    )
    decode.add_argument(
        'input',
        nargs='?',
        default='-',
        help='File with the capture, standard input by default'
    )
    decode.add_argument(
        '--metadata',
        help='Service provider metadata to compare the attributes with'
    )
    decode.add_argument(
        '--registry-dir',
        help='Registry whose keystore decrypts encrypted assertions'
    )
    decode.add_argument(
        '--passphrase',
        help='Passphrase of the registry keystore'
    )

    # Simulate
    simulate = subparsers.add_parser(
        'simulate', help='Run scenarios against an in process federation'
    )
    simulate.add_argument(
        'scenarios',
        help='Scenario file'
    )
    simulate.add_argument(
        '--config',
        required=True,
        help='Service configuration file'
    )
    simulate.add_argument(
        '--seed',
        type=int,
        default=None,
        help='Seed of the fault injection choices'
    )
    simulate.add_argument(
        '--skew',
        default=None,
        help='Clock skew of the service provider, as in 30 or 30s'
    )
    simulate.add_argument(
        '--start',
        default=None,
        help='Simulated start instant, as in 2006-02-01T12:30:00Z'
    )
    simulate.add_argument(
        '--journal',
        default=None,
        help='File to write the trace of every scenario to, as JSON'
    )

    # Serve
    serve = subparsers.add_parser(
        'serve', help='Serve both parties of a federation over HTTP'
    )
    serve.add_argument(
        '--config',
        required=True,
        help='Service configuration file'
    )

    # Metadata
    metadata = subparsers.add_parser(
        'metadata', help='Import and export registry metadata'
    )
    metadata.add_argument(
        'action',
        choices=['import', 'export', 'list'],
        help='What to do'
    )
    metadata.add_argument(
        'metadata',
        nargs='?',
        default=None,
        help='Metadata file to import'
    )
    metadata.add_argument(
        '--registry-dir',
        required=True,
        help='Registry directory'
    )
    metadata.add_argument(
        '--passphrase',
        required=True,
        help='Passphrase of the registry keystore'
    )
    metadata.add_argument(
        '--policy',
        default=None,
        help='TOML file with explicit policy values for an import'
    )
    metadata.add_argument(
        '--output',
        default=None,
        help='File to export to, standard output by default'
    )

    # Bootstrap
    bootstrap = subparsers.add_parser(
        'bootstrap', help='Create a demo federation'
    )
    bootstrap.add_argument(
        'path',
        help='Directory to create the federation in'
    )
    bootstrap.add_argument(
        '--base-url',
        default='http://127.0.0.1:8080',
        help='URL the service will be reachable at'
    )
    bootstrap.add_argument(
        '--passphrase',
        default='secret',
        help='Passphrase of the generated keystores'
    )
    bootstrap.add_argument(
        '--key-size',
        type=int,
        default=2048,
        help='RSA modulus size of the generated keys'
    )

    # Keygen
    keygen = subparsers.add_parser(
        'keygen', help='Create a keystore with one fresh entry'
    )
    keygen.add_argument(
        'path',
        help='Keystore file to write'
    )
    keygen.add_argument(
        '--alias',
        required=True,
        help='Alias of the entry'
    )
    keygen.add_argument(
        '--common-name',
        required=True,
        help='Common name of the self signed certificate'
    )
    keygen.add_argument(
        '--passphrase',
        required=True,
        help='Passphrase to encrypt the private key with'
    )
    keygen.add_argument(
        '--key-size',
        type=int,
        default=2048,
        help='RSA modulus size'
    )

    args = parser.parse_args(argv)
    args = validate_args(args)
    return args


__all__ = ['parse_args']
