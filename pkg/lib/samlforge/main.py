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
Application entry point module.
"""

import sys
from os import getpid

from setproctitle import setproctitle

from .logging import get_logger, print
from .inputs import InvalidDocument, load_config, load_file
from .config import ConfigurationError
from .crypto.errors import CryptoError
from .codec import PARSE_ERRORS
from .codec.metadata import parse_metadata
from .bindings import BindingError
from .registry import (
    RegistryError, describe_partner, load_registry, save_registry,
)
from .harness import (
    InconsistentScenario, Simulator, bootstrap, decode_capture,
    format_decoded, keygen, load_federation, load_scenarios, write_journal,
)
from .harness.service import FederationService


log = get_logger(__name__)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DECODE = 2
EXIT_MISMATCH = 3
EXIT_CONFIG = 4

LOADING_ERRORS = (
    InvalidDocument, ConfigurationError, CryptoError, RegistryError,
    FileNotFoundError,
)


def _diagnostic(error):
    return '{}: {}'.format(
        getattr(error, 'code', type(error).__name__), error
    )


def _read_capture(source):
    if source == '-':
        return sys.stdin.buffer.read()
    return source.read_bytes()


def cmd_decode(args):
    """
    Decode a captured message and print it.
    """
    metadata = None
    store = None
    try:
        if args.metadata is not None:
            metadata = parse_metadata(args.metadata.read_bytes())
        if args.registry_dir is not None:
            store = load_registry(args.registry_dir, args.passphrase).store
    except PARSE_ERRORS + LOADING_ERRORS as e:
        log.error('Unable to load decoding material')
        print(_diagnostic(e), fd='stderr')
        return EXIT_DECODE

    try:
        decoded = decode_capture(
            _read_capture(args.input), metadata=metadata, store=store
        )
    except (BindingError, CryptoError) + PARSE_ERRORS as e:
        log.error('Unable to decode {}'.format(args.input))
        print(_diagnostic(e), fd='stderr')
        return EXIT_DECODE

    print(format_decoded(decoded))
    return EXIT_OK


def cmd_simulate(args):
    """
    Run a scenario file and print one verdict per scenario.
    """
    try:
        config = load_config(args.config)
        scenarios = load_scenarios(args.scenarios)
        federation = load_federation(config)
    except LOADING_ERRORS + (InconsistentScenario,) as e:
        log.critical('Unable to set up the simulation')
        print(_diagnostic(e), fd='stderr')
        return EXIT_CONFIG

    skew = args.skew if args.skew is not None else config['sp']['skew']
    simulator = Simulator(
        federation,
        start=args.start,
        seed=args.seed,
        skew=skew,
        check_locality=config['sp']['check_locality'],
        user=config['service']['fixture_user'],
    )
    results = simulator.simulate(scenarios)

    for result in results:
        scenario = result.scenario
        print('{} {} [{}] {}'.format(
            'PASS' if result.passed else 'FAIL',
            scenario.name,
            scenario.flow,
            result.report.summary(),
        ))

    if args.journal is not None:
        write_journal(results, args.journal)

    failed = [result for result in results if not result.passed]
    print('{} scenarios, {} passed, {} failed'.format(
        len(results), len(results) - len(failed), len(failed)
    ))

    for result in failed:
        scenario = result.scenario
        print('{}: expected {} at {}, got {} at {}'.format(
            scenario.name,
            scenario.expect_outcome or scenario.expect,
            scenario.expect_step or '-',
            result.outcome,
            result.failed_step or '-',
        ), fd='stderr')

    return EXIT_MISMATCH if failed else EXIT_OK


def cmd_serve(args):
    """
    Serve the federation until interrupted.
    """
    try:
        config = load_config(args.config)
        service = FederationService(config)
    except LOADING_ERRORS as e:
        log.critical('Unable to start the service')
        print(_diagnostic(e), fd='stderr')
        return EXIT_CONFIG

    service.serve()
    return EXIT_OK


def cmd_metadata(args):
    """
    Import, export or list registry metadata.
    """
    try:
        registry = load_registry(args.registry_dir, args.passphrase)

        if args.action == 'import':
            policy = {}
            if args.policy is not None:
                policy = load_file(args.policy)
            partner = registry.register_partner(
                args.metadata.read_bytes(), settings=policy
            )
            save_registry(registry, args.registry_dir)
            print('Imported {}'.format(describe_partner(partner)))

        elif args.action == 'export':
            document = registry.export_metadata()
            if args.output is None:
                print(document.decode('utf-8').rstrip())
            else:
                with open(args.output, 'wb') as fd:
                    fd.write(document)
                log.info('Metadata written to {}'.format(args.output))

        else:
            for partner in registry.partners:
                print(describe_partner(partner))

    except LOADING_ERRORS as e:
        log.error('Metadata {} failed'.format(args.action))
        print(_diagnostic(e), fd='stderr')
        return EXIT_DECODE

    return EXIT_OK


def cmd_bootstrap(args):
    """
    Create a demo federation.
    """
    created = bootstrap(
        args.path,
        base_url=args.base_url,
        passphrase=args.passphrase,
        key_size=args.key_size,
    )
    print('Configuration: {}'.format(created.config))
    print('Scenarios: {}'.format(created.scenarios))
    print('Identity provider registry: {}'.format(created.idp))
    print('Service provider registry: {}'.format(created.sp))
    return EXIT_OK


def cmd_keygen(args):
    """
    Create a keystore with one entry.
    """
    if args.path.exists():
        log.error('Refusing to overwrite {}'.format(args.path))
        return EXIT_USAGE

    store = keygen(
        args.path, args.alias, args.common_name, args.passphrase,
        key_size=args.key_size,
    )
    print('Keystore {} created with {}'.format(
        args.path, ', '.join(store.aliases)
    ))
    return EXIT_OK


COMMANDS = {
    'decode': cmd_decode,
    'simulate': cmd_simulate,
    'serve': cmd_serve,
    'metadata': cmd_metadata,
    'bootstrap': cmd_bootstrap,
    'keygen': cmd_keygen,
}


def main(args):
    """
    Application main function.

    :param args: An arguments namespace.
    :type args: :py:class:`argparse.Namespace`

    :return: Exit code.
    :rtype: int
    """
    log.info('samlforge PID {} starting {} ...'.format(
        getpid(), args.command
    ))

    if args.command in ('serve', 'simulate'):
        setproctitle('samlforge - {}'.format(args.command))

    return COMMANDS[args.command](args)


__all__ = ['main']
