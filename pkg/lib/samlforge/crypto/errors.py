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
Exceptions raised by key management and assertion sealing.
"""


class CryptoError(Exception):
    """
    Base class of all key management and sealing errors.
    """

    code = 'CryptoError'


class KeyStoreNotFound(CryptoError, FileNotFoundError):
    code = 'FileNotFound'

    def __init__(self, path):
        super().__init__('No keystore found at {}'.format(path))
        self.path = path


class BadPassphrase(CryptoError):
    code = 'BadPassphrase'

    def __init__(self, alias):
        super().__init__(
            'Unable to decrypt private key of entry {}'.format(alias)
        )
        self.alias = alias


class KeyCertMismatch(CryptoError):
    code = 'KeyCertMismatch'

    def __init__(self, alias):
        super().__init__(
            'Private key of entry {} does not match its certificate'.format(
                alias
            )
        )
        self.alias = alias


class MalformedKeyStore(CryptoError):
    code = 'MalformedKeyStore'

    def __init__(self, reason):
        super().__init__('Malformed keystore: {}'.format(reason))
        self.reason = reason


class UnknownAlias(CryptoError, KeyError):
    code = 'UnknownAlias'

    def __init__(self, alias):
        super().__init__('No keystore entry with alias {}'.format(alias))
        self.alias = alias

    def __str__(self):
        return self.args[0]


class NoEncryptionCert(CryptoError):
    code = 'NoEncryptionCert'

    def __init__(self, recipient):
        super().__init__(
            'No encryption certificate registered for {}'.format(recipient)
        )
        self.recipient = recipient


class DecryptFailed(CryptoError):
    """
    Raised for any decryption failure. The cause is only logged.
    """

    code = 'DecryptFailed'

    def __init__(self):
        super().__init__('Unable to decrypt assertion')


__all__ = [
    'CryptoError',
    'KeyStoreNotFound',
    'BadPassphrase',
    'KeyCertMismatch',
    'MalformedKeyStore',
    'UnknownAlias',
    'NoEncryptionCert',
    'DecryptFailed',
]
