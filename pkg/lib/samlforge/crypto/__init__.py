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
Key management, enveloped signatures and assertion sealing.
"""

from .errors import (
    CryptoError, KeyStoreNotFound, BadPassphrase, KeyCertMismatch,
    MalformedKeyStore, UnknownAlias, NoEncryptionCert, DecryptFailed,
)
from .keystore import (
    KeyEntry, KeyStore, certificate_der, load_certificate,
    generate_identity, parse_keystore, load_keystore, dump_keystore,
    save_keystore,
)
from .signature import (
    VerifyResult, ACCEPT, sign_element, verify_signature, verify_node,
)
from .encryption import encrypt_assertion, decrypt_assertion


__all__ = [
    'CryptoError',
    'KeyStoreNotFound',
    'BadPassphrase',
    'KeyCertMismatch',
    'MalformedKeyStore',
    'UnknownAlias',
    'NoEncryptionCert',
    'DecryptFailed',
    'KeyEntry',
    'KeyStore',
    'certificate_der',
    'load_certificate',
    'generate_identity',
    'parse_keystore',
    'load_keystore',
    'dump_keystore',
    'save_keystore',
    'VerifyResult',
    'ACCEPT',
    'sign_element',
    'verify_signature',
    'verify_node',
    'encrypt_assertion',
    'decrypt_assertion',
]
