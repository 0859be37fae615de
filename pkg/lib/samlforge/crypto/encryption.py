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
Assertion sealing.

The assertion is encrypted with AES-128-CBC and PKCS#7 padding under a fresh
content key and IV. An HMAC-SHA256 tag over ``iv || ciphertext`` is keyed by
a second fresh key. Both keys are wrapped together with RSA-OAEP under the
recipient's encryption certificate.
"""

from os import urandom

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.backends import default_backend
from cryptography.hazmat.primitives import hashes, hmac, padding as symmetric
from cryptography.hazmat.primitives.asymmetric import padding
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .errors import NoEncryptionCert, DecryptFailed
from ..core.types import EncryptedAssertion
from ..core.urns import ALG_AES128_CBC, ALG_RSA_OAEP
from ..logging import get_logger


log = get_logger(__name__)


KEY_SIZE = 16
MAC_KEY_SIZE = 32
IV_SIZE = 16
BLOCK_BITS = 128


def _oaep():
    return padding.OAEP(
        mgf=padding.MGF1(algorithm=hashes.SHA1()),
        algorithm=hashes.SHA1(),
        label=None,
    )


def _tag(mac_key, iv, ciphertext):
    tag = hmac.HMAC(mac_key, hashes.SHA256(), backend=default_backend())
    tag.update(iv + ciphertext)
    return tag


def _cipher(key, iv):
    return Cipher(
        algorithms.AES(key), modes.CBC(iv), backend=default_backend()
    )


def encrypt_assertion(assertion, recipient, store):
    """
    Seal assertion bytes for a recipient.

    :param bytes assertion: Canonical bytes of the (possibly signed)
     assertion.
    :param str recipient: Entity whose encryption certificate is used.
    :param KeyStore store: Keystore holding the recipient anchors.

    :raise NoEncryptionCert: if the recipient has no encryption certificate.

    :rtype: EncryptedAssertion
    """
    certificates = store.encryption_anchors(recipient)
    if not certificates:
        raise NoEncryptionCert(recipient)

    key = urandom(KEY_SIZE)
    mac_key = urandom(MAC_KEY_SIZE)
    iv = urandom(IV_SIZE)

    padder = symmetric.PKCS7(BLOCK_BITS).padder()
    padded = padder.update(assertion) + padder.finalize()

    encryptor = _cipher(key, iv).encryptor()
    ciphertext = encryptor.update(padded) + encryptor.finalize()

    encrypted_key = certificates[0].public_key().encrypt(
        key + mac_key, _oaep()
    )

    return EncryptedAssertion(
        algorithm=ALG_AES128_CBC,
        key_transport=ALG_RSA_OAEP,
        encrypted_key=encrypted_key,
        iv=iv,
        ciphertext=ciphertext,
        mac=_tag(mac_key, iv, ciphertext).finalize(),
    )


def _open(encrypted, private_key):
    keys = private_key.decrypt(encrypted.encrypted_key, _oaep())
    if len(keys) != KEY_SIZE + MAC_KEY_SIZE:
        raise ValueError('wrapped key has {} bytes'.format(len(keys)))
    key, mac_key = keys[:KEY_SIZE], keys[KEY_SIZE:]

    _tag(mac_key, encrypted.iv, encrypted.ciphertext).verify(encrypted.mac)

    decryptor = _cipher(key, encrypted.iv).decryptor()
    padded = decryptor.update(encrypted.ciphertext) + decryptor.finalize()

    unpadder = symmetric.PKCS7(BLOCK_BITS).unpadder()
    return unpadder.update(padded) + unpadder.finalize()


def decrypt_assertion(encrypted, store, key_alias=None):
    """
    Open a sealed assertion.

    :param EncryptedAssertion encrypted: The sealed assertion.
    :param KeyStore store: Keystore holding the private key.
    :param str key_alias: Entry to decrypt with. All entries are tried when
     not given.

    :raise DecryptFailed: for any failure, whatever the cause.

    :rtype: bytes
    """
    if (
        encrypted.algorithm != ALG_AES128_CBC or
        encrypted.key_transport != ALG_RSA_OAEP
    ):
        log.warning('Unsupported sealing algorithms {} / {}'.format(
            encrypted.algorithm, encrypted.key_transport
        ))
        raise DecryptFailed()

    if key_alias is not None:
        entries = [store.entry(key_alias)]
    else:
        entries = store.entries

    for entry in entries:
        try:
            return _open(encrypted, entry.private_key)
        except (ValueError, TypeError, InvalidSignature) as e:
            log.debug('Entry {} cannot open assertion: {}'.format(
                entry.alias, type(e).__name__
            ))

    raise DecryptFailed()


__all__ = [
    'encrypt_assertion',
    'decrypt_assertion',
]
