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
Test suite for key management, signatures and assertion sealing.
"""

from hashlib import sha256
from base64 import b64encode
from string import ascii_letters, digits

from pytest import fixture, mark, raises
from hypothesis import given, settings, strategies
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import padding

from samlforge.logging import setup_logging
from samlforge.crypto import (
    KeyEntry, KeyStore, KeyStoreNotFound, BadPassphrase, KeyCertMismatch,
    MalformedKeyStore, UnknownAlias, NoEncryptionCert, DecryptFailed,
    generate_identity, certificate_der, load_keystore, save_keystore,
    dump_keystore, parse_keystore, sign_element, verify_signature,
    verify_node, encrypt_assertion, decrypt_assertion,
)
from samlforge.codec import parse_xml, canonicalize, element
from samlforge.codec.security import signature_to_element
from samlforge.core.types import Signature
from samlforge.core.urns import (
    NS_DSIG, NS_ASSERTION, ALG_SHA256, ALG_RSA_SHA256,
)
from samlforge.crypto.signature import signed_info_bytes

from conftest import TEST_KEY_SIZE


IDP = 'mycompany:saml2.0'
SP = 'mypartner:saml2.0'

DOCUMENT = canonicalize(parse_xml(
    b'<saml:Assertion xmlns:saml="urn:oasis:names:tc:SAML:2.0:assertion" '
    b'ID="_a1" Version="2.0"><saml:Issuer>mycompany:saml2.0</saml:Issuer>'
    b'</saml:Assertion>'
))


def setup_module(module):
    setup_logging(verbosity=2)


@fixture(scope='module')
def signer():
    return KeyEntry('idp-signing', *generate_identity(IDP, TEST_KEY_SIZE))


@fixture(scope='module')
def impostor():
    return KeyEntry('idp-signing', *generate_identity(IDP, TEST_KEY_SIZE))


@fixture(scope='module')
def recipient():
    return KeyEntry('sp-encryption', *generate_identity(SP, TEST_KEY_SIZE))


def test_keystore_rejects_mismatched_key(signer, impostor):
    with raises(KeyCertMismatch):
        KeyStore([
            KeyEntry('broken', signer.certificate, impostor.private_key)
        ])


def test_keystore_rejects_duplicated_alias(signer, impostor):
    with raises(MalformedKeyStore):
        KeyStore([signer, impostor])


def test_keystore_entries(signer):
    store = KeyStore([signer])
    assert 'idp-signing' in store
    assert store.aliases == ['idp-signing']
    assert store.entry('idp-signing') is signer

    with raises(UnknownAlias):
        store.entry('nope')


def test_keystore_anchors_are_copies(signer):
    store = KeyStore([signer])
    anchored = store.with_anchors(SP, signing=[signer.certificate])

    assert store.signing_anchors(SP) == ()
    assert anchored.signing_anchors(SP) == (signer.certificate,)
    assert anchored.without_anchors(SP).signing_anchors(SP) == ()


def test_keystore_file(tmp_path, signer, recipient):
    path = tmp_path / 'keystore.pem'
    save_keystore(KeyStore([signer, recipient]), path, 'secret')

    loaded = load_keystore(path, 'secret')
    assert loaded.aliases == ['idp-signing', 'sp-encryption']
    assert certificate_der(loaded.entry('sp-encryption').certificate) == \
        certificate_der(recipient.certificate)

    with raises(BadPassphrase):
        load_keystore(path, 'wrong')

    with raises(KeyStoreNotFound):
        load_keystore(tmp_path / 'missing.pem', 'secret')


def test_keystore_comments_and_garbage(signer):
    content = dump_keystore(KeyStore([signer]), 'secret')

    commented = '# keys of the identity provider\n\n' + content
    assert parse_keystore(commented, 'secret').aliases == ['idp-signing']

    with raises(MalformedKeyStore):
        parse_keystore('garbage\n' + content, 'secret')


def test_sign_and_verify(signer):
    store = KeyStore([signer]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    signature = sign_element(DOCUMENT, '_a1', 'idp-signing', store)

    assert signature.reference_id == '_a1'
    assert signature.certificate == certificate_der(signer.certificate)

    result = verify_signature(DOCUMENT, signature, IDP, store)
    assert result
    assert result.reason is None


def test_verify_without_embedded_certificate(signer):
    store = KeyStore([signer]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    signature = sign_element(
        DOCUMENT, '_a1', 'idp-signing', store, embed=False
    )
    assert signature.certificate is None
    assert verify_signature(DOCUMENT, signature, IDP, store)


@mark.parametrize(['change', 'reason'], [
    ['signer', 'UnknownSigner'],
    ['algorithm', 'UnsupportedAlgorithm'],
    ['reference', 'ReferenceMismatch'],
    ['document', 'DigestMismatch'],
    ['value', 'BadSignatureValue'],
])
def test_verify_rejections(signer, change, reason):
    store = KeyStore([signer]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    signature = sign_element(DOCUMENT, '_a1', 'idp-signing', store)
    document = DOCUMENT
    expected_signer = IDP
    element_id = '_a1'

    if change == 'signer':
        expected_signer = SP
    elif change == 'algorithm':
        signature = signature._replace(
            digest_algorithm='http://www.w3.org/2000/09/xmldsig#sha1'
        )
    elif change == 'reference':
        element_id = '_other'
    elif change == 'document':
        document = DOCUMENT.replace(b'mycompany', b'mallory')
    elif change == 'value':
        value = bytearray(signature.signature_value)
        value[0] ^= 0xFF
        signature = signature._replace(signature_value=bytes(value))

    result = verify_signature(
        document, signature, expected_signer, store, element_id=element_id
    )
    assert not result
    assert result.reason == reason


def test_verify_untrusted_certificate(signer, impostor):
    # The impostor signs with a valid key that was never registered
    store = KeyStore([impostor]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    signature = sign_element(DOCUMENT, '_a1', 'idp-signing', store)

    result = verify_signature(DOCUMENT, signature, IDP, store)
    assert not result
    assert result.reason == 'UntrustedCertificate'


def test_verify_node(signer):
    store = KeyStore([signer]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    node = parse_xml(DOCUMENT)
    assert verify_node(node, IDP, store) is None

    signature = sign_element(DOCUMENT, '_a1', 'idp-signing', store)
    signed = node._replace(
        children=node.children + (signature_to_element(signature),)
    )
    assert signed.find(NS_DSIG, 'Signature') is not None
    assert verify_node(parse_xml(canonicalize(signed)), IDP, store)


@settings(max_examples=25, deadline=None)
@given(issuer=strategies.text(
    alphabet=ascii_letters + digits + ':.-', min_size=1, max_size=40
))
def test_signature_interoperates(signer, issuer):
    store = KeyStore([signer]).with_anchors(
        IDP, signing=[signer.certificate]
    )
    document = canonicalize(element(
        NS_ASSERTION, 'Assertion', {'ID': '_a1', 'Version': '2.0'},
        children=[element(NS_ASSERTION, 'Issuer', text=issuer)],
    ))

    # Signed here, checked with the bare primitives
    signature = sign_element(document, '_a1', 'idp-signing', store)
    signed_info = signed_info_bytes(signature)
    assert signature.digest_value == sha256(document).digest()
    assert b64encode(signature.digest_value) in signed_info
    signer.certificate.public_key().verify(
        signature.signature_value, signed_info,
        padding.PKCS1v15(), hashes.SHA256(),
    )

    # Signed with the bare primitives, checked here
    unsigned = Signature(
        '_a1', ALG_SHA256, sha256(document).digest(), ALG_RSA_SHA256, b'\0',
    )
    value = signer.private_key.sign(
        signed_info_bytes(unsigned), padding.PKCS1v15(), hashes.SHA256()
    )
    assert verify_signature(
        document, unsigned._replace(signature_value=value), IDP, store,
        element_id='_a1',
    )


def test_seal_and_open(signer, recipient):
    sender = KeyStore([signer]).with_anchors(
        SP, encryption=[recipient.certificate]
    )
    sealed = encrypt_assertion(DOCUMENT, SP, sender)
    assert DOCUMENT not in sealed.ciphertext
    assert len(sealed.iv) == 16

    receiver = KeyStore([recipient])
    assert decrypt_assertion(sealed, receiver) == DOCUMENT
    assert decrypt_assertion(
        sealed, receiver, key_alias='sp-encryption'
    ) == DOCUMENT


def test_seal_without_certificate(signer):
    with raises(NoEncryptionCert):
        encrypt_assertion(DOCUMENT, SP, KeyStore([signer]))


@mark.parametrize(['field'], [
    ['ciphertext'],
    ['mac'],
    ['encrypted_key'],
])
def test_open_tampered(signer, recipient, field):
    sender = KeyStore([signer]).with_anchors(
        SP, encryption=[recipient.certificate]
    )
    sealed = encrypt_assertion(DOCUMENT, SP, sender)
    value = bytearray(getattr(sealed, field))
    value[-1] ^= 0x01
    tampered = sealed._replace(**{field: bytes(value)})

    with raises(DecryptFailed):
        decrypt_assertion(tampered, KeyStore([recipient]))


def test_open_with_wrong_key(signer, recipient):
    sender = KeyStore([signer]).with_anchors(
        SP, encryption=[recipient.certificate]
    )
    sealed = encrypt_assertion(DOCUMENT, SP, sender)

    with raises(DecryptFailed):
        decrypt_assertion(sealed, KeyStore([signer]))
