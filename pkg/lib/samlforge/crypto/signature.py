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
Enveloped signatures over canonical bytes.

The digest covers the canonical form of the signed element without its
``ds:Signature`` child. The signature value covers the canonical form of the
``ds:SignedInfo`` element. Both forms are produced by
:func:`samlforge.codec.xml.canonicalize`.

Trust is exact certificate pinning: a signature is accepted only when the
certificate that verifies it is one of the signing certificates registered
for the expected signer.
"""

from hashlib import sha256
from hmac import compare_digest
from collections import namedtuple

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.asymmetric import padding

from .keystore import certificate_der, load_certificate
from ..codec.xml import canonicalize
from ..codec.security import signed_info_element, element_to_signature
from ..core.types import Signature
from ..core.urns import ALG_SHA256, ALG_RSA_SHA256, ALG_C14N, NS_DSIG
from ..logging import get_logger


log = get_logger(__name__)


UNKNOWN_SIGNER = 'UnknownSigner'
UNSUPPORTED_ALGORITHM = 'UnsupportedAlgorithm'
REFERENCE_MISMATCH = 'ReferenceMismatch'
DIGEST_MISMATCH = 'DigestMismatch'
BAD_SIGNATURE_VALUE = 'BadSignatureValue'
UNTRUSTED_CERTIFICATE = 'UntrustedCertificate'


class VerifyResult(namedtuple('VerifyResult', ['accepted', 'reason'])):
    """
    Outcome of a signature verification.

    :var bool accepted: ``True`` for Accept.
    :var str reason: Rejection reason, ``None`` when accepted.
    """

    __slots__ = ()

    def __bool__(self):
        return self.accepted

    def __str__(self):
        if self.accepted:
            return 'Accept'
        return 'Reject({})'.format(self.reason)


ACCEPT = VerifyResult(True, None)


def reject(reason):
    return VerifyResult(False, reason)


def digest(element):
    return sha256(element).digest()


def signed_info_bytes(signature):
    """
    Canonical bytes of the SignedInfo described by a signature.
    """
    return canonicalize(signed_info_element(
        signature.reference_id,
        signature.digest_algorithm,
        signature.digest_value,
        signature.signature_algorithm,
        signature.canonicalization,
    ))


def sign_element(element, element_id, key_alias, store, embed=True):
    """
    Sign the canonical bytes of an element.

    :param bytes element: Canonical bytes of the element, without signature.
    :param str element_id: ID attribute of the element.
    :param str key_alias: Keystore entry to sign with.
    :param KeyStore store: The keystore.
    :param bool embed: Embed the signing certificate in the signature.

    :raise UnknownAlias: if the alias is not in the keystore.

    :rtype: Signature
    """
    if not element_id:
        raise ValueError('A signed element needs an ID')

    entry = store.entry(key_alias)
    unsigned = Signature(
        reference_id=element_id,
        digest_algorithm=ALG_SHA256,
        digest_value=digest(element),
        signature_algorithm=ALG_RSA_SHA256,
        signature_value=b'\x00',
        canonicalization=ALG_C14N,
    )
    value = entry.private_key.sign(
        signed_info_bytes(unsigned), padding.PKCS1v15(), hashes.SHA256()
    )
    return unsigned._replace(
        signature_value=value,
        certificate=certificate_der(entry.certificate) if embed else None,
    )


def _verifies(certificate, signature, signed_info):
    try:
        certificate.public_key().verify(
            signature.signature_value, signed_info,
            padding.PKCS1v15(), hashes.SHA256()
        )
    except (InvalidSignature, ValueError, TypeError, AttributeError):
        return False
    return True


def verify_signature(
        element, signature, expected_signer, store, element_id=None):
    """
    Verify a signature against the registered certificates of a signer.

    Rejection reasons are checked in this order: ``UnknownSigner``,
    ``UnsupportedAlgorithm``, ``ReferenceMismatch``, ``DigestMismatch``,
    ``BadSignatureValue``, ``UntrustedCertificate``.

    :param bytes element: Canonical bytes of the element, without signature.
    :param Signature signature: The signature.
    :param str expected_signer: Entity the signature must come from.
    :param KeyStore store: Keystore holding the trust anchors.
    :param str element_id: ID attribute of the element, checked against the
     signature reference when given.

    :rtype: VerifyResult
    """
    anchors = store.signing_anchors(expected_signer)
    if not anchors:
        return reject(UNKNOWN_SIGNER)

    if (
        signature.digest_algorithm != ALG_SHA256 or
        signature.signature_algorithm != ALG_RSA_SHA256 or
        signature.canonicalization != ALG_C14N
    ):
        return reject(UNSUPPORTED_ALGORITHM)

    if element_id is not None and element_id != signature.reference_id:
        return reject(REFERENCE_MISMATCH)

    if not compare_digest(digest(element), signature.digest_value):
        return reject(DIGEST_MISMATCH)

    signed_info = signed_info_bytes(signature)

    if signature.certificate is None:
        for anchor in anchors:
            if _verifies(anchor, signature, signed_info):
                return ACCEPT
        return reject(BAD_SIGNATURE_VALUE)

    try:
        certificate = load_certificate(signature.certificate)
    except ValueError:
        log.warning('Undecodable certificate in signature of {}'.format(
            signature.reference_id
        ))
        return reject(UNTRUSTED_CERTIFICATE)

    if not _verifies(certificate, signature, signed_info):
        return reject(BAD_SIGNATURE_VALUE)

    pinned = {certificate_der(anchor) for anchor in anchors}
    if signature.certificate not in pinned:
        return reject(UNTRUSTED_CERTIFICATE)

    return ACCEPT


def verify_node(node, expected_signer, store):
    """
    Verify the enveloped signature of a parsed element.

    :param XmlElement node: Element carrying a ``ds:Signature`` child.

    :return: The verification result, or ``None`` if the element is not
     signed.
    :rtype: VerifyResult
    """
    signature_node = node.find(NS_DSIG, 'Signature')
    if signature_node is None:
        return None

    return verify_signature(
        canonicalize(node.without(NS_DSIG, 'Signature')),
        element_to_signature(signature_node),
        expected_signer,
        store,
        element_id=node.get('ID'),
    )


__all__ = [
    'UNKNOWN_SIGNER',
    'UNSUPPORTED_ALGORITHM',
    'REFERENCE_MISMATCH',
    'DIGEST_MISMATCH',
    'BAD_SIGNATURE_VALUE',
    'UNTRUSTED_CERTIFICATE',
    'VerifyResult',
    'ACCEPT',
    'digest',
    'signed_info_bytes',
    'sign_element',
    'verify_signature',
    'verify_node',
]
