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
Signature and encrypted assertion elements.
"""

from re import sub
from binascii import Error as BinasciiError
from base64 import b64decode, b64encode

from .xml import element
from .errors import MalformedXml, MissingRequiredElement, UnexpectedElement
from ..core.types import Signature, EncryptedAssertion, InvalidValue
from ..core.urns import NS_DSIG, NS_XENC, NS_ASSERTION


ELEMENT_TYPE = 'http://www.w3.org/2001/04/xmlenc#Element'

MAC_SIZE = 32
IV_SIZE = 16


def b64(data):
    return b64encode(data).decode('ascii')


def unb64(text, what):
    """
    Decode base64 text found in a document, ignoring whitespace.

    :raise MalformedXml: if the text is not valid base64.
    """
    if not text:
        raise MissingRequiredElement(what)
    try:
        return b64decode(sub(r'\s+', '', text), validate=True)
    except (BinasciiError, ValueError):
        raise MalformedXml('bad base64 in {}'.format(what))


def _required(node, namespace, name):
    child = node.find(namespace, name)
    if child is None:
        raise MissingRequiredElement(name)
    return child


def _only(node, allowed):
    for child in node.children:
        if (child.namespace, child.name) not in allowed:
            raise UnexpectedElement(child.display_name, node.display_name)


def signed_info_element(
        reference_id, digest_algorithm, digest_value,
        signature_algorithm, canonicalization):
    """
    Build the SignedInfo element, the part of a signature that is signed.
    """
    return element(NS_DSIG, 'SignedInfo', children=[
        element(NS_DSIG, 'CanonicalizationMethod', {
            'Algorithm': canonicalization,
        }),
        element(NS_DSIG, 'SignatureMethod', {
            'Algorithm': signature_algorithm,
        }),
        element(NS_DSIG, 'Reference', {
            'URI': '#' + reference_id,
        }, children=[
            element(NS_DSIG, 'DigestMethod', {
                'Algorithm': digest_algorithm,
            }),
            element(NS_DSIG, 'DigestValue', text=b64(digest_value)),
        ]),
    ])


def signature_to_element(signature):
    """
    :param Signature signature: The signature.

    :rtype: XmlElement
    """
    key_info = None
    if signature.certificate is not None:
        key_info = element(NS_DSIG, 'KeyInfo', children=[
            element(NS_DSIG, 'X509Data', children=[
                element(
                    NS_DSIG, 'X509Certificate',
                    text=b64(signature.certificate)
                ),
            ]),
        ])

    return element(NS_DSIG, 'Signature', children=[
        signed_info_element(
            signature.reference_id,
            signature.digest_algorithm,
            signature.digest_value,
            signature.signature_algorithm,
            signature.canonicalization,
        ),
        element(
            NS_DSIG, 'SignatureValue', text=b64(signature.signature_value)
        ),
        key_info,
    ])


def element_to_signature(node):
    """
    :param XmlElement node: A ``ds:Signature`` element.

    :raise MalformedXml: if the element is not a well formed signature.

    :rtype: Signature
    """
    _only(node, {
        (NS_DSIG, 'SignedInfo'),
        (NS_DSIG, 'SignatureValue'),
        (NS_DSIG, 'KeyInfo'),
    })
    signed_info = _required(node, NS_DSIG, 'SignedInfo')
    _only(signed_info, {
        (NS_DSIG, 'CanonicalizationMethod'),
        (NS_DSIG, 'SignatureMethod'),
        (NS_DSIG, 'Reference'),
    })

    canonicalization = _required(
        signed_info, NS_DSIG, 'CanonicalizationMethod'
    ).get('Algorithm')
    signature_algorithm = _required(
        signed_info, NS_DSIG, 'SignatureMethod'
    ).get('Algorithm')

    references = signed_info.findall(NS_DSIG, 'Reference')
    if len(references) != 1:
        raise MalformedXml('expected exactly one signature reference')
    reference = references[0]

    uri = reference.get('URI', '')
    if not uri.startswith('#') or len(uri) < 2:
        raise MalformedXml('unsupported reference URI {!r}'.format(uri))

    digest_algorithm = _required(
        reference, NS_DSIG, 'DigestMethod'
    ).get('Algorithm')
    digest_value = unb64(
        _required(reference, NS_DSIG, 'DigestValue').text, 'DigestValue'
    )
    signature_value = unb64(
        _required(node, NS_DSIG, 'SignatureValue').text, 'SignatureValue'
    )

    certificate = None
    key_info = node.find(NS_DSIG, 'KeyInfo')
    if key_info is not None:
        data = key_info.find(NS_DSIG, 'X509Data')
        if data is not None:
            cert = data.find(NS_DSIG, 'X509Certificate')
            if cert is not None:
                certificate = unb64(cert.text, 'X509Certificate')

    try:
        return Signature(
            reference_id=uri[1:],
            digest_algorithm=digest_algorithm,
            digest_value=digest_value,
            signature_algorithm=signature_algorithm,
            signature_value=signature_value,
            certificate=certificate,
            canonicalization=canonicalization,
        )
    except InvalidValue as e:
        raise MalformedXml(str(e))


def _cipher_data(value):
    return element(NS_XENC, 'CipherData', children=[
        element(NS_XENC, 'CipherValue', text=b64(value)),
    ])


def encrypted_to_element(encrypted):
    """
    :param EncryptedAssertion encrypted: The sealed assertion.

    :rtype: XmlElement
    """
    return element(NS_ASSERTION, 'EncryptedAssertion', children=[
        element(NS_XENC, 'EncryptedData', {'Type': ELEMENT_TYPE}, children=[
            element(NS_XENC, 'EncryptionMethod', {
                'Algorithm': encrypted.algorithm,
            }),
            element(NS_DSIG, 'KeyInfo', children=[
                element(NS_XENC, 'EncryptedKey', children=[
                    element(NS_XENC, 'EncryptionMethod', {
                        'Algorithm': encrypted.key_transport,
                    }),
                    _cipher_data(encrypted.encrypted_key),
                ]),
            ]),
            _cipher_data(encrypted.iv + encrypted.ciphertext + encrypted.mac),
        ]),
    ])


def _cipher_value(node, what):
    data = _required(node, NS_XENC, 'CipherData')
    return unb64(_required(data, NS_XENC, 'CipherValue').text, what)


def element_to_encrypted(node):
    """
    :param XmlElement node: A ``saml:EncryptedAssertion`` element.

    :raise MalformedXml: if the element is not a well formed sealed
     assertion.

    :rtype: EncryptedAssertion
    """
    _only(node, {(NS_XENC, 'EncryptedData'), (NS_XENC, 'EncryptedKey')})
    data = _required(node, NS_XENC, 'EncryptedData')

    algorithm = _required(data, NS_XENC, 'EncryptionMethod').get('Algorithm')

    key = None
    key_info = data.find(NS_DSIG, 'KeyInfo')
    if key_info is not None:
        key = key_info.find(NS_XENC, 'EncryptedKey')
    if key is None:
        key = node.find(NS_XENC, 'EncryptedKey')
    if key is None:
        raise MissingRequiredElement('EncryptedKey')

    key_transport = _required(
        key, NS_XENC, 'EncryptionMethod'
    ).get('Algorithm')
    encrypted_key = _cipher_value(key, 'EncryptedKey')

    blob = _cipher_value(data, 'EncryptedData')
    if len(blob) <= IV_SIZE + MAC_SIZE:
        raise MalformedXml('cipher value too short')

    try:
        return EncryptedAssertion(
            algorithm=algorithm,
            key_transport=key_transport,
            encrypted_key=encrypted_key,
            iv=blob[:IV_SIZE],
            ciphertext=blob[IV_SIZE:-MAC_SIZE],
            mac=blob[-MAC_SIZE:],
        )
    except InvalidValue as e:
        raise MalformedXml(str(e))


__all__ = [
    'b64',
    'unb64',
    'signed_info_element',
    'signature_to_element',
    'element_to_signature',
    'encrypted_to_element',
    'element_to_encrypted',
]
