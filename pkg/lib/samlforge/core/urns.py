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
URN and URI constants used across the federation.
"""

# Namespaces
NS_ASSERTION = 'urn:oasis:names:tc:SAML:2.0:assertion'
NS_PROTOCOL = 'urn:oasis:names:tc:SAML:2.0:protocol'
NS_METADATA = 'urn:oasis:names:tc:SAML:2.0:metadata'
NS_DSIG = 'http://www.w3.org/2000/09/xmldsig#'
NS_XENC = 'http://www.w3.org/2001/04/xmlenc#'
NS_XS = 'http://www.w3.org/2001/XMLSchema'
NS_XSI = 'http://www.w3.org/2001/XMLSchema-instance'
NS_SOAP = 'http://schemas.xmlsoap.org/soap/envelope/'
NS_XML = 'http://www.w3.org/XML/1998/namespace'

PROTOCOL_SUPPORT = NS_PROTOCOL

# Bindings
BINDING_POST = 'urn:oasis:names:tc:SAML:2.0:bindings:HTTP-POST'
BINDING_REDIRECT = 'urn:oasis:names:tc:SAML:2.0:bindings:HTTP-Redirect'
BINDING_ARTIFACT = 'urn:oasis:names:tc:SAML:2.0:bindings:HTTP-Artifact'
BINDING_SOAP = 'urn:oasis:names:tc:SAML:2.0:bindings:SOAP'

BINDINGS = frozenset((
    BINDING_POST,
    BINDING_REDIRECT,
    BINDING_ARTIFACT,
    BINDING_SOAP,
))

BINDING_NAMES = {
    'post': BINDING_POST,
    'redirect': BINDING_REDIRECT,
    'artifact': BINDING_ARTIFACT,
    'soap': BINDING_SOAP,
}

# Subject confirmation
CM_BEARER = 'urn:oasis:names:tc:SAML:2.0:cm:bearer'

# Name identifier formats
NAMEID_UNSPECIFIED = 'urn:oasis:names:tc:SAML:1.1:nameid-format:unspecified'
NAMEID_EMAIL = 'urn:oasis:names:tc:SAML:1.1:nameid-format:emailAddress'
NAMEID_PERSISTENT = 'urn:oasis:names:tc:SAML:2.0:nameid-format:persistent'
NAMEID_TRANSIENT = 'urn:oasis:names:tc:SAML:2.0:nameid-format:transient'
NAMEID_ENTITY = 'urn:oasis:names:tc:SAML:2.0:nameid-format:entity'

# Attribute name formats
ATTRNAME_BASIC = 'urn:oasis:names:tc:SAML:2.0:attrname-format:basic'
ATTRNAME_URI = 'urn:oasis:names:tc:SAML:2.0:attrname-format:uri'
ATTRNAME_UNSPECIFIED = \
    'urn:oasis:names:tc:SAML:2.0:attrname-format:unspecified'

# Authentication context
AC_PASSWORD_PROTECTED = (
    'urn:oasis:names:tc:SAML:2.0:ac:classes:PasswordProtectedTransport'
)

# Status codes
STATUS_PREFIX = 'urn:oasis:names:tc:SAML:2.0:status:'
STATUS_SUCCESS = STATUS_PREFIX + 'Success'
STATUS_REQUESTER = STATUS_PREFIX + 'Requester'
STATUS_RESPONDER = STATUS_PREFIX + 'Responder'
STATUS_VERSION_MISMATCH = STATUS_PREFIX + 'VersionMismatch'
STATUS_AUTHN_FAILED = STATUS_PREFIX + 'AuthnFailed'
STATUS_REQUEST_DENIED = STATUS_PREFIX + 'RequestDenied'

# Consent
CONSENT_UNSPECIFIED = 'urn:oasis:names:tc:SAML:2.0:consent:unspecified'

# Algorithms
ALG_SHA256 = 'http://www.w3.org/2001/04/xmlenc#sha256'
ALG_RSA_SHA256 = 'http://www.w3.org/2001/04/xmldsig-more#rsa-sha256'
ALG_AES128_CBC = 'http://www.w3.org/2001/04/xmlenc#aes128-cbc'
ALG_RSA_OAEP = 'http://www.w3.org/2001/04/xmlenc#rsa-oaep-mgf1p'
ALG_HMAC_SHA256 = 'http://www.w3.org/2001/04/xmldsig-more#hmac-sha256'
ALG_C14N = 'urn:samlforge:c14n:1.0'

# Metadata KeyDescriptor uses
USE_SIGNING = 'signing'
USE_ENCRYPTION = 'encryption'


__all__ = [key for key in list(globals()) if key.isupper()]
