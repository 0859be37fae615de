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
XML codec for assertions, protocol messages and metadata.
"""

from .errors import (
    CodecError, MalformedXml, UnexpectedElement, UnknownBinding,
    MissingRequiredElement, UnknownRole, DuplicateDefaultAcs,
    DuplicateAcsIndex, BadTimestamp, PARSE_ERRORS,
)
from .xml import XmlElement, element, parse_xml, canonicalize, pretty
from .assertion import (
    assertion_to_element, element_to_assertion, emit_assertion,
    parse_assertion,
)
from .protocol import (
    response_to_element, element_to_response, emit_response, parse_response,
    authn_request_to_element, emit_authn_request, parse_authn_request,
    emit_logout, parse_logout, emit_artifact_message, element_to_message,
    parse_message, message_to_element, emit_message,
)
from .metadata import (
    Endpoint, IndexedEndpoint, EncryptionMethod, RequestedAttribute,
    LocalizedName, Organization, IdpSsoDescriptor, SpSsoDescriptor,
    EntityDescriptor, metadata_to_element, emit_metadata, parse_metadata,
)


__all__ = [
    'CodecError',
    'MalformedXml',
    'UnexpectedElement',
    'UnknownBinding',
    'MissingRequiredElement',
    'UnknownRole',
    'DuplicateDefaultAcs',
    'DuplicateAcsIndex',
    'BadTimestamp',
    'PARSE_ERRORS',
    'XmlElement',
    'element',
    'parse_xml',
    'canonicalize',
    'pretty',
    'assertion_to_element',
    'element_to_assertion',
    'emit_assertion',
    'parse_assertion',
    'response_to_element',
    'element_to_response',
    'emit_response',
    'parse_response',
    'authn_request_to_element',
    'emit_authn_request',
    'parse_authn_request',
    'emit_logout',
    'parse_logout',
    'emit_artifact_message',
    'element_to_message',
    'parse_message',
    'message_to_element',
    'emit_message',
    'Endpoint',
    'IndexedEndpoint',
    'EncryptionMethod',
    'RequestedAttribute',
    'LocalizedName',
    'Organization',
    'IdpSsoDescriptor',
    'SpSsoDescriptor',
    'EntityDescriptor',
    'metadata_to_element',
    'emit_metadata',
    'parse_metadata',
]
