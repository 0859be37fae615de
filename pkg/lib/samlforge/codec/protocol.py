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
Protocol messages codec: responses, authentication requests, logout and
artifact resolution messages.
"""

from .xml import element, parse_xml, canonicalize, strict_children
from .errors import MalformedXml, MissingRequiredElement
from .assertion import (
    SAML_VERSION,
    required_attribute, instant_attribute, check_version, single,
    required_text, issuer_element, signature_or_none,
    assertion_to_element, element_to_assertion,
)
from .security import (
    encrypted_to_element, element_to_encrypted, element_to_signature,
)
from ..core.instant import format_instant
from ..core.urns import NS_ASSERTION, NS_PROTOCOL, NS_DSIG
from ..core.types import (
    InvalidValue, EncryptedAssertion, Response, AuthnRequest,
    LogoutRequest, LogoutResponse, ArtifactResolve, ArtifactResponse,
)


def _header(message, **extra):
    attributes = {
        'ID': message.id,
        'IssueInstant': format_instant(message.issue_instant),
        'Version': SAML_VERSION,
    }
    attributes.update(extra)
    return attributes


def _status_element(status):
    return element(NS_PROTOCOL, 'Status', children=[
        element(NS_PROTOCOL, 'StatusCode', {'Value': status}),
    ])


def _parse_status(node):
    found, _ = strict_children(node, {
        (NS_PROTOCOL, 'StatusCode'),
    }, ignored={
        (NS_PROTOCOL, 'StatusMessage'),
        (NS_PROTOCOL, 'StatusDetail'),
    })
    code = single(found, NS_PROTOCOL, 'StatusCode', 'Status')
    # Second level status codes are informative only
    strict_children(code, {(NS_PROTOCOL, 'StatusCode')})
    return required_attribute(code, 'Value')


def _signature(found, parent):
    signature = single(found, NS_DSIG, 'Signature', parent, required=False)
    if signature is None:
        return None
    return element_to_signature(signature)


def _expect(node, name):
    if not node.is_a(NS_PROTOCOL, name):
        raise MalformedXml('expected samlp:{}, got {}'.format(
            name, node.display_name
        ))
    check_version(node)


def _wrap(builder, node):
    try:
        return builder(node)
    except InvalidValue as e:
        raise MalformedXml(str(e))


# Response

def response_to_element(response):
    """
    :param Response response: The response.

    :rtype: XmlElement
    """
    assertion = None
    if isinstance(response.assertion, EncryptedAssertion):
        assertion = encrypted_to_element(response.assertion)
    elif response.assertion is not None:
        assertion = assertion_to_element(response.assertion)

    return element(NS_PROTOCOL, 'Response', _header(
        response,
        Destination=response.destination,
        InResponseTo=response.in_response_to,
        Consent=response.consent,
    ), children=[
        issuer_element(response.issuer),
        signature_or_none(response.signature),
        _status_element(response.status),
        assertion,
    ] + list(response.extensions))


def _build_response(node):
    _expect(node, 'Response')
    found, foreign = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_PROTOCOL, 'Status'),
        (NS_ASSERTION, 'Assertion'),
        (NS_ASSERTION, 'EncryptedAssertion'),
    })

    plain = found[(NS_ASSERTION, 'Assertion')]
    sealed = found[(NS_ASSERTION, 'EncryptedAssertion')]
    if len(plain) + len(sealed) > 1:
        raise MalformedXml('responses carry at most one assertion')

    assertion = None
    if plain:
        assertion = element_to_assertion(plain[0])
    elif sealed:
        assertion = element_to_encrypted(sealed[0])

    return Response(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(
            single(found, NS_ASSERTION, 'Issuer', 'Response')
        ),
        destination=node.get('Destination'),
        status=_parse_status(
            single(found, NS_PROTOCOL, 'Status', 'Response')
        ),
        assertion=assertion,
        signature=_signature(found, 'Response'),
        in_response_to=node.get('InResponseTo'),
        consent=node.get('Consent'),
        extensions=foreign,
    )


def element_to_response(node):
    """
    :param XmlElement node: A ``samlp:Response`` element.

    :rtype: Response
    """
    return _wrap(_build_response, node)


def emit_response(response):
    """
    Serialize a response to canonical bytes.

    :param Response response: The response.

    :rtype: bytes
    """
    return canonicalize(response_to_element(response))


def parse_response(data):
    """
    Parse a response document.

    :param bytes data: UTF-8 XML.

    :raise MalformedXml: for unexpected content.
    :raise MissingRequiredElement: if a mandatory element is absent.
    :raise BadTimestamp: for a timestamp without UTC marker.

    :rtype: Response
    """
    return element_to_response(parse_xml(data))


# AuthnRequest

def authn_request_to_element(request):
    name_id_policy = None
    if request.name_id_format is not None:
        name_id_policy = element(NS_PROTOCOL, 'NameIDPolicy', {
            'Format': request.name_id_format,
            'AllowCreate': 'true',
        })

    return element(NS_PROTOCOL, 'AuthnRequest', _header(
        request,
        AssertionConsumerServiceURL=request.acs_url,
        Destination=request.destination,
        ProtocolBinding=request.protocol_binding,
    ), children=[
        issuer_element(request.issuer),
        signature_or_none(request.signature),
        name_id_policy,
    ])


def _build_authn_request(node):
    _expect(node, 'AuthnRequest')
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_PROTOCOL, 'NameIDPolicy'),
    })
    policy = single(
        found, NS_PROTOCOL, 'NameIDPolicy', 'AuthnRequest', required=False
    )

    return AuthnRequest(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(
            single(found, NS_ASSERTION, 'Issuer', 'AuthnRequest')
        ),
        acs_url=required_attribute(node, 'AssertionConsumerServiceURL'),
        signature=_signature(found, 'AuthnRequest'),
        destination=node.get('Destination'),
        protocol_binding=node.get('ProtocolBinding'),
        name_id_format=policy.get('Format') if policy is not None else None,
    )


def element_to_authn_request(node):
    return _wrap(_build_authn_request, node)


def emit_authn_request(request):
    return canonicalize(authn_request_to_element(request))


def parse_authn_request(data):
    return element_to_authn_request(parse_xml(data))


# LogoutRequest

def logout_request_to_element(request):
    return element(NS_PROTOCOL, 'LogoutRequest', _header(
        request, Destination=request.destination,
    ), children=[
        issuer_element(request.issuer),
        signature_or_none(request.signature),
        element(NS_ASSERTION, 'NameID', {
            'Format': request.name_id_format,
        }, text=request.name_id),
        element(NS_PROTOCOL, 'SessionIndex', text=request.session_index),
    ])


def _build_logout_request(node):
    _expect(node, 'LogoutRequest')
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_ASSERTION, 'NameID'),
        (NS_PROTOCOL, 'SessionIndex'),
    })
    name_id = single(found, NS_ASSERTION, 'NameID', 'LogoutRequest')

    return LogoutRequest(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(
            single(found, NS_ASSERTION, 'Issuer', 'LogoutRequest')
        ),
        destination=node.get('Destination'),
        name_id=required_text(name_id),
        name_id_format=name_id.get('Format'),
        session_index=required_text(
            single(found, NS_PROTOCOL, 'SessionIndex', 'LogoutRequest')
        ),
        signature=_signature(found, 'LogoutRequest'),
    )


def element_to_logout_request(node):
    return _wrap(_build_logout_request, node)


# LogoutResponse

def logout_response_to_element(response):
    return element(NS_PROTOCOL, 'LogoutResponse', _header(
        response,
        Destination=response.destination,
        InResponseTo=response.in_response_to,
    ), children=[
        issuer_element(response.issuer),
        signature_or_none(response.signature),
        _status_element(response.status),
    ])


def _build_logout_response(node):
    _expect(node, 'LogoutResponse')
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_PROTOCOL, 'Status'),
    })

    return LogoutResponse(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(
            single(found, NS_ASSERTION, 'Issuer', 'LogoutResponse')
        ),
        destination=node.get('Destination'),
        in_response_to=node.get('InResponseTo'),
        status=_parse_status(
            single(found, NS_PROTOCOL, 'Status', 'LogoutResponse')
        ),
        signature=_signature(found, 'LogoutResponse'),
    )


def element_to_logout_response(node):
    return _wrap(_build_logout_response, node)


def emit_logout(message):
    """
    Serialize a logout request or a logout response.

    :param message: A :class:`LogoutRequest` or :class:`LogoutResponse`.

    :rtype: bytes
    """
    if isinstance(message, LogoutRequest):
        return canonicalize(logout_request_to_element(message))
    if isinstance(message, LogoutResponse):
        return canonicalize(logout_response_to_element(message))
    raise TypeError('Not a logout message: {!r}'.format(message))


def parse_logout(data):
    """
    Parse a logout request or a logout response, depending on the root
    element.

    :param bytes data: UTF-8 XML.

    :rtype: LogoutRequest or LogoutResponse
    """
    node = parse_xml(data)
    if node.is_a(NS_PROTOCOL, 'LogoutRequest'):
        return element_to_logout_request(node)
    if node.is_a(NS_PROTOCOL, 'LogoutResponse'):
        return element_to_logout_response(node)
    raise MalformedXml('expected a logout message, got {}'.format(
        node.display_name
    ))


# Artifact resolution

def artifact_resolve_to_element(request):
    children = [
        issuer_element(request.issuer),
        signature_or_none(request.signature),
    ] + [
        element(NS_PROTOCOL, 'Artifact', text=artifact)
        for artifact in request.artifacts
    ]
    return element(
        NS_PROTOCOL, 'ArtifactResolve', _header(request), children=children
    )


def _build_artifact_resolve(node):
    _expect(node, 'ArtifactResolve')
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_PROTOCOL, 'Artifact'),
    })
    artifacts = [
        required_text(artifact)
        for artifact in found[(NS_PROTOCOL, 'Artifact')]
    ]
    if not artifacts:
        raise MissingRequiredElement('Artifact')

    return ArtifactResolve(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(
            single(found, NS_ASSERTION, 'Issuer', 'ArtifactResolve')
        ),
        artifacts=artifacts,
        signature=_signature(found, 'ArtifactResolve'),
    )


def element_to_artifact_resolve(node):
    return _wrap(_build_artifact_resolve, node)


def artifact_response_to_element(response):
    message = None
    if response.message is not None:
        message = parse_xml(response.message)

    return element(NS_PROTOCOL, 'ArtifactResponse', _header(
        response, InResponseTo=response.in_response_to,
    ), children=[
        issuer_element(response.issuer),
        _status_element(response.status),
        message,
    ])


def _build_artifact_response(node):
    _expect(node, 'ArtifactResponse')

    issuer = None
    status = None
    message = None
    for child in node.children:
        if child.is_a(NS_ASSERTION, 'Issuer') and issuer is None:
            issuer = child
        elif child.is_a(NS_PROTOCOL, 'Status') and status is None:
            status = child
        elif child.is_a(NS_DSIG, 'Signature'):
            continue
        elif message is None:
            message = child
        else:
            raise MalformedXml('artifact responses carry one message')

    if issuer is None:
        raise MissingRequiredElement('Issuer')
    if status is None:
        raise MissingRequiredElement('Status')

    return ArtifactResponse(
        id=required_attribute(node, 'ID'),
        issue_instant=instant_attribute(node, 'IssueInstant'),
        issuer=required_text(issuer),
        in_response_to=node.get('InResponseTo'),
        status=_parse_status(status),
        message=canonicalize(message) if message is not None else None,
    )


def element_to_artifact_response(node):
    return _wrap(_build_artifact_response, node)


def emit_artifact_message(message):
    """
    Serialize an artifact resolve request or an artifact response.
    """
    if isinstance(message, ArtifactResolve):
        return canonicalize(artifact_resolve_to_element(message))
    if isinstance(message, ArtifactResponse):
        return canonicalize(artifact_response_to_element(message))
    raise TypeError('Not an artifact message: {!r}'.format(message))


PARSERS = {
    'Response': element_to_response,
    'AuthnRequest': element_to_authn_request,
    'LogoutRequest': element_to_logout_request,
    'LogoutResponse': element_to_logout_response,
    'ArtifactResolve': element_to_artifact_resolve,
    'ArtifactResponse': element_to_artifact_response,
}


def element_to_message(node):
    """
    Build the protocol message matching the root element.

    :param XmlElement node: Root element of a protocol message.

    :rtype: One of the protocol message types.
    """
    if node.namespace != NS_PROTOCOL or node.name not in PARSERS:
        raise MalformedXml('not a protocol message: {}'.format(
            node.display_name
        ))
    return PARSERS[node.name](node)


def parse_message(data):
    """
    Parse any protocol message.

    :param bytes data: UTF-8 XML.
    """
    return element_to_message(parse_xml(data))


def message_to_element(message):
    """
    Element of any protocol message.
    """
    builders = {
        Response: response_to_element,
        AuthnRequest: authn_request_to_element,
        LogoutRequest: logout_request_to_element,
        LogoutResponse: logout_response_to_element,
        ArtifactResolve: artifact_resolve_to_element,
        ArtifactResponse: artifact_response_to_element,
    }
    for kind, builder in builders.items():
        if isinstance(message, kind):
            return builder(message)
    raise TypeError('Not a protocol message: {!r}'.format(message))


def emit_message(message):
    """
    Serialize any protocol message to canonical bytes.
    """
    return canonicalize(message_to_element(message))


__all__ = [
    'response_to_element',
    'element_to_response',
    'emit_response',
    'parse_response',
    'authn_request_to_element',
    'element_to_authn_request',
    'emit_authn_request',
    'parse_authn_request',
    'logout_request_to_element',
    'element_to_logout_request',
    'logout_response_to_element',
    'element_to_logout_response',
    'emit_logout',
    'parse_logout',
    'artifact_resolve_to_element',
    'element_to_artifact_resolve',
    'artifact_response_to_element',
    'element_to_artifact_response',
    'emit_artifact_message',
    'element_to_message',
    'parse_message',
    'message_to_element',
    'emit_message',
]
