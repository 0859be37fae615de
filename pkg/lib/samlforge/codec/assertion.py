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
Assertion codec.

Assertions are emitted with their children in this order: ``Issuer``,
``Signature``, ``Subject``, ``Conditions``, ``AuthnStatement`` and
``AttributeStatement``. Foreign namespace children found at parse time are
kept in :attr:`samlforge.core.types.Assertion.extensions` and emitted last.
"""

from .xml import element, parse_xml, canonicalize, strict_children
from .errors import MalformedXml, MissingRequiredElement, UnexpectedElement
from .security import signature_to_element, element_to_signature
from ..core.instant import parse_instant, format_instant
from ..core.urns import NS_ASSERTION, NS_DSIG
from ..core.types import (
    InvalidValue, Assertion, Subject, SubjectConfirmation, Conditions,
    AuthnStatement, Attribute,
)


SAML_VERSION = '2.0'


def required_attribute(node, name):
    """
    Fetch a mandatory attribute.

    :raise MissingRequiredElement: if absent. The name is reported as
     ``Element@Attribute``.
    """
    value = node.get(name)
    if value is None:
        raise MissingRequiredElement('{}@{}'.format(node.name, name))
    return value


def instant_attribute(node, name, optional=False):
    value = node.get(name)
    if value is None:
        if optional:
            return None
        raise MissingRequiredElement('{}@{}'.format(node.name, name))
    return parse_instant(value)


def check_version(node):
    version = node.get('Version')
    if version is not None and version != SAML_VERSION:
        raise MalformedXml('unsupported SAML version {!r}'.format(version))


def single(found, namespace, name, parent, required=True):
    """
    Pick the single child of a kind from a :func:`strict_children` result.
    """
    children = found[(namespace, name)]
    if len(children) > 1:
        raise UnexpectedElement(name, parent)
    if not children:
        if required:
            raise MissingRequiredElement(name)
        return None
    return children[0]


def required_text(node):
    if not node.text:
        raise MissingRequiredElement('{} text'.format(node.name))
    return node.text


def issuer_element(issuer):
    return element(NS_ASSERTION, 'Issuer', text=issuer)


def signature_or_none(signature):
    if signature is None:
        return None
    return signature_to_element(signature)


def assertion_to_element(assertion):
    """
    :param Assertion assertion: The assertion.

    :rtype: XmlElement
    """
    subject = assertion.subject
    confirmation = subject.confirmation
    conditions = assertion.conditions
    statement = assertion.authn_statement

    audience = None
    if conditions.audiences:
        audience = element(NS_ASSERTION, 'AudienceRestriction', children=[
            element(NS_ASSERTION, 'Audience', text=value)
            for value in conditions.audiences
        ])

    locality = None
    if statement.locality_address or statement.locality_dns:
        locality = element(NS_ASSERTION, 'SubjectLocality', {
            'Address': statement.locality_address,
            'DNSName': statement.locality_dns,
        })

    context = None
    if statement.authn_context:
        context = element(NS_ASSERTION, 'AuthnContext', children=[
            element(
                NS_ASSERTION, 'AuthnContextClassRef',
                text=statement.authn_context
            ),
        ])

    attributes = None
    if assertion.attributes:
        attributes = element(NS_ASSERTION, 'AttributeStatement', children=[
            element(NS_ASSERTION, 'Attribute', {
                'Name': attribute.name,
                'FriendlyName': attribute.friendly_name,
                'NameFormat': attribute.name_format,
            }, children=[
                element(NS_ASSERTION, 'AttributeValue', text=value)
                for value in attribute.values
            ])
            for attribute in assertion.attributes
        ])

    return element(NS_ASSERTION, 'Assertion', {
        'ID': assertion.id,
        'IssueInstant': format_instant(assertion.issue_instant),
        'Version': SAML_VERSION,
    }, children=[
        issuer_element(assertion.issuer),
        signature_or_none(assertion.signature),
        element(NS_ASSERTION, 'Subject', children=[
            element(NS_ASSERTION, 'NameID', {
                'Format': subject.name_id_format,
            }, text=subject.name_id),
            element(NS_ASSERTION, 'SubjectConfirmation', {
                'Method': confirmation.method,
            }, children=[
                element(NS_ASSERTION, 'SubjectConfirmationData', {
                    'NotOnOrAfter': format_instant(
                        confirmation.not_on_or_after
                    ),
                    'Recipient': confirmation.recipient,
                    'InResponseTo': confirmation.in_response_to,
                }),
            ]),
        ]),
        element(NS_ASSERTION, 'Conditions', {
            'NotBefore': format_instant(conditions.not_before),
            'NotOnOrAfter': format_instant(conditions.not_on_or_after),
        }, children=[audience]),
        element(NS_ASSERTION, 'AuthnStatement', {
            'AuthnInstant': format_instant(statement.authn_instant),
            'SessionIndex': statement.session_index,
        }, children=[locality, context]),
        attributes,
    ] + list(assertion.extensions))


def _parse_subject(node):
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'NameID'),
        (NS_ASSERTION, 'SubjectConfirmation'),
    })
    name_id = single(found, NS_ASSERTION, 'NameID', 'Subject')
    confirmation = single(
        found, NS_ASSERTION, 'SubjectConfirmation', 'Subject'
    )

    data_found, _ = strict_children(confirmation, {
        (NS_ASSERTION, 'SubjectConfirmationData'),
        (NS_ASSERTION, 'NameID'),
    })
    data = single(
        data_found, NS_ASSERTION, 'SubjectConfirmationData',
        'SubjectConfirmation'
    )

    return Subject(
        name_id=required_text(name_id),
        name_id_format=name_id.get('Format'),
        confirmation=SubjectConfirmation(
            method=required_attribute(confirmation, 'Method'),
            not_on_or_after=instant_attribute(data, 'NotOnOrAfter'),
            recipient=required_attribute(data, 'Recipient'),
            in_response_to=data.get('InResponseTo'),
        ),
    )


def _parse_conditions(node):
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'AudienceRestriction'),
    })

    audiences = []
    for restriction in found[(NS_ASSERTION, 'AudienceRestriction')]:
        audience_found, _ = strict_children(restriction, {
            (NS_ASSERTION, 'Audience'),
        })
        audiences.extend(
            required_text(audience)
            for audience in audience_found[(NS_ASSERTION, 'Audience')]
        )

    return Conditions(
        not_before=instant_attribute(node, 'NotBefore'),
        not_on_or_after=instant_attribute(node, 'NotOnOrAfter'),
        audiences=audiences,
    )


def _parse_authn_statement(node):
    found, _ = strict_children(node, {
        (NS_ASSERTION, 'SubjectLocality'),
        (NS_ASSERTION, 'AuthnContext'),
    })
    locality = single(
        found, NS_ASSERTION, 'SubjectLocality', 'AuthnStatement',
        required=False
    )
    context = single(
        found, NS_ASSERTION, 'AuthnContext', 'AuthnStatement',
        required=False
    )

    authn_context = None
    if context is not None:
        context_found, _ = strict_children(context, {
            (NS_ASSERTION, 'AuthnContextClassRef'),
        }, ignored={
            (NS_ASSERTION, 'AuthnContextDeclRef'),
            (NS_ASSERTION, 'AuthenticatingAuthority'),
        })
        class_ref = single(
            context_found, NS_ASSERTION, 'AuthnContextClassRef',
            'AuthnContext', required=False
        )
        if class_ref is not None:
            authn_context = class_ref.text

    return AuthnStatement(
        authn_instant=instant_attribute(node, 'AuthnInstant'),
        session_index=required_attribute(node, 'SessionIndex'),
        locality_address=(
            locality.get('Address') if locality is not None else None
        ),
        locality_dns=(
            locality.get('DNSName') if locality is not None else None
        ),
        authn_context=authn_context,
    )


def _parse_attributes(node):
    found, _ = strict_children(node, {(NS_ASSERTION, 'Attribute')})

    attributes = []
    for attribute in found[(NS_ASSERTION, 'Attribute')]:
        values_found, _ = strict_children(attribute, {
            (NS_ASSERTION, 'AttributeValue'),
        })
        attributes.append(Attribute(
            name=required_attribute(attribute, 'Name'),
            friendly_name=attribute.get('FriendlyName'),
            name_format=attribute.get('NameFormat'),
            values=[
                value.text or ''
                for value in values_found[(NS_ASSERTION, 'AttributeValue')]
            ],
        ))
    return attributes


def element_to_assertion(node):
    """
    Build an assertion from its element.

    Authorization decision statements and advice are accepted and dropped.

    :param XmlElement node: A ``saml:Assertion`` element.

    :raise MalformedXml: for unexpected content.
    :raise MissingRequiredElement: if a mandatory element is absent.
    :raise BadTimestamp: for a timestamp without UTC marker.

    :rtype: Assertion
    """
    if not node.is_a(NS_ASSERTION, 'Assertion'):
        raise MalformedXml('expected saml:Assertion, got {}'.format(
            node.display_name
        ))
    check_version(node)

    found, foreign = strict_children(node, {
        (NS_ASSERTION, 'Issuer'),
        (NS_DSIG, 'Signature'),
        (NS_ASSERTION, 'Subject'),
        (NS_ASSERTION, 'Conditions'),
        (NS_ASSERTION, 'AuthnStatement'),
        (NS_ASSERTION, 'AttributeStatement'),
    }, ignored={
        (NS_ASSERTION, 'AuthzDecisionStatement'),
        (NS_ASSERTION, 'Advice'),
    })

    issuer = single(found, NS_ASSERTION, 'Issuer', 'Assertion')
    signature = single(
        found, NS_DSIG, 'Signature', 'Assertion', required=False
    )
    subject = single(found, NS_ASSERTION, 'Subject', 'Assertion')
    conditions = single(found, NS_ASSERTION, 'Conditions', 'Assertion')
    statement = single(found, NS_ASSERTION, 'AuthnStatement', 'Assertion')

    try:
        attributes = []
        for attribute_statement in found[
                (NS_ASSERTION, 'AttributeStatement')]:
            attributes.extend(_parse_attributes(attribute_statement))

        return Assertion(
            id=required_attribute(node, 'ID'),
            issue_instant=instant_attribute(node, 'IssueInstant'),
            issuer=required_text(issuer),
            subject=_parse_subject(subject),
            conditions=_parse_conditions(conditions),
            authn_statement=_parse_authn_statement(statement),
            attributes=attributes,
            signature=(
                element_to_signature(signature)
                if signature is not None else None
            ),
            extensions=foreign,
        )
    except InvalidValue as e:
        raise MalformedXml(str(e))


def emit_assertion(assertion):
    """
    Serialize an assertion to canonical bytes.

    :param Assertion assertion: The assertion.

    :rtype: bytes
    """
    return canonicalize(assertion_to_element(assertion))


def parse_assertion(data):
    """
    Parse an assertion document.

    :param bytes data: UTF-8 XML.

    :rtype: Assertion
    """
    return element_to_assertion(parse_xml(data))


__all__ = [
    'assertion_to_element',
    'element_to_assertion',
    'emit_assertion',
    'parse_assertion',
]
