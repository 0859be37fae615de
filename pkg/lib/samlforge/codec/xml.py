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
Namespace resolved XML tree, hardened parser and canonical serializer.

The canonical form is the byte form signed and verified by
:mod:`samlforge.crypto.signature`. It is defined as follows:

- UTF-8, no XML declaration, no comments, no processing instructions.
- Well known namespaces always use the same prefix (``saml``, ``samlp``,
  ``md``, ``ds``, ``xenc``, ``xs``, ``xsi``, ``SOAP-ENV``). Other namespaces
  are given ``ns0``, ``ns1``, ... in document order. A default namespace is
  never used.
- A namespace is declared on the first element that uses it, unless an
  ancestor already declared it. Declarations are sorted by prefix.
- Attributes are sorted by namespace URI, then local name.
- Text is trimmed of XML whitespace. Whitespace only text is dropped. Tails
  (mixed content) are not part of the model.
- Empty elements are written as ``<prefix:name/>``.
"""

from collections import namedtuple

from lxml import etree

from .errors import MalformedXml, UnexpectedElement
from ..logging import get_logger
from ..core.urns import (
    NS_ASSERTION, NS_PROTOCOL, NS_METADATA, NS_DSIG, NS_XENC,
    NS_XS, NS_XSI, NS_SOAP, NS_XML,
)


log = get_logger(__name__)


XML_WHITESPACE = ' \t\n\r'

PREFIXES = {
    NS_ASSERTION: 'saml',
    NS_PROTOCOL: 'samlp',
    NS_METADATA: 'md',
    NS_DSIG: 'ds',
    NS_XENC: 'xenc',
    NS_XS: 'xs',
    NS_XSI: 'xsi',
    NS_SOAP: 'SOAP-ENV',
    NS_XML: 'xml',
}

STRICT_NAMESPACES = frozenset((NS_ASSERTION, NS_PROTOCOL, NS_METADATA))

MAX_DOCUMENT_SIZE = 1024 * 1024


def _normalize_attributes(attributes):
    if isinstance(attributes, dict):
        attributes = attributes.items()

    normalized = {}
    for key, value in attributes:
        if isinstance(key, str):
            key = (None, key)
        namespace, name = key
        if not name:
            raise ValueError('Empty attribute name')
        if not isinstance(value, str):
            raise ValueError(
                'Attribute {} value must be a string, got {!r}'.format(
                    name, value
                )
            )
        if (namespace, name) in normalized:
            raise ValueError('Duplicated attribute {}'.format(name))
        normalized[(namespace, name)] = value

    return tuple(sorted(
        normalized.items(),
        key=lambda item: (item[0][0] or '', item[0][1])
    ))


def _normalize_text(text):
    if text is None:
        return None
    text = text.strip(XML_WHITESPACE)
    return text or None


class XmlElement(namedtuple(
        'XmlElement',
        ['namespace', 'name', 'attributes', 'children', 'text'])):
    """
    Immutable XML element.

    :var str namespace: Namespace URI, or ``None``.
    :var str name: Local name.
    :var tuple attributes: Sorted tuple of ``((namespace, name), value)``.
    :var tuple children: Child elements in document order.
    :var str text: Trimmed text content, or ``None``.
    """

    __slots__ = ()

    def __new__(
            cls, namespace, name, attributes=(), children=(), text=None):
        return super().__new__(
            cls,
            namespace or None,
            name,
            _normalize_attributes(attributes),
            tuple(children),
            _normalize_text(text),
        )

    @property
    def tag(self):
        if self.namespace is None:
            return self.name
        return '{{{}}}{}'.format(self.namespace, self.name)

    @property
    def display_name(self):
        prefix = PREFIXES.get(self.namespace)
        if prefix is None:
            return self.name
        return '{}:{}'.format(prefix, self.name)

    def is_a(self, namespace, name):
        return self.namespace == namespace and self.name == name

    def get(self, name, default=None, namespace=None):
        """
        Value of an attribute.
        """
        for (attr_namespace, attr_name), value in self.attributes:
            if attr_namespace == namespace and attr_name == name:
                return value
        return default

    def find(self, namespace, name):
        """
        First child with the given name, or ``None``.
        """
        for child in self.children:
            if child.is_a(namespace, name):
                return child
        return None

    def findall(self, namespace, name):
        return [
            child for child in self.children if child.is_a(namespace, name)
        ]

    def without(self, namespace, name):
        """
        Copy of this element with the given direct children removed.
        """
        return self._replace(children=tuple(
            child for child in self.children
            if not child.is_a(namespace, name)
        ))


def element(namespace, name, attributes=(), children=(), text=None):
    """
    Build an :class:`XmlElement`, skipping attributes valued ``None`` and
    children that are ``None``.
    """
    if isinstance(attributes, dict):
        attributes = attributes.items()
    return XmlElement(
        namespace, name,
        [(key, value) for key, value in attributes if value is not None],
        [child for child in children if child is not None],
        text,
    )


def _parser(**kwargs):
    return etree.XMLParser(
        resolve_entities=False,
        no_network=True,
        load_dtd=False,
        dtd_validation=False,
        remove_comments=True,
        remove_pis=True,
        huge_tree=False,
        **kwargs
    )


def _parse_tree(data, **kwargs):
    if isinstance(data, str):
        data = data.encode('utf-8')

    if not isinstance(data, bytes):
        raise MalformedXml('expected bytes, got {}'.format(type(data)))

    if len(data) > MAX_DOCUMENT_SIZE:
        raise MalformedXml('document larger than {} bytes'.format(
            MAX_DOCUMENT_SIZE
        ))

    if b'<!DOCTYPE' in data or b'<!ENTITY' in data:
        raise MalformedXml('DTDs are not allowed')

    try:
        root = etree.fromstring(data, _parser(**kwargs))
    except (etree.LxmlError, ValueError, LookupError) as e:
        raise MalformedXml(str(e))

    if root is None:
        raise MalformedXml('empty document')

    docinfo = root.getroottree().docinfo
    if docinfo.doctype or docinfo.internalDTD is not None:
        raise MalformedXml('DTDs are not allowed')

    return root


def _convert(node):
    qname = etree.QName(node)

    children = []
    for child in node:
        if isinstance(child, etree._Entity):
            raise MalformedXml('entity references are not allowed')
        if not isinstance(child.tag, str):
            continue
        children.append(_convert(child))

    attributes = []
    for key, value in node.attrib.items():
        attr = etree.QName(key)
        attributes.append(((attr.namespace, attr.localname), value))

    return XmlElement(
        qname.namespace, qname.localname,
        attributes, children, node.text,
    )


def parse_xml(data):
    """
    Parse a document into an :class:`XmlElement` tree.

    DTDs, entity references, comments and processing instructions are never
    honored.

    :param bytes data: The document.

    :raise MalformedXml: if the document is not well formed or uses any
     forbidden construct.

    :rtype: XmlElement
    """
    root = _parse_tree(data)
    try:
        return _convert(root)
    except ValueError as e:
        if isinstance(e, MalformedXml):
            raise
        raise MalformedXml(str(e))


def _escape_text(text):
    return (
        text.replace('&', '&amp;')
        .replace('<', '&lt;')
        .replace('>', '&gt;')
        .replace('\r', '&#xD;')
    )


def _escape_attribute(value):
    return (
        value.replace('&', '&amp;')
        .replace('<', '&lt;')
        .replace('"', '&quot;')
        .replace('\t', '&#x9;')
        .replace('\n', '&#xA;')
        .replace('\r', '&#xD;')
    )


class _Canonicalizer:

    def __init__(self):
        self._generated = {}
        self._parts = []

    def prefix_for(self, namespace):
        prefix = PREFIXES.get(namespace)
        if prefix is not None:
            return prefix
        if namespace not in self._generated:
            self._generated[namespace] = 'ns{}'.format(len(self._generated))
        return self._generated[namespace]

    def qualify(self, namespace, name):
        if namespace is None:
            return name
        return '{}:{}'.format(self.prefix_for(namespace), name)

    def write(self, node, in_scope):
        used = [node.namespace] + [
            namespace for (namespace, _), _ in node.attributes
        ]
        declare = {}
        for namespace in used:
            if namespace is None or namespace == NS_XML:
                continue
            if namespace in in_scope:
                continue
            declare[self.prefix_for(namespace)] = namespace

        tag = self.qualify(node.namespace, node.name)
        parts = self._parts
        parts.append('<')
        parts.append(tag)

        for prefix in sorted(declare):
            parts.append(' xmlns:{}="{}"'.format(
                prefix, _escape_attribute(declare[prefix])
            ))

        for (namespace, name), value in node.attributes:
            parts.append(' {}="{}"'.format(
                self.qualify(namespace, name), _escape_attribute(value)
            ))

        text = _normalize_text(node.text)
        if not node.children and text is None:
            parts.append('/>')
            return

        parts.append('>')
        if text is not None:
            parts.append(_escape_text(text))

        scope = in_scope | frozenset(declare.values())
        for child in node.children:
            self.write(child, scope)

        parts.append('</{}>'.format(tag))

    def render(self, node):
        self.write(node, frozenset())
        return ''.join(self._parts).encode('utf-8')


def canonicalize(node):
    """
    Serialize an element in canonical form.

    :param XmlElement node: Element to serialize.

    :return: Canonical UTF-8 bytes.
    :rtype: bytes
    """
    return _Canonicalizer().render(node)


def pretty(data):
    """
    Indent a document for display.

    :param bytes data: The document.

    :return: Indented document.
    :rtype: str
    """
    root = _parse_tree(data, remove_blank_text=True)
    return etree.tostring(
        root, pretty_print=True, encoding='unicode'
    ).rstrip('\n')


def strict_children(node, known, ignored=()):
    """
    Classify the children of an element.

    :param XmlElement node: Element whose children are inspected.
    :param set known: ``(namespace, name)`` pairs expected in this position.
    :param set ignored: ``(namespace, name)`` pairs to drop silently.

    :raise UnexpectedElement: for any other child in a SAML namespace.

    :return: A tuple with a dictionary mapping each known pair to the list of
     children found, and the list of foreign namespace children.
    :rtype: tuple
    """
    found = {key: [] for key in known}
    foreign = []

    for child in node.children:
        key = (child.namespace, child.name)
        if key in found:
            found[key].append(child)
        elif key in ignored:
            continue
        elif child.namespace in STRICT_NAMESPACES:
            raise UnexpectedElement(child.display_name, node.display_name)
        else:
            foreign.append(child)

    return found, foreign


__all__ = [
    'PREFIXES',
    'XmlElement',
    'element',
    'parse_xml',
    'canonicalize',
    'pretty',
    'strict_children',
]
