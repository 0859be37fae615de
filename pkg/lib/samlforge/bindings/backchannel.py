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
Back channel exchanges.

Requests and responses travel in a minimal SOAP 1.1 envelope, posted over
HTTP outside the browser::

    <SOAP-ENV:Envelope xmlns:SOAP-ENV="...">
      <SOAP-ENV:Body> message </SOAP-ENV:Body>
    </SOAP-ENV:Envelope>

Protocol level failures are answered with a ``SOAP-ENV:Fault`` whose
``faultcode`` carries the error code of the remote party.
"""

from threading import Lock

import requests

from .errors import ConnectFailed, Timeout, FaultResponse, MalformedEnvelope
from ..codec.xml import element, parse_xml, canonicalize
from ..codec.errors import PARSE_ERRORS
from ..core.urns import NS_SOAP
from ..logging import get_logger


log = get_logger(__name__)


DEFAULT_TIMEOUT = 10

CONTENT_TYPE = 'text/xml; charset=utf-8'
SOAP_ACTION = '"http://www.oasis-open.org/committees/security"'


def wrap_envelope(message):
    """
    Wrap message bytes in an envelope.

    :param bytes message: The XML message.

    :rtype: bytes
    """
    return canonicalize(element(NS_SOAP, 'Envelope', children=[
        element(NS_SOAP, 'Body', children=[parse_xml(message)]),
    ]))


def fault_envelope(code, detail):
    """
    Envelope reporting a failure.

    :param str code: Error code, as in :attr:`IdpError.code`.
    :param str detail: Human readable description.

    :rtype: bytes
    """
    return canonicalize(element(NS_SOAP, 'Envelope', children=[
        element(NS_SOAP, 'Body', children=[
            element(NS_SOAP, 'Fault', children=[
                element(None, 'faultcode', text=code),
                element(None, 'faultstring', text=detail),
            ]),
        ]),
    ]))


def unwrap_envelope(data):
    """
    Extract the message of an envelope.

    :raise FaultResponse: if the envelope carries a fault.
    :raise MalformedEnvelope: if the data is not an envelope with exactly one
     body element.

    :rtype: bytes
    """
    try:
        envelope = parse_xml(data)
    except PARSE_ERRORS as e:
        raise MalformedEnvelope(str(e))

    if not envelope.is_a(NS_SOAP, 'Envelope'):
        raise MalformedEnvelope(
            'unexpected root {}'.format(envelope.display_name)
        )

    bodies = envelope.findall(NS_SOAP, 'Body')
    if len(bodies) != 1:
        raise MalformedEnvelope('expected exactly one body')

    children = bodies[0].children
    if len(children) != 1:
        raise MalformedEnvelope('expected exactly one body element')

    payload = children[0]
    if payload.is_a(NS_SOAP, 'Fault'):
        code = payload.find(None, 'faultcode')
        detail = payload.find(None, 'faultstring')
        raise FaultResponse(
            code.text if code is not None and code.text else 'Unknown',
            detail.text if detail is not None and detail.text else '',
        )

    return canonicalize(payload)


class BackChannel:
    """
    Synchronous request and response exchange with a remote endpoint.
    """

    def exchange(self, endpoint, message):
        """
        Send a message and wait for the answer.

        :param str endpoint: URL of the remote endpoint.
        :param bytes message: Request message.

        :raise ConnectFailed: if the endpoint cannot be reached.
        :raise Timeout: if the endpoint does not answer in time.
        :raise FaultResponse: if the endpoint answers with a fault.

        :return: Response message.
        :rtype: bytes
        """
        log.debug('Back channel exchange with {}'.format(endpoint))
        return unwrap_envelope(self.post(endpoint, wrap_envelope(message)))

    def post(self, endpoint, envelope):
        """
        Deliver an envelope and return the envelope answered.
        """
        raise NotImplementedError()


class HttpBackChannel(BackChannel):
    """
    Back channel over HTTP.

    :param float timeout: Seconds to wait for connection and answer.
    """

    def __init__(self, timeout=DEFAULT_TIMEOUT):
        self.timeout = timeout
        self._session = requests.Session()

    def post(self, endpoint, envelope):
        try:
            response = self._session.post(
                endpoint,
                data=envelope,
                headers={
                    'Content-Type': CONTENT_TYPE,
                    'SOAPAction': SOAP_ACTION,
                },
                timeout=self.timeout,
                allow_redirects=False,
            )
        except requests.exceptions.Timeout:
            raise Timeout(endpoint, self.timeout)
        except requests.exceptions.RequestException as e:
            raise ConnectFailed(endpoint, str(e))

        # Faults are answered with status 500
        if response.status_code not in (200, 500):
            raise ConnectFailed(endpoint, 'HTTP {} {}'.format(
                response.status_code, response.reason
            ))
        return response.content

    def close(self):
        self._session.close()


class LoopbackBackChannel(BackChannel):
    """
    In process back channel.

    Handlers take the request envelope bytes and return the response
    envelope bytes, the same contract the HTTP service implements.

    :param dict handlers: Mapping of endpoint URL to handler.
    """

    def __init__(self, handlers=None):
        self._handlers = dict(handlers or {})
        self._lock = Lock()

    def register(self, endpoint, handler):
        with self._lock:
            self._handlers[endpoint] = handler

    def post(self, endpoint, envelope):
        with self._lock:
            handler = self._handlers.get(endpoint)
        if handler is None:
            raise ConnectFailed(endpoint, 'no such loopback endpoint')
        return handler(envelope)


__all__ = [
    'DEFAULT_TIMEOUT',
    'wrap_envelope',
    'fault_envelope',
    'unwrap_envelope',
    'BackChannel',
    'HttpBackChannel',
    'LoopbackBackChannel',
]
