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
Service provider engine.

Inbound responses go through the Assertion Consumer Service pipeline. Its
steps run in this order and the first failure ends the run:

#. ``decode``: the POST form is decoded.
#. ``parse``: the response is parsed.
#. ``issuer``: the issuer is a registered identity provider.
#. ``signature``: the signatures verify against the certificates of the
   issuer, after decryption of an encrypted assertion.
#. ``status``: the status is Success.
#. ``destination``: the response was sent to this consumer endpoint.
#. ``window``: the conditions window contains the current instant.
#. ``audience``: the assertion is meant for this service provider.
#. ``bearer``: the bearer confirmation is valid for this endpoint.
#. ``replay``: the assertion was never accepted before.
#. ``locality``: the subject locality matches the client address.
#. ``relay_state``: the relay state resolves to an application URL.

A :class:`SsoSession` is opened only when every step passed.
"""

from threading import Lock

from .errors import (
    NoIdpRegistered, UnsupportedBinding, UnknownIssuer,
    InvalidRequestSignature,
)
from .relay import RelayStateStore, resolve_relay_state
from .replay import ReplayCache
from .report import ValidationReport
from .sessions import SessionStore
from ..codec import (
    PARSE_ERRORS, parse_xml, element_to_response, element_to_assertion,
    element_to_message, emit_message,
)
from ..core.instant import to_instant, seconds, shift
from ..core.types import (
    InvalidValue, UnsupportedMethod, AuthnRequest, ArtifactResolve,
    ArtifactResponse, LogoutRequest, LogoutResponse, new_id,
)
from ..core.urns import (
    NS_ASSERTION, BINDING_POST, BINDING_REDIRECT, BINDING_ARTIFACT,
    STATUS_SUCCESS, NAMEID_UNSPECIFIED,
)
from ..core.validity import (
    evaluate_window, check_audience, check_bearer, check_locality,
)
from ..crypto import (
    DecryptFailed, sign_element, decrypt_assertion, verify_node,
)
from ..bindings import (
    BindingError, BackChannelError, FaultResponse, LoopbackBackChannel,
    decode_post, decode_artifact_form, encode_redirect, encode_post,
)
from ..bindings.post import FIELD_RESPONSE, FIELD_REQUEST
from ..logging import get_logger


log = get_logger(__name__)


DEFAULT_LANDING = '/'


class ServiceProvider:
    """
    Relying party engine.

    :param FederationRegistry registry: Registry with the local service
     provider and its identity provider partners.
    :param BackChannel back_channel: Channel used to resolve artifacts.
    :param int skew: Clock skew in seconds. Overrides the skew of the
     partner policies when given.
    :param bool check_locality: Overrides the locality toggle of the partner
     policies when given.
    :param str default_landing: Where users land when no relay state
     resolves. Defaults to the ``default_landing`` of the local settings.
    """

    def __init__(
            self, registry, back_channel=None, skew=None,
            check_locality=None, default_landing=None):
        self.registry = registry
        self.back_channel = back_channel or LoopbackBackChannel()
        self.skew = skew
        self.check_locality = check_locality
        self.default_landing = (
            default_landing or
            registry.settings.default_landing or
            DEFAULT_LANDING
        )

        self.replay = ReplayCache('assertion')
        self.relay_states = RelayStateStore()
        self.sessions = SessionStore()
        self._pending = {}
        self._lock = Lock()

    @property
    def entity_id(self):
        return self.registry.entity_id

    @property
    def role(self):
        return self.registry.local.role

    def _skew(self, policy):
        return self.skew if self.skew is not None else policy.clock_skew

    def _locality_enabled(self, policy):
        if self.check_locality is not None:
            return self.check_locality
        if policy.check_locality is not None:
            return policy.check_locality
        return True

    def _sign(self, message, embed=True):
        alias = self.registry.signing_alias
        if alias not in self.registry.store:
            return message
        return message._replace(signature=sign_element(
            emit_message(message), message.id, alias, self.registry.store,
            embed=embed,
        ))

    # SP initiated SSO

    def _identity_provider(self, idp):
        if idp is not None:
            partner = self.registry.partner(idp)
            if not partner.entity.is_idp:
                raise UnknownIssuer(idp)
            return partner

        partners = sorted(
            self.registry.identity_providers(),
            key=lambda partner: partner.entity.entity_id,
        )
        if not partners:
            raise NoIdpRegistered()
        return partners[0]

    def build_authn_request(self, target, now, idp=None, binding=None):
        """
        Send the user to an identity provider to authenticate.

        The relay state is a fresh random token standing for the target,
        expiring with the request.

        :param str target: Resource the user asked for.
        :param datetime now: Current instant.
        :param str idp: Identity provider to use. The first registered one
         when not given.
        :param str binding: ``redirect`` or ``post``. The default binding of
         the identity provider policy when not given.

        :raise NoIdpRegistered: if there is no identity provider.
        :raise UnsupportedBinding: if the identity provider has no single
         sign-on endpoint for the binding.

        :return: A :class:`RedirectUrl` for the redirect binding, a
         :class:`PostForm` for the POST binding.
        """
        now = to_instant(now)
        partner = self._identity_provider(idp)
        idp = partner.entity.entity_id

        binding = binding or partner.policy.default_binding
        urns = {'redirect': BINDING_REDIRECT, 'post': BINDING_POST}
        if binding not in urns:
            raise UnsupportedBinding(binding, idp)
        endpoint = partner.entity.role.sso_endpoint(urns[binding])
        if endpoint is None:
            raise UnsupportedBinding(binding, idp)

        acs = self.role.default_acs
        request = AuthnRequest(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            acs_url=acs.location,
            destination=endpoint.location,
            protocol_binding=acs.binding,
            name_id_format=NAMEID_UNSPECIFIED,
        )
        if self.role.authn_requests_signed:
            request = self._sign(request, embed=(binding != 'redirect'))

        ttl = self.registry.settings.request_ttl
        with self._lock:
            self._pending[request.id] = (idp, shift(now, seconds(ttl)))
        relay_state = self.relay_states.issue(target, now, ttl)

        log.info('AuthnRequest {} sent to {} for {}'.format(
            request.id, idp, target
        ))

        message = emit_message(request)
        if binding == 'redirect':
            return encode_redirect(
                message, endpoint.location, relay_state, kind='request'
            )
        return encode_post(message, 'request', endpoint.location, relay_state)

    def _pending_request(self, request_id, issuer, now):
        with self._lock:
            pending = self._pending.get(request_id)
        if pending is None:
            return False
        idp, expiry = pending
        return idp == issuer and now < expiry

    def expire(self, now):
        """
        Forget the pending requests, relay states and assertion IDs that
        can no longer be used.

        :param datetime now: Current instant.

        :return: Number of entries forgotten.
        :rtype: int
        """
        now = to_instant(now)
        with self._lock:
            stale = [
                request_id
                for request_id, (_, expiry) in self._pending.items()
                if expiry <= now
            ]
            for request_id in stale:
                del self._pending[request_id]

        forgotten = (
            len(stale) + self.relay_states.evict(now) + self.replay.evict(now)
        )
        if forgotten:
            log.debug('Forgot {} expired entries'.format(forgotten))
        return forgotten

    # Assertion consumer service

    def consume(self, body, observed_ip, now, acs_url=None):
        """
        Run a submitted POST form through the consumer pipeline.

        Never raises for hostile input, every failure is reported.

        :param bytes body: Form URL encoded body.
        :param str observed_ip: Address the form was posted from.
        :param datetime now: Current instant.
        :param str acs_url: Consumer endpoint the form was posted to. The
         default consumer endpoint when not given.

        :rtype: ValidationReport
        """
        report = ValidationReport()
        try:
            decoded = decode_post(body, (FIELD_RESPONSE,))
        except BindingError as e:
            return report.fail('decode', e.code, str(e))
        report.passed('decode', decoded.field)

        return self._validate(
            report, decoded.message, observed_ip, to_instant(now),
            acs_url or self.role.default_acs.location, decoded.relay_state,
        )

    def _validate(
            self, report, message, observed_ip, now, acs_url, relay_state):

        # Parse
        try:
            node = parse_xml(message)
            response = element_to_response(node)
        except PARSE_ERRORS + (InvalidValue,) as e:
            return report.fail(
                'parse', getattr(e, 'code', 'InvalidValue'), str(e)
            )
        if response.assertion is None:
            return report.fail(
                'parse', 'MissingAssertion', 'response carries no assertion'
            )
        report.passed('parse', response.id)

        # Issuer
        issuer = response.issuer
        if not self.registry.has_partner(issuer) or \
                not self.registry.partner(issuer).entity.is_idp:
            return report.fail(
                'issuer', 'UnknownIssuer',
                '{} is not a registered identity provider'.format(issuer)
            )
        policy = self.registry.partner(issuer).policy
        report.passed('issuer', issuer)

        # Signature
        assertion, failure = self._open_assertion(node, response, policy)
        if failure is not None:
            return report.fail('signature', *failure)
        report.passed('signature')

        # Status
        if response.status != STATUS_SUCCESS:
            return report.fail(
                'status', 'UnsuccessfulStatus', response.status
            )
        report.passed('status')

        # Destination
        if response.destination is None or \
                response.destination.rstrip('/') != acs_url.rstrip('/'):
            return report.fail(
                'destination', 'DestinationMismatch',
                'sent to {}, received at {}'.format(
                    response.destination, acs_url
                )
            )
        report.passed('destination')

        skew = self._skew(policy)
        conditions = assertion.conditions

        # Window
        if conditions is not None:
            verdict = evaluate_window(
                conditions.not_before, conditions.not_on_or_after, now, skew
            )
            if not verdict.valid:
                return report.fail(
                    'window', verdict.outcome.value, verdict.detail
                )
        report.passed('window')

        # Audience
        if conditions is not None:
            verdict = check_audience(conditions, self.entity_id)
            if not verdict.valid:
                return report.fail(
                    'audience', verdict.outcome.value, verdict.detail
                )
        report.passed('audience')

        # Bearer
        confirmation = assertion.subject.confirmation
        try:
            verdict = check_bearer(confirmation, acs_url, now, skew)
        except UnsupportedMethod as e:
            return report.fail('bearer', e.code, str(e))
        if not verdict.valid:
            return report.fail(
                'bearer', verdict.outcome.value, verdict.detail
            )
        in_response_to = (
            confirmation.in_response_to or response.in_response_to
        )
        if in_response_to is not None and \
                not self._pending_request(in_response_to, issuer, now):
            return report.fail(
                'bearer', 'UnknownRequest',
                'no pending request {}'.format(in_response_to)
            )
        report.passed('bearer')

        # Replay
        expiry = confirmation.not_on_or_after
        if expiry is None and conditions is not None:
            expiry = conditions.not_on_or_after
        if expiry is None:
            expiry = now
        if not self.replay.check_and_record(
                assertion.id, shift(expiry, seconds(skew)), now):
            return report.fail(
                'replay', 'Replayed',
                'assertion {} already consumed'.format(assertion.id)
            )
        report.passed('replay')

        # Locality
        statement = assertion.authn_statement
        if statement is not None and self._locality_enabled(policy):
            verdict = check_locality(statement, observed_ip)
            if not verdict.valid:
                return report.fail(
                    'locality', verdict.outcome.value, verdict.detail
                )
        report.passed('locality')

        # Relay state
        landing, warning = resolve_relay_state(
            self.relay_states, relay_state, now, self.default_landing,
            policy.relay_state_map,
        )
        if warning is not None:
            report.warn(warning)
        report.passed('relay_state', landing)

        session = self.sessions.open(
            name_id=assertion.subject.name_id,
            name_id_format=assertion.subject.name_id_format,
            attributes=assertion.attributes,
            issuer=issuer,
            session_index=(
                statement.session_index if statement is not None else None
            ),
            established_at=now,
            client_ip=observed_ip,
        )
        return report.succeed(session, landing)

    def _open_assertion(self, node, response, policy):
        """
        Verify the signatures of a response and extract its assertion.

        :return: A pair with the assertion and ``None``, or ``None`` and a
         failure pair with outcome and detail.
        """
        store = self.registry.store
        issuer = response.issuer

        response_result = verify_node(node, issuer, store)
        if response_result is not None and not response_result:
            return None, (response_result.reason, 'response signature')

        if response.is_encrypted:
            try:
                data = decrypt_assertion(
                    response.assertion, store,
                    key_alias=self.registry.encryption_alias,
                )
                assertion_node = parse_xml(data)
                assertion = element_to_assertion(assertion_node)
            except DecryptFailed as e:
                return None, (e.code, 'assertion does not decrypt')
            except PARSE_ERRORS + (InvalidValue,) as e:
                return None, ('DecryptFailed', str(e))
        else:
            if policy.encrypt_assertion:
                return None, (
                    'EncryptionRequired', 'assertion was not encrypted'
                )
            assertion_node = node.find(NS_ASSERTION, 'Assertion')
            assertion = response.assertion

        assertion_result = verify_node(assertion_node, issuer, store)
        if assertion_result is not None and not assertion_result:
            return None, (assertion_result.reason, 'assertion signature')

        if assertion.issuer != issuer:
            return None, (
                'IssuerMismatch',
                'assertion issued by {}'.format(assertion.issuer)
            )

        if assertion_result is None and (
                policy.sign_assertion or response_result is None):
            return None, ('SignatureMissing', 'assertion is not signed')

        return assertion, None

    # Artifact binding

    def _artifact_endpoint(self, partner, artifact):
        endpoints = partner.entity.role.artifact_resolution_endpoints
        for endpoint in endpoints:
            if endpoint.index == artifact.endpoint_index:
                return endpoint
        return partner.entity.role.artifact_resolution_endpoint

    def fetch_via_artifact(
            self, artifacts, observed_ip, now, relay_state=None):
        """
        Resolve artifacts at their identity provider and consume the
        response behind them.

        Failures of the resolution itself are reported at the ``artifact``
        step, with the code the identity provider answered.

        :param artifacts: One :class:`Artifact`, or a sequence of one or two.
        :param str observed_ip: Address the artifacts came from.
        :param datetime now: Current instant.
        :param str relay_state: Relay state received with the artifacts.

        :rtype: ValidationReport
        """
        now = to_instant(now)
        report = ValidationReport()
        if not isinstance(artifacts, (list, tuple)):
            artifacts = [artifacts]

        partner = self.registry.find_partner_by_source_id(
            artifacts[0].source_id
        )
        if partner is None or not partner.entity.is_idp:
            return report.fail(
                'issuer', 'UnknownIssuer',
                'no identity provider with source id {}'.format(
                    artifacts[0].source_id.hex()
                )
            )

        endpoint = self._artifact_endpoint(partner, artifacts[0])
        if endpoint is None:
            return report.fail(
                'artifact', 'UnsupportedBinding',
                '{} has no artifact resolution endpoint'.format(
                    partner.entity.entity_id
                )
            )

        request = self._sign(ArtifactResolve(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            artifacts=[artifact.encode() for artifact in artifacts],
        ))

        try:
            answer = element_to_message(parse_xml(self.back_channel.exchange(
                endpoint.location, emit_message(request)
            )))
        except FaultResponse as e:
            return report.fail('artifact', e.fault_code, e.detail)
        except BackChannelError as e:
            return report.fail('artifact', e.code, str(e))
        except PARSE_ERRORS + (InvalidValue,) as e:
            return report.fail(
                'artifact', getattr(e, 'code', 'InvalidValue'), str(e)
            )

        if not isinstance(answer, ArtifactResponse) or \
                answer.in_response_to != request.id or \
                answer.message is None:
            return report.fail(
                'artifact', 'MalformedEnvelope',
                'unexpected answer to {}'.format(request.id)
            )
        report.passed('artifact', partner.entity.entity_id)

        acs = self.role.acs_for(BINDING_ARTIFACT) or self.role.default_acs
        return self._validate(
            report, answer.message, observed_ip, now, acs.location,
            relay_state,
        )

    def consume_artifact(self, query, observed_ip, now):
        """
        Consume the artifacts of a redirect URL, query string or form.

        :rtype: ValidationReport
        """
        try:
            artifacts, relay_state = decode_artifact_form(query)
        except BindingError as e:
            return ValidationReport().fail('decode', e.code, str(e))
        return self.fetch_via_artifact(
            artifacts, observed_ip, now, relay_state=relay_state
        )

    # Single logout

    def handle_logout_request(self, body, now):
        """
        Terminate the local sessions of an identity provider session.

        Answering a request for sessions already gone is a Success.

        :param bytes body: Form URL encoded body of the LogoutRequest.
        :param datetime now: Current instant.

        :raise BindingError: if the form does not decode.
        :raise CodecError: if the request does not parse.
        :raise UnknownIssuer: if the issuer is not a registered identity
         provider.
        :raise InvalidRequestSignature: if the signature does not verify, or
         is missing and the policy requires it.

        :return: The POST form carrying the LogoutResponse.
        :rtype: PostForm
        """
        now = to_instant(now)
        decoded = decode_post(body, (FIELD_REQUEST,))
        node = parse_xml(decoded.message)
        request = element_to_message(node)
        if not isinstance(request, LogoutRequest):
            raise UnknownIssuer(getattr(request, 'issuer', None))

        issuer = request.issuer
        if not self.registry.has_partner(issuer) or \
                not self.registry.partner(issuer).entity.is_idp:
            raise UnknownIssuer(issuer)
        partner = self.registry.partner(issuer)

        result = verify_node(node, issuer, self.registry.store)
        if result is not None and not result:
            raise InvalidRequestSignature(issuer, result.reason)
        if result is None and partner.policy.require_signed_requests:
            raise InvalidRequestSignature(issuer, 'SignatureMissing')

        terminated = self.sessions.terminate_by_index(
            issuer, request.session_index
        )
        log.info('Logout from {} terminated {} sessions'.format(
            issuer, len(terminated)
        ))

        endpoints = partner.entity.role.single_logout_endpoints
        destination = endpoints[0].location if endpoints else None

        response = self._sign(LogoutResponse(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            destination=destination,
            in_response_to=request.id,
            status=STATUS_SUCCESS,
        ))
        return encode_post(
            emit_message(response), 'response', destination,
            decoded.relay_state,
        )


__all__ = [
    'DEFAULT_LANDING',
    'ServiceProvider',
]
