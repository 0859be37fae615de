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
Identity provider engine.

The engine issues assertions for the sessions of its users, serves the
authentication requests of its service providers, resolves artifacts and
drives single logout.

Issued assertions are signed before they are encrypted, so the signature is
verified on the decrypted assertion.

Subclasses can alter messages on their way out by overriding
:meth:`IdentityProvider.prepare_assertion`,
:meth:`IdentityProvider.signed_assertion` and
:meth:`IdentityProvider.prepare_response`.
"""

from collections import namedtuple

from .errors import (
    IdpError, PolicyViolation, UnknownIssuer, SignatureRequired,
    InvalidRequestSignature, ReplayedRequestId, StaleRequest,
    WrongSourceId,
)
from .sessions import SessionStore
from .artifacts import ArtifactStore
from ..sp.replay import ReplayCache
from ..codec import (
    PARSE_ERRORS, MalformedXml, parse_xml, emit_assertion, emit_message,
    element_to_message,
)
from ..core.instant import to_instant, seconds, shift, format_instant
from ..core.types import (
    Assertion, Subject, SubjectConfirmation, Conditions, AuthnStatement,
    Response, LogoutRequest, AuthnRequest, ArtifactResolve,
    ArtifactResponse, LogoutResponse, new_id,
)
from ..core.urns import (
    CM_BEARER, STATUS_SUCCESS, CONSENT_UNSPECIFIED, AC_PASSWORD_PROTECTED,
    BINDING_NAMES, BINDING_POST,
)
from ..crypto import (
    UnknownAlias, NoEncryptionCert, sign_element, encrypt_assertion,
    verify_node,
)
from ..bindings import (
    BindingError, BackChannelError, encode_post, decode_post,
    decode_redirect, new_artifact, parse_artifact, source_id_for,
    encode_artifact_url, unwrap_envelope, wrap_envelope, fault_envelope,
)
from ..bindings.post import FIELD_REQUEST, FIELD_RESPONSE
from ..registry import RegistryError, UnknownPartner
from ..utils.filter import filter_attributes
from ..logging import get_logger


log = get_logger(__name__)

BEARER_EXTENSION = 600


Delivery = namedtuple('Delivery', ['binding', 'form', 'url', 'response'])
Delivery.__doc__ = """
How a response travels to a service provider.

:var str binding: ``post`` or ``artifact``.
:var PostForm form: Form to submit for the POST binding.
:var str url: Redirect URL carrying the artifacts for the artifact binding.
:var Response response: The response issued.
"""


class IdentityProvider:
    """
    Asserting party engine.

    :param FederationRegistry registry: Registry with the local identity
     provider and its service provider partners.
    :param AttributeSource source: Where users and their attributes come
     from.
    """

    def __init__(self, registry, source):
        self.registry = registry
        self.source = source
        self.sessions = SessionStore()
        self.artifacts = ArtifactStore(ttl=registry.settings.artifact_ttl)
        self.requests = ReplayCache('request')

    @property
    def entity_id(self):
        return self.registry.entity_id

    # Hooks

    def prepare_assertion(self, assertion, partner):
        """
        Last chance to change an assertion before it is signed.
        """
        return assertion

    def signed_assertion(self, assertion, partner):
        """
        Last chance to change an assertion after it is signed and before it
        is encrypted.
        """
        return assertion

    def prepare_response(self, response, partner):
        """
        Last chance to change a response before it is signed.
        """
        return response

    # Sessions

    def login(self, user_key, now, client_ip=None, session_index=None):
        """
        Open a session for a user of the attribute source.

        Users are not authenticated here, the caller vouches for them.

        :raise UnknownUser: if the user is not in the attribute source.

        :rtype: IdpSession
        """
        record = self.source.lookup(user_key)
        return self.sessions.create(
            user_key, record.name_id, record.name_id_format, now,
            client_ip=client_ip, session_index=session_index,
        )

    # Issuance

    def _service_provider(self, partner_id):
        partner = self.registry.partner(partner_id)
        if not partner.entity.is_sp:
            raise UnknownPartner(partner_id)
        return partner

    def _sign(self, message, emitter, partner_id):
        alias = self.registry.signing_alias
        try:
            return sign_element(
                emitter(message), message.id, alias, self.registry.store
            )
        except UnknownAlias:
            raise PolicyViolation(
                partner_id, 'no signing key {}'.format(alias)
            )

    def _sign_if_possible(self, message):
        if self.registry.signing_alias not in self.registry.store:
            return message
        return message._replace(signature=sign_element(
            emit_message(message), message.id,
            self.registry.signing_alias, self.registry.store,
        ))

    def issue_assertion(
            self, session, partner_id, now, in_response_to=None, acs=None):
        """
        Issue a response with an assertion about the user of a session.

        The assertion is valid from ``now`` for the validity of the partner
        policy. Its bearer confirmation outlives it by ten minutes. It is
        signed and encrypted as the partner policy says.

        :param IdpSession session: Session of the user.
        :param str partner_id: Service provider the response is for.
        :param datetime now: Current instant.
        :param str in_response_to: ID of the request being answered.
        :param IndexedEndpoint acs: Consumer endpoint to deliver to. The
         default one of the partner when not given.

        :raise UnknownPartner: if the partner is not a registered service
         provider.
        :raise UnknownUser: if the user left the attribute source.
        :raise PolicyViolation: if the policy cannot be honored.

        :rtype: Response
        """
        now = to_instant(now)
        partner = self._service_provider(partner_id)
        session = self.sessions.get(session.session_index)
        record = self.source.lookup(session.user_key)
        policy = partner.policy
        role = partner.entity.role

        if acs is None:
            acs = role.default_acs

        expiry = shift(now, seconds(policy.validity))

        assertion = Assertion(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            subject=Subject(
                name_id=record.name_id,
                name_id_format=record.name_id_format,
                confirmation=SubjectConfirmation(
                    method=CM_BEARER,
                    not_on_or_after=shift(expiry, seconds(BEARER_EXTENSION)),
                    recipient=acs.location,
                    in_response_to=in_response_to,
                ),
            ),
            conditions=Conditions(
                not_before=now,
                not_on_or_after=expiry,
                audiences=[partner.entity.entity_id],
            ),
            authn_statement=AuthnStatement(
                authn_instant=session.authenticated_at,
                session_index=session.session_index,
                locality_address=session.client_ip,
                authn_context=AC_PASSWORD_PROTECTED,
            ),
            attributes=filter_attributes(
                record.attributes, policy.release, policy.withhold
            ),
        )
        assertion = self.prepare_assertion(assertion, partner)

        if policy.sign_assertion:
            assertion = assertion._replace(signature=self._sign(
                assertion, emit_assertion, partner_id
            ))
        assertion = self.signed_assertion(assertion, partner)

        if policy.encrypt_assertion:
            try:
                assertion = encrypt_assertion(
                    emit_assertion(assertion), partner_id,
                    self.registry.store,
                )
            except NoEncryptionCert:
                raise PolicyViolation(
                    partner_id, 'no usable encryption certificate'
                )

        response = Response(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            destination=acs.location,
            status=STATUS_SUCCESS,
            assertion=assertion,
            in_response_to=in_response_to,
            consent=CONSENT_UNSPECIFIED,
        )
        response = self.prepare_response(response, partner)

        if policy.sign_response:
            response = response._replace(signature=self._sign(
                response, emit_message, partner_id
            ))

        self.sessions.add_participant(session.session_index, partner_id)

        log.info(
            'Issued response {} for {} to {} (signed={} encrypted={})'.format(
                response.id, session.user_key, partner_id,
                policy.sign_assertion, policy.encrypt_assertion,
            )
        )
        return response

    def issue_artifact(self, response, partner_id, now):
        """
        Store a response and create the artifact that resolves it.

        :rtype: Artifact
        """
        artifact = new_artifact(self.entity_id, self._resolution_index())
        self.artifacts.put(
            artifact.message_handle, emit_message(response), partner_id, now
        )
        return artifact

    def issue_artifact_pair(self, response, partner_id, now):
        """
        Store a response behind two artifacts that must be presented
        together.

        :rtype: tuple
        """
        index = self._resolution_index()
        first = new_artifact(self.entity_id, index)
        second = new_artifact(self.entity_id, index)
        self.artifacts.put_pair(
            first.message_handle, second.message_handle,
            emit_message(response), partner_id, now,
        )
        return first, second

    def _resolution_index(self):
        endpoint = self.registry.local.role.artifact_resolution_endpoint
        return endpoint.index if endpoint is not None else 0

    def sso(
            self, session, partner_id, now,
            relay_state=None, binding=None, in_response_to=None, acs=None,
            artifact_pair=None):
        """
        Issue a response and prepare its delivery to the partner.

        :param str binding: ``post`` or ``artifact``. The partner default
         binding when not given.
        :param bool artifact_pair: Deliver two artifacts instead of one.
         The partner policy decides when not given.

        :raise PolicyViolation: if the partner has no consumer endpoint for
         the binding.

        :rtype: Delivery
        """
        partner = self._service_provider(partner_id)
        policy = partner.policy
        role = partner.entity.role

        if acs is None:
            binding = binding or policy.default_binding
            if binding not in ('post', 'artifact'):
                binding = 'post'
            acs = role.acs_for(BINDING_NAMES[binding])
            if acs is None:
                raise PolicyViolation(
                    partner_id,
                    'no consumer endpoint for binding {}'.format(binding)
                )
        else:
            binding = 'post' if acs.binding == BINDING_POST else 'artifact'

        response = self.issue_assertion(
            session, partner_id, now,
            in_response_to=in_response_to, acs=acs,
        )

        if binding == 'post':
            form = encode_post(
                emit_message(response), 'response', acs.location,
                relay_state,
            )
            return Delivery(binding, form, None, response)

        if artifact_pair is None:
            artifact_pair = policy.artifact_pair
        if artifact_pair:
            artifacts = self.issue_artifact_pair(response, partner_id, now)
        else:
            artifacts = [self.issue_artifact(response, partner_id, now)]

        url = encode_artifact_url(acs.location, artifacts, relay_state)
        return Delivery(binding, None, url, response)

    # Requests

    def _verify_request(self, node, request, partner):
        result = verify_node(node, request.issuer, self.registry.store)
        if result is None:
            if partner.policy.require_signed_requests:
                log.warning('Unsigned request {} from {}'.format(
                    request.id, request.issuer
                ))
                raise SignatureRequired(request.issuer)
            return
        if not result:
            log.warning('Bad signature on request {} from {}: {}'.format(
                request.id, request.issuer, result.reason
            ))
            raise InvalidRequestSignature(request.issuer, result.reason)

    def _requesting_partner(self, issuer):
        if not self.registry.has_partner(issuer):
            raise UnknownIssuer(issuer)
        partner = self.registry.partner(issuer)
        if not partner.entity.is_sp:
            raise UnknownIssuer(issuer)
        return partner

    def _parse(self, message, kind):
        node = parse_xml(message)
        parsed = element_to_message(node)
        if not isinstance(parsed, kind):
            raise MalformedXml('expected {}, got {}'.format(
                kind.__name__, node.display_name
            ))
        return node, parsed

    def handle_authn_request(self, data, session, now, binding=None):
        """
        Answer an authentication request of a service provider.

        The relay state of the request is echoed unmodified.

        :param data: Redirect URL, or body of the submitted POST form.
        :param IdpSession session: Session of the user.
        :param datetime now: Current instant.
        :param str binding: ``redirect`` or ``post``. Strings are taken as
         redirect URLs and bytes as POST bodies when not given.

        :raise BindingError: if the request cannot be decoded.
        :raise CodecError: if the request does not parse.
        :raise UnknownIssuer: if the issuer is not a service provider
         partner.
        :raise SignatureRequired: if the partner must sign and did not.
        :raise InvalidRequestSignature: if the signature does not verify.
        :raise StaleRequest: if the request was issued before the replay
         window or in the future, both widened by the partner clock skew.
        :raise ReplayedRequestId: if the request was already served.

        :rtype: Delivery
        """
        now = to_instant(now)
        if binding is None:
            binding = 'redirect' if isinstance(data, str) else 'post'

        if binding == 'redirect':
            decoded = decode_redirect(data, (FIELD_REQUEST,))
        else:
            decoded = decode_post(data, (FIELD_REQUEST,))

        node, request = self._parse(decoded.message, AuthnRequest)
        partner = self._requesting_partner(request.issuer)
        self._verify_request(node, request, partner)

        ttl = seconds(self.registry.settings.request_ttl)
        skew = seconds(partner.policy.clock_skew)
        issued = to_instant(request.issue_instant)
        if issued < shift(now, -(ttl + skew)) or issued > shift(now, skew):
            raise StaleRequest(request.id, format_instant(issued))

        # Remembered past the last instant it could be accepted
        if not self.requests.check_and_record(
                request.id, shift(issued, ttl + skew + seconds(1)), now):
            raise ReplayedRequestId(request.id)

        acs = partner.entity.role.default_acs
        if request.acs_url is not None:
            acs = partner.entity.role.acs_by_location(request.acs_url)
            if acs is None:
                raise PolicyViolation(
                    request.issuer,
                    'unregistered consumer URL {}'.format(request.acs_url)
                )

        log.info('Serving request {} of {}'.format(
            request.id, request.issuer
        ))
        return self.sso(
            session, request.issuer, now,
            relay_state=decoded.relay_state,
            in_response_to=request.id,
            acs=acs,
        )

    # Artifact resolution

    def resolve_artifact(self, data, now):
        """
        Resolve the artifacts of an ArtifactResolve message.

        :param bytes data: The ArtifactResolve message.
        :param datetime now: Current instant.

        :raise WrongSourceId: if an artifact was not issued here.
        :raise ArtifactError: if the artifacts do not resolve.

        :return: The message behind the artifacts.
        :rtype: bytes
        """
        node, request = self._parse(data, ArtifactResolve)
        partner = self._requesting_partner(request.issuer)
        self._verify_request(node, request, partner)

        artifacts = [parse_artifact(text) for text in request.artifacts]
        local = source_id_for(self.entity_id)
        for artifact in artifacts:
            if artifact.source_id != local:
                raise WrongSourceId(artifact.source_id)

        if len(artifacts) == 1:
            return self.artifacts.resolve(
                artifacts[0].message_handle, now, requester=request.issuer
            )

        first, second = artifacts
        return self.artifacts.resolve_pair(
            first.message_handle, second.message_handle, now,
            requester=request.issuer,
        )

    def serve_artifact_resolve(self, envelope, now):
        """
        Back channel endpoint of the artifact resolution service.

        Failures are answered with a fault whose code is the code of the
        error.

        :param bytes envelope: Request envelope.

        :return: Response envelope.
        :rtype: bytes
        """
        now = to_instant(now)
        try:
            data = unwrap_envelope(envelope)
            request = element_to_message(parse_xml(data))
            message = self.resolve_artifact(data, now)
        except (
                IdpError, RegistryError, BindingError, BackChannelError,
        ) + PARSE_ERRORS as e:
            log.warning('Artifact resolution failed: {}'.format(e))
            return fault_envelope(e.code, str(e))

        answer = ArtifactResponse(
            id=new_id(),
            issue_instant=now,
            issuer=self.entity_id,
            in_response_to=request.id,
            status=STATUS_SUCCESS,
            message=message,
        )
        return wrap_envelope(emit_message(answer))

    # Single logout

    def initiate_single_logout(self, session_index, now):
        """
        Start the logout of a session at every participant.

        The session ends when every participant answered, or when
        :meth:`expire_logouts` gives up waiting. A session without
        participants ends immediately.

        :param str session_index: Index of the session.
        :param datetime now: Current instant.

        :raise UnknownSession: if the session was never live.

        :return: A list of :class:`PostForm`, one LogoutRequest per
         participant with a logout endpoint. Empty for an already
         terminated session.
        :rtype: list
        """
        now = to_instant(now)
        if self.sessions.was_terminated(session_index) and \
                session_index not in self.sessions:
            log.info('Session {} already terminated'.format(session_index))
            return []

        session = self.sessions.get(session_index)
        if self.sessions.is_logging_out(session_index):
            return []

        forms = []
        requests = {}
        for partner_id in sorted(session.participants):
            if not self.registry.has_partner(partner_id):
                log.warning('Participant {} no longer registered'.format(
                    partner_id
                ))
                continue

            role = self.registry.partner(partner_id).entity.role
            endpoints = role.single_logout_endpoints
            if not endpoints:
                log.warning('Participant {} has no logout endpoint'.format(
                    partner_id
                ))
                continue
            endpoint = next(
                (e for e in endpoints if e.binding == BINDING_POST),
                endpoints[0]
            )

            request = self._sign_if_possible(LogoutRequest(
                id=new_id(),
                issue_instant=now,
                issuer=self.entity_id,
                destination=endpoint.location,
                name_id=session.name_id,
                name_id_format=session.name_id_format,
                session_index=session_index,
            ))
            forms.append(encode_post(
                emit_message(request), 'request', endpoint.location
            ))
            requests[request.id] = partner_id

        self.sessions.start_logout(session_index, requests, now)
        log.info('Logout of session {} sent to {} participants'.format(
            session_index, len(forms)
        ))
        return forms

    def handle_logout_response(self, data, now):
        """
        Record the answer of a participant to a LogoutRequest.

        :param bytes data: Body of the submitted POST form.

        :raise UnknownIssuer: if the issuer is not a service provider
         partner.
        :raise InvalidRequestSignature: if a signature does not verify.

        :return: The index of the session the answer was for, or ``None``.
        :rtype: str
        """
        decoded = decode_post(data, (FIELD_RESPONSE,))
        node, response = self._parse(decoded.message, LogoutResponse)
        partner = self._requesting_partner(response.issuer)

        result = verify_node(node, response.issuer, self.registry.store)
        if result is not None and not result:
            raise InvalidRequestSignature(response.issuer, result.reason)
        if result is None and partner.policy.require_signed_requests:
            raise SignatureRequired(response.issuer)

        if response.status != STATUS_SUCCESS:
            log.warning('Participant {} answered logout with {}'.format(
                response.issuer, response.status
            ))

        return self.sessions.complete_logout(
            response.in_response_to, response.issuer
        )

    def expire_logouts(self, now):
        """
        Terminate the sessions whose participants did not answer within
        the logout timeout.

        :rtype: list
        """
        return self.sessions.expire_logouts(
            now, self.registry.settings.logout_timeout
        )

    def expire(self, now):
        """
        Forget the artifacts and request IDs past their retention window and
        terminate the sessions whose logout timed out.

        :param datetime now: Current instant.

        :return: Number of entries forgotten.
        :rtype: int
        """
        now = to_instant(now)
        forgotten = self.artifacts.expire(now) + self.requests.evict(now)
        forgotten += len(self.expire_logouts(now))
        if forgotten:
            log.debug('Forgot {} expired entries'.format(forgotten))
        return forgotten


__all__ = [
    'Delivery',
    'IdentityProvider',
]
