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
HTTP service hosting both parties of a federation.

Endpoints, relative to the base URL of the service:

``GET /sso``
    Identity provider. Serves redirect binding AuthnRequests, or starts an
    identity provider initiated exchange with the ``sp``, ``binding`` and
    ``RelayState`` query parameters.
``POST /sso``
    Identity provider. Serves POST binding AuthnRequests.
``POST /acs`` and ``GET /acs/artifact``
    Service provider consumer endpoints for the POST and artifact bindings.
``POST /artifact-resolve``
    Identity provider artifact resolution service.
``GET /slo`` and ``POST /slo``
    Starts the logout of the browser session, receives LogoutRequests at the
    service provider and LogoutResponses at the identity provider.
``GET /metadata/idp`` and ``GET /metadata/sp``
    Metadata of both parties.
``GET /start``
    Service provider initiated exchange for the ``target`` query parameter.
``GET /app``
    Stub application landing page.

Users are not authenticated. The identity provider opens a session for the
configured fixture user the first time a browser address shows up.
"""

from time import monotonic
from threading import Lock, Thread
from signal import signal, SIGINT, SIGTERM
from socketserver import ThreadingMixIn
from wsgiref.simple_server import make_server, WSGIServer, WSGIRequestHandler

from bottle import Bottle, HTTPResponse, request, response, redirect

from .simulator import EXCHANGE_ERRORS, load_federation
from ..idp import IdentityProvider
from ..sp import ServiceProvider
from ..bindings import HttpBackChannel, PostForm, render_post
from ..bindings.post import FIELD_REQUEST, FIELD_RESPONSE
from ..core.instant import utcnow
from ..templates import render
from ..logging import get_logger


log = get_logger(__name__)


SESSION_COOKIE = 'samlforge_session'
METADATA_TYPE = 'application/samlmetadata+xml'
SOAP_TYPE = 'text/xml; charset=utf-8'


class ThreadingWSGIServer(ThreadingMixIn, WSGIServer):
    daemon_threads = True


class QuietHandler(WSGIRequestHandler):
    def log_message(self, format, *args):
        pass


def error_page(status, summary):
    return HTTPResponse(
        render('error.html', title='Request rejected', summary=summary),
        status=status,
    )


class RequestLogger:
    """
    Bottle plugin logging one line per request and turning exchange errors
    into HTTP 400 answers.
    """

    name = 'request_logger'
    api = 2

    def apply(self, callback, route):
        def wrapper(*args, **kwargs):
            start = monotonic()
            try:
                result = callback(*args, **kwargs)
                status = response.status_code
            except HTTPResponse as e:
                status = e.status_code
                raise
            except EXCHANGE_ERRORS as e:
                status = 400
                log.warning('{} {}: {}'.format(
                    request.method, request.path, e
                ))
                raise error_page(400, '{}: {}'.format(e.code, e))
            except Exception:
                status = 500
                log.exception('Unexpected error serving {}'.format(
                    request.path
                ))
                raise error_page(500, 'Internal error')
            finally:
                log.info(
                    'request method={} path={} status={} duration_ms={} '
                    'remote={}'.format(
                        request.method, request.path, status,
                        int((monotonic() - start) * 1000),
                        request.remote_addr,
                    )
                )
            return result
        return wrapper


class FederationService:
    """
    Both parties of a federation behind one HTTP application.

    :param dict config: Validated service configuration.
    :param Federation federation: Registries and attribute source. Loaded
     from the configuration when not given.
    """

    def __init__(self, config, federation=None):
        self.config = config
        service = config['service']
        self.host = service['host']
        self.port = service['port']
        self.base_url = (
            service['base_url'] or
            'http://{}:{}'.format(self.host, self.port)
        ).rstrip('/')
        self.fixture_user = service['fixture_user']
        self.sweep_interval = service['sweep_interval']

        federation = federation or load_federation(config)
        self.idp = IdentityProvider(federation.idp, federation.source)
        self.sp = ServiceProvider(
            federation.sp,
            back_channel=HttpBackChannel(timeout=service['timeout']),
            skew=config['sp']['skew'],
            check_locality=config['sp']['check_locality'],
            default_landing=config['sp']['default_landing'],
        )

        self._sessions = {}
        self._lock = Lock()
        self._server = None
        self._swept_at = monotonic()

        self.app = Bottle()
        self.app.install(RequestLogger())
        self.app.add_hook('before_request', self._sweep_due)
        self._routes()

    def _routes(self):
        app = self.app
        app.route('/sso', 'GET', self.sso_get)
        app.route('/sso', 'POST', self.sso_post)
        app.route('/acs', 'POST', self.acs_post)
        app.route('/acs/artifact', ['GET', 'POST'], self.acs_artifact)
        app.route('/artifact-resolve', 'POST', self.artifact_resolve)
        app.route('/slo', 'GET', self.slo_start)
        app.route('/slo', 'POST', self.slo_post)
        app.route('/metadata/<role:re:idp|sp>', 'GET', self.metadata)
        app.route('/start', 'GET', self.start)
        app.route('/app', 'GET', self.landing)
        app.route('/app/<path:path>', 'GET', self.landing)

    # Identity provider

    def _session_for(self, address):
        now = utcnow()
        with self._lock:
            index = self._sessions.get(address)
            if index is not None and index in self.idp.sessions:
                return self.idp.sessions.get(index)
            session = self.idp.login(
                self.fixture_user, now, client_ip=address
            )
            self._sessions[address] = session.session_index
            return session

    def _deliver(self, delivery):
        if delivery.binding == 'post':
            return render_post(delivery.form)
        redirect(delivery.url, 302)

    def sso_get(self):
        session = self._session_for(request.remote_addr)
        if FIELD_REQUEST in request.query:
            return self._deliver(self.idp.handle_authn_request(
                request.url, session, utcnow(), binding='redirect'
            ))

        partner = request.query.get('sp')
        if partner is None:
            partners = sorted(
                p.entity.entity_id
                for p in self.idp.registry.service_providers()
            )
            if not partners:
                raise error_page(400, 'No service provider registered')
            partner = partners[0]

        return self._deliver(self.idp.sso(
            session, partner, utcnow(),
            relay_state=request.query.get('RelayState'),
            binding=request.query.get('binding'),
        ))

    def sso_post(self):
        session = self._session_for(request.remote_addr)
        return self._deliver(self.idp.handle_authn_request(
            request.body.read(), session, utcnow(), binding='post'
        ))

    def artifact_resolve(self):
        response.content_type = SOAP_TYPE
        return self.idp.serve_artifact_resolve(
            request.body.read(), utcnow()
        )

    # Service provider

    def _report(self, report):
        if not report.valid:
            raise error_page(400, report.summary())
        response.set_cookie(
            SESSION_COOKIE, report.session.session_id, path='/'
        )
        redirect(report.redirect_url, 303)

    def acs_post(self):
        return self._report(self.sp.consume(
            request.body.read(), request.remote_addr, utcnow(),
            acs_url=self.base_url + request.path,
        ))

    def acs_artifact(self):
        if request.method == 'POST':
            data = request.body.read().decode('utf-8', errors='replace')
        else:
            data = request.query_string
        return self._report(self.sp.consume_artifact(
            data, request.remote_addr, utcnow()
        ))

    def start(self):
        target = request.query.get('target') or self.sp.default_landing
        outgoing = self.sp.build_authn_request(target, utcnow())
        if isinstance(outgoing, PostForm):
            return render_post(outgoing)
        redirect(outgoing.url, 302)

    def landing(self, path=None):
        session = self.sp.sessions.get(request.get_cookie(SESSION_COOKIE))
        return render('landing.html', title='Application', session=session)

    # Single logout

    def slo_start(self):
        with self._lock:
            index = self._sessions.get(request.remote_addr)
        if index is None or index not in self.idp.sessions:
            return render('landing.html', title='Signed out', session=None)

        forms = self.idp.initiate_single_logout(index, utcnow())
        if not forms:
            return render('landing.html', title='Signed out', session=None)
        if len(forms) > 1:
            log.warning('Browser can only carry the first of {} logout '
                        'requests'.format(len(forms)))
        return render_post(forms[0], title='Single Logout')

    def slo_post(self):
        body = request.body.read()
        if FIELD_REQUEST in request.forms:
            return render_post(
                self.sp.handle_logout_request(body, utcnow()),
                title='Single Logout',
            )
        if FIELD_RESPONSE in request.forms:
            self.idp.handle_logout_response(body, utcnow())
            return render('landing.html', title='Signed out', session=None)
        raise error_page(400, 'No logout message in form')

    # Housekeeping

    def sweep(self, now=None):
        """
        Forget the expired state of both parties.

        :param datetime now: Instant to expire at. Defaults to the current
         instant.

        :return: Number of entries forgotten.
        :rtype: int
        """
        now = now or utcnow()
        forgotten = self.idp.expire(now) + self.sp.expire(now)
        with self._lock:
            self._sessions = {
                address: index
                for address, index in self._sessions.items()
                if index in self.idp.sessions
            }
        log.debug('Sweep forgot {} entries'.format(forgotten))
        return forgotten

    def _sweep_due(self):
        with self._lock:
            if monotonic() - self._swept_at < self.sweep_interval:
                return
            self._swept_at = monotonic()
        self.sweep()

    # Metadata

    def metadata(self, role):
        engine = self.idp if role == 'idp' else self.sp
        response.content_type = METADATA_TYPE
        return engine.registry.export_metadata()

    # Server

    def serve(self):
        """
        Serve until SIGINT or SIGTERM.
        """
        self._server = make_server(
            self.host, self.port, self.app,
            server_class=ThreadingWSGIServer, handler_class=QuietHandler,
        )

        def stop(signum, frame):
            log.info('Signal {} received, shutting down ...'.format(signum))
            Thread(target=self._server.shutdown).start()

        signal(SIGINT, stop)
        signal(SIGTERM, stop)

        log.info('Serving {} on {}:{} ...'.format(
            self.base_url, self.host, self.port
        ))
        try:
            self._server.serve_forever()
        finally:
            self._server.server_close()
            self.sp.back_channel.close()
        log.info('Service stopped')


__all__ = [
    'RequestLogger',
    'FederationService',
]
