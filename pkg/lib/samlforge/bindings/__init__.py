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
Transport bindings: HTTP-POST, HTTP-Redirect, HTTP-Artifact and the back
channel envelope.
"""

from .errors import (
    BindingError, RelayStateTooLong, MissingField, BadBase64,
    BadUrlEncoding, UrlTooLong, BadDeflate, BadLength, BadTypeCode,
    BackChannelError, ConnectFailed, Timeout, FaultResponse,
    MalformedEnvelope,
)
from .post import (
    PostForm, DecodedMessage, encode_post, render_post, serialize_post,
    decode_post, form_fields,
)
from .redirect import (
    RedirectUrl, encode_redirect, decode_redirect, render_redirect_response,
)
from .artifact import (
    Artifact, new_artifact, parse_artifact, source_id_for,
    encode_artifact_url, decode_artifact_form,
)
from .backchannel import (
    wrap_envelope, fault_envelope, unwrap_envelope, BackChannel,
    HttpBackChannel, LoopbackBackChannel,
)


__all__ = [
    'BindingError',
    'RelayStateTooLong',
    'MissingField',
    'BadBase64',
    'BadUrlEncoding',
    'UrlTooLong',
    'BadDeflate',
    'BadLength',
    'BadTypeCode',
    'BackChannelError',
    'ConnectFailed',
    'Timeout',
    'FaultResponse',
    'MalformedEnvelope',
    'PostForm',
    'DecodedMessage',
    'encode_post',
    'render_post',
    'serialize_post',
    'decode_post',
    'form_fields',
    'RedirectUrl',
    'encode_redirect',
    'decode_redirect',
    'render_redirect_response',
    'Artifact',
    'new_artifact',
    'parse_artifact',
    'source_id_for',
    'encode_artifact_url',
    'decode_artifact_form',
    'wrap_envelope',
    'fault_envelope',
    'unwrap_envelope',
    'BackChannel',
    'HttpBackChannel',
    'LoopbackBackChannel',
]
