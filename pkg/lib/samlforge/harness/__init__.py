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
Tooling wiring both engines together: capture decoding, scenario
simulation with fault injection and the HTTP service.
"""

from .scenario import (
    InconsistentScenario, Scenario, ScenarioResult, load_scenarios,
)
from .trace import TraceEvent, Trace, write_journal
from .browser import Browser
from .faults import FaultyIdentityProvider
from .simulator import Federation, Simulator, load_federation
from .decode import Decoded, decode_capture, format_decoded
from .bootstrap import bootstrap, keygen


__all__ = [
    'InconsistentScenario',
    'Scenario',
    'ScenarioResult',
    'load_scenarios',
    'TraceEvent',
    'Trace',
    'write_journal',
    'Browser',
    'FaultyIdentityProvider',
    'Federation',
    'Simulator',
    'load_federation',
    'Decoded',
    'decode_capture',
    'format_decoded',
    'bootstrap',
    'keygen',
]
