# Copyright 2026 The Actipol Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Activity-dependency policy engine."""

from ._actipol import (
    EngineError,
    IllegalTransitionError,
    PolicyEngine,
    SchemaViolationError,
    UnknownActivityError,
    __version__,
    apply_transition,
    canonicalize_fixture,
    lint_policy,
    oracle_decide,
    policy_to_canonical_json,
)

__all__ = [
    "EngineError",
    "IllegalTransitionError",
    "PolicyEngine",
    "SchemaViolationError",
    "UnknownActivityError",
    "__version__",
    "apply_transition",
    "canonicalize_fixture",
    "lint_policy",
    "oracle_decide",
    "policy_to_canonical_json",
]
