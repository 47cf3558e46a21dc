# Copyright 2026 The ppreuse Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python bindings for the ppreuse library."""

from ._ppreuse import (
    CoverageMatrix,
    Error,
    ModelError,
    ParseError,
    StructuralError,
    SyntheticSuite,
    cli,
    compare,
    drop_sequence,
    minimize,
    run,
    search_threshold,
    tests_to_reach,
    train,
    verify_equivalence,
)

__all__ = [
    "CoverageMatrix",
    "Error",
    "ModelError",
    "ParseError",
    "StructuralError",
    "SyntheticSuite",
    "cli",
    "compare",
    "drop_sequence",
    "minimize",
    "run",
    "search_threshold",
    "tests_to_reach",
    "train",
    "verify_equivalence",
]
