# Copyright 2026 The belltrace authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Exact nonclassicality quantifiers and their trained surrogates.

The heavy lifting happens in the compiled extension; this package just
re-exports its public surface.
"""

from ._core import (
    ConfigError,
    DataError,
    Ensemble,
    UsageError,
    bilocal_inequality_value,
    chsh_optimal_settings,
    chsh_symmetries,
    classify,
    generate,
    ij_functionals,
    nbl_distance,
    nbl_distance_ij,
    nl_distance,
    pair_correlators,
    poly2_features,
    swap_correlators,
    werner_swap_correlators,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Ensemble",
    "UsageError",
    "bilocal_inequality_value",
    "chsh_optimal_settings",
    "chsh_symmetries",
    "classify",
    "generate",
    "ij_functionals",
    "nbl_distance",
    "nbl_distance_ij",
    "nl_distance",
    "pair_correlators",
    "poly2_features",
    "swap_correlators",
    "werner_swap_correlators",
]

__version__ = "0.1.0"
