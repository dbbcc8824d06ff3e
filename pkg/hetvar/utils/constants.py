# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

__all__ = [
    "BANDWIDTH_C_MAX",
    "BANDWIDTH_C_MIN",
    "BANDWIDTH_N_POINTS",
    "BANDWIDTH_RATE",
    "CONDITION_LIMIT",
    "DEFAULT_BURN_IN",
    "DEFAULT_CAP",
    "DEFAULT_GAMMA1",
    "DEFAULT_QUADRATURE_POINTS",
    "DEFAULT_RHO",
    "EXPERIMENT_SPEC_PARAMETERS",
    "FLOOR_SCALE",
    "N_JOBS_ENV",
    "RUN_CONFIG_PARAMETERS",
    "SERIES_TOLERANCE",
    "Z_975",
]

from typing import Tuple

from .typing import ExperimentParams, RunParams

# config parameter names
RUN_CONFIG_PARAMETERS: Tuple[str, ...] = tuple(RunParams.__annotations__)
EXPERIMENT_SPEC_PARAMETERS: Tuple[str, ...] = tuple(
    ExperimentParams.__annotations__
)

# two-sided 95% normal quantile used for every confidence bound
Z_975: float = 1.96

# relative condition number beyond which a Gram matrix is singular
CONDITION_LIMIT: float = 1e12

# eigenvalue floor is FLOOR_SCALE * tr(sigma_u) / d
FLOOR_SCALE: float = 1e-6

# bandwidth grid c * n ** -BANDWIDTH_RATE for c in [c_min, c_max]
BANDWIDTH_RATE: float = 0.2
BANDWIDTH_C_MIN: float = 0.5
BANDWIDTH_C_MAX: float = 3.0
BANDWIDTH_N_POINTS: int = 12

DEFAULT_BURN_IN: int = 200
DEFAULT_CAP: int = 5
DEFAULT_QUADRATURE_POINTS: int = 2000
SERIES_TOLERANCE: float = 1e-12

# simulation design
DEFAULT_GAMMA1: float = 20.0
DEFAULT_RHO: float = 0.2

# environment variable holding the default worker count
N_JOBS_ENV: str = "HETVAR_N_JOBS"
