# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Shared type definitions used across hetvar modules."""

from __future__ import annotations

__all__ = [
    "BoundsMethod",
    "Criterion",
    "EstimatorKind",
    "ExperimentParams",
    "KernelName",
    "PathKind",
    "RegistryKey",
    "RunParams",
    "SegmentFunction",
]

from typing import (
    Any,
    Callable,
    List,
    Literal,
    TypeAlias,
    TypedDict,
    TypeVar,
)

import numpy as np

try:
    from typing import NotRequired  # type: ignore[import]
except ImportError:
    from typing_extensions import NotRequired

#: Type alias for the registered variance path kinds.
PathKind: TypeAlias = Literal["constant", "smooth", "break", "piecewise"]

#: Type alias for the registered smoothing kernels.
KernelName: TypeAlias = Literal["gaussian", "epanechnikov"]

#: Type alias for the information criteria.
Criterion: TypeAlias = Literal["aic", "aic_als", "aic_gls"]

#: Type alias for the confidence bound methods of PAM and PCM.
BoundsMethod: TypeAlias = Literal["standard", "ols", "als", "gls"]

#: Type alias for the coefficient estimators.
EstimatorKind: TypeAlias = Literal["ols", "gls", "als"]

#: Type alias for a segment function of a piecewise variance path.
SegmentFunction: TypeAlias = Callable[[float], "float | np.ndarray"]

#: Type variable for registry keys.
RegistryKey = TypeVar("RegistryKey", bound=str)


class RunParams(TypedDict, total=False):
    """Parameters accepted by :class:`hetvar.utils.config.RunConfig`.

    Attributes
    ----------
    command : str
        The command being run.
    input : str
        Path to the input dataset.
    output : str
        Path of the output table. Standard output when unset.
    p_max : int
        Largest candidate order.
    lag : int
        Order of a single PCM or fit.
    cap : int
        Order at and beyond which a selection is flagged unreliable.
    kernel : KernelName
        Smoothing kernel.
    bandwidth : float
        Fixed bandwidth; disables cross-validation.
    c_min, c_max : float
        Bandwidth grid limits as multiples of ``n ** -0.2``.
    n_points : int
        Number of bandwidth grid points.
    methods : list of Criterion
        Information criteria to evaluate.
    bounds : list of BoundsMethod
        Confidence bound methods for PAM and PCM.
    seed : int
        Master random seed.
    n : int
        Simulated sample size.
    replications : int
        Monte Carlo replications.
    variance : PathKind
        Variance path kind for simulation.
    gamma1, gamma2, rho : float
        Variance path parameters.
    break_fraction : float
        Location of an abrupt variance break in rescaled time.
    burn_in : int
        Discarded start-up steps of a simulation.
    presample : int
        Number of leading observations reserved as presample.
    difference, demean : bool
        Ingestion transformations.
    index_column : str
        Name of a non-numeric index column of the dataset.
    n_jobs : int
        Worker count for Monte Carlo runs.
    p : int
        Order of a simulated or fitted model.
    """

    command: NotRequired[str]
    input: NotRequired[str]
    output: NotRequired[str]
    p_max: NotRequired[int]
    lag: NotRequired[int]
    cap: NotRequired[int]
    kernel: NotRequired[KernelName]
    bandwidth: NotRequired[float]
    c_min: NotRequired[float]
    c_max: NotRequired[float]
    n_points: NotRequired[int]
    methods: NotRequired[List[Criterion]]
    bounds: NotRequired[List[BoundsMethod]]
    seed: NotRequired[int]
    n: NotRequired[int]
    replications: NotRequired[int]
    variance: NotRequired[PathKind]
    gamma1: NotRequired[float]
    gamma2: NotRequired[float]
    rho: NotRequired[float]
    break_fraction: NotRequired[float]
    burn_in: NotRequired[int]
    presample: NotRequired[int]
    difference: NotRequired[bool]
    demean: NotRequired[bool]
    index_column: NotRequired[str]
    n_jobs: NotRequired[int]
    p: NotRequired[int]


class ExperimentParams(TypedDict, total=False):
    """Parameters accepted by :class:`hetvar.montecarlo.ExperimentSpec`.

    Attributes
    ----------
    dgp : VarModel
        The simulated model.
    variance : PathKind
        ``"smooth"`` or ``"break"``.
    gamma1, gamma2, rho, break_fraction : float
        Variance path parameters.
    n : int
        Sample size of every replication.
    replications : int
        Number of replications.
    seed : int
        Master seed; replication ``k`` uses stream ``k``.
    p_max : int
        Largest candidate order or lag.
    cap : int
        Reliability cap of the selection reports.
    methods : list of Criterion
        Criteria of a selection experiment.
    bounds : list of BoundsMethod
        Bound methods of a bounds experiment.
    kernel : KernelName
        Smoothing kernel.
    bandwidth : float
        Fixed bandwidth; cross-validated per replication when unset.
    burn_in : int
        Discarded start-up steps.
    n_jobs : int
        Worker count.
    """

    dgp: NotRequired[Any]
    variance: NotRequired[PathKind]
    gamma1: NotRequired[float]
    gamma2: NotRequired[float]
    rho: NotRequired[float]
    break_fraction: NotRequired[float]
    n: NotRequired[int]
    replications: NotRequired[int]
    seed: NotRequired[int]
    p_max: NotRequired[int]
    cap: NotRequired[int]
    methods: NotRequired[List[Criterion]]
    bounds: NotRequired[List[BoundsMethod]]
    kernel: NotRequired[KernelName]
    bandwidth: NotRequired[float]
    burn_in: NotRequired[int]
    n_jobs: NotRequired[int]
