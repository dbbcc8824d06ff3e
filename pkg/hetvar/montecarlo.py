# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Replication harness for the simulation study.

Two experiments are provided. :func:`run_selection_experiment` records how
often each information criterion selects each candidate order, and
:func:`run_bounds_experiment` records how often the (1, 1) entry of the PAM
and of the PCM lies beyond its 95% bounds at each lag. Replication ``k``
draws from stream ``k`` of the master seed, so tables do not depend on the
worker count. Replications whose estimation fails are logged, counted and
left out of the denominators.
"""

__all__ = [
    "ExperimentSpec",
    "FrequencyTable",
    "run_bounds_experiment",
    "run_selection_experiment",
]

import logging
import time
import warnings
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Callable, Dict, Iterable, List, Literal, Tuple

import numpy as np
import pandas as pd
from typing_extensions import Unpack

from .exceptions import (
    HVError,
    HVEstimationError,
    HVValidationError,
    HVWarning,
)
from .io import format_csv
from .partial import partial_diagnostics
from .path import VariancePath
from .paths import BaseVariancePath
from .selection import select_order
from .utils import (
    DEFAULT_BURN_IN,
    DEFAULT_CAP,
    DEFAULT_GAMMA1,
    DEFAULT_RHO,
    EXPERIMENT_SPEC_PARAMETERS,
    JOBLIB_INSTALLED,
    BaseConfig,
    ExperimentParams,
    default_n_jobs,
)
from .varproc import TimeSeries, VarModel, is_stable, simulate

if JOBLIB_INSTALLED:
    from joblib import Parallel, delayed

logger = logging.getLogger(__name__)

# row label suffix of each bound method
_BOUND_LABELS: Dict[str, str] = {
    "standard": "S",
    "ols": "OLS",
    "als": "ALS",
    "gls": "GLS",
}

# metadata that differs between otherwise identical runs
_VOLATILE: Tuple[str, ...] = ("wall_time", "n_jobs")


class ExperimentSpec(BaseConfig):
    """Design of a Monte Carlo experiment.

    Unset parameters take the values of the simulation study: the
    benchmark VAR(2), the smooth variance path with ``gamma1=20``,
    ``gamma2=gamma1/3`` and ``rho=0.2``, ``n=100``, ``500`` replications,
    candidate orders 1..5 and all criteria and bound methods.

    Attributes
    ----------
    dgp : VarModel
        The simulated model; must be stable.
    variance : str
        ``"smooth"``, ``"break"`` or ``"constant"``.
    n : int
        Sample size of every replication.
    replications : int
        Number of replications N.
    seed : int
        Master seed.
    bandwidth : float, optional
        Fixed bandwidth; cross-validated per replication when unset.
    n_jobs : int
        Worker count; defaults to ``HETVAR_N_JOBS`` or ``1``.

    Notes
    -----
    Every key of :class:`~hetvar.utils.typing.ExperimentParams` is
    accepted. Assigning ``None`` removes a key.

    Examples
    --------
    >>> spec = ExperimentSpec(variance="break", n=200, seed=7)
    >>> spec.replications
    500
    """

    def __init__(self, **kwargs: Unpack[ExperimentParams]) -> None:
        defaults: Dict[str, Any] = {
            "dgp": VarModel.benchmark(),
            "variance": "smooth",
            "gamma1": DEFAULT_GAMMA1,
            "rho": DEFAULT_RHO,
            "break_fraction": 0.5,
            "n": 100,
            "replications": 500,
            "seed": 0,
            "p_max": 5,
            "cap": DEFAULT_CAP,
            "methods": ["aic", "aic_als", "aic_gls"],
            "bounds": ["standard", "ols", "als", "gls"],
            "kernel": "gaussian",
            "burn_in": DEFAULT_BURN_IN,
        }
        if "n_jobs" not in kwargs:
            defaults["n_jobs"] = default_n_jobs()
        super().__init__(**{**defaults, **kwargs})

    def _validate(self, key: str, value: Any) -> None:
        if key not in EXPERIMENT_SPEC_PARAMETERS:
            raise HVValidationError(
                f"'{key}' is not a valid attribute for ExperimentSpec.",
                param=key,
            ) from None

        if value is None:
            return

        if key == "dgp":
            if not isinstance(value, VarModel):
                raise HVValidationError(
                    "'dgp' must be a VarModel.", param=key
                ) from None
            if not is_stable(value).stable:
                raise HVValidationError(
                    "The data generating model must be stable.",
                    param=key,
                ) from None
            return

        self._check_common(key, value)

    def variance_path(self) -> BaseVariancePath:
        """The innovation covariance path of the design."""

        d = self.dgp.d
        if self.variance == "constant":
            return VariancePath("constant", d=d)
        if d != 2:
            raise HVValidationError(
                f"The {self.variance!r} variance design is bivariate; the "
                f"model has dimension {d}.",
                param="variance",
                value=self.variance,
            ) from None
        params = {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "rho": self.rho,
        }
        if self.variance == "break":
            params["break_fraction"] = self.break_fraction
        return VariancePath(self.variance, **params)

    def describe(self) -> Dict[str, Any]:
        """Plain description of the design for output metadata."""

        described = {
            key: value for key, value in self.items() if key != "dgp"
        }
        described["dgp"] = self.dgp.coeffs.tolist()
        described["path"] = self.variance_path().describe()
        return described


@dataclass(frozen=True, eq=False)
class FrequencyTable:
    """Percentage frequencies of a Monte Carlo experiment.

    Attributes
    ----------
    kind : Literal["selection", "bounds"]
        The experiment.
    rows : Tuple[str, ...]
        Row labels, e.g. ``"AIC_ALS"`` or ``"PCM_OLS"``.
    columns : Tuple[int, ...]
        Candidate orders or lags.
    values : np.ndarray
        Percentages, one row per label.
    replications : int
        Replications that completed.
    failures : int
        Replications whose estimation failed.
    metadata : Dict[str, Any]
        Design, seed, wall time and worker count.
    """

    kind: Literal["selection", "bounds"]
    rows: Tuple[str, ...]
    columns: Tuple[int, ...]
    values: np.ndarray
    replications: int
    failures: int
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def axis(self) -> str:
        return "p" if self.kind == "selection" else "lag"

    def __getitem__(self, key: Tuple[str, int]) -> float:
        row, column = key
        return float(
            self.values[self.rows.index(row), self.columns.index(column)]
        )

    def to_frame(self) -> pd.DataFrame:
        """Rows are labels, columns are ``p1..`` or ``lag1..``."""

        return pd.DataFrame(
            self.values,
            index=pd.Index(self.rows, name="method"),
            columns=[f"{self.axis}{column}" for column in self.columns],
        )

    def deterministic_metadata(self) -> Dict[str, Any]:
        """Metadata identical between runs of the same design."""

        return {
            key: value
            for key, value in self.metadata.items()
            if key not in _VOLATILE
        }

    def to_csv(self) -> str:
        return format_csv(
            self.to_frame().reset_index(), self.deterministic_metadata()
        )

    def to_text(self) -> str:
        """Aligned text with one decimal, headed by a summary line."""

        title = (
            f"{self.kind} frequencies (%) over {self.replications} "
            f"replications, {self.failures} failed\n"
        )
        body = self.to_frame().to_string(float_format=lambda v: f"{v:.1f}")
        return title + body + "\n"


@dataclass(frozen=True)
class _Replications:
    """Everything a worker needs to draw and analyse one replication."""

    model: VarModel
    path: BaseVariancePath
    n: int
    seed: int
    burn_in: int
    p_max: int
    kernel: str
    bandwidth: float | None

    def sample(self, k: int) -> TimeSeries:
        return simulate(
            self.model,
            self.path,
            self.n,
            self.seed,
            self.burn_in,
            presample=self.p_max,
            stream=k,
        )


def _selection_replication(
    task: _Replications, methods: List[str], cap: int, k: int
) -> Dict[str, int] | None:
    try:
        report = select_order(
            task.sample(k),
            task.p_max,
            methods,
            cap,
            path=task.path,
            kernel=task.kernel,
            bandwidth=task.bandwidth,
            warn=False,
        )
    except HVError as exc:
        logger.warning("Replication %d failed: %s", k, exc)
        return None
    return report.selected


def _bounds_replication(
    task: _Replications, bounds: List[str], k: int
) -> np.ndarray | None:
    try:
        pams, pcms = partial_diagnostics(
            task.sample(k),
            task.p_max,
            bounds,
            path=task.path,
            kernel=task.kernel,
            bandwidth=task.bandwidth,
        )
    except HVError as exc:
        logger.warning("Replication %d failed: %s", k, exc)
        return None

    # rows PAM_<method>..., then PCM_<method>...; columns lags
    rejected = np.zeros((2 * len(bounds), task.p_max), dtype=bool)
    for j, lag in enumerate(range(1, task.p_max + 1)):
        for i, method in enumerate(bounds):
            rejected[i, j] = pams[lag].significant(method)[0, 0]
            rejected[len(bounds) + i, j] = pcms[lag].significant(method)[0]
    return rejected


def _quietly(function: Callable[[int], Any], k: int) -> Tuple[Any, int]:
    """Runs replication k, logging its HVWarnings at DEBUG.

    Returns the outcome and the number of HVWarnings raised; other warnings
    are passed on.
    """

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", HVWarning)
        outcome = function(k)

    count = 0
    for warning in caught:
        if issubclass(warning.category, HVWarning):
            logger.debug("Replication %d: %s", k, warning.message)
            count += 1
        else:
            warnings.warn_explicit(
                warning.message,
                warning.category,
                warning.filename,
                warning.lineno,
            )
    return outcome, count


def _map(
    function: Callable[..., Any], items: Iterable[int], n_jobs: int
) -> List[Any]:
    """Applies a function to every item, in item order."""

    if n_jobs != 1 and JOBLIB_INSTALLED:
        return Parallel(n_jobs=n_jobs)(
            delayed(function)(item) for item in items
        )
    if n_jobs != 1:
        logger.warning(
            "joblib is not installed; running serially. Install the "
            "'parallel' extra to use %d workers.",
            n_jobs,
        )
    return [function(item) for item in items]


def _prepare(spec: ExperimentSpec) -> _Replications:
    return _Replications(
        model=spec.dgp,
        path=spec.variance_path(),
        n=spec.n,
        seed=spec.seed,
        burn_in=spec.burn_in,
        p_max=spec.p_max,
        kernel=spec.kernel,
        bandwidth=spec.bandwidth,
    )


def _finish(
    spec: ExperimentSpec, outcomes: List[Any], started: float
) -> Tuple[List[Any], Dict[str, Any]]:
    completed = [outcome for outcome, _ in outcomes if outcome is not None]
    failures = len(outcomes) - len(completed)
    warned = sum(1 for _, count in outcomes if count)
    if not completed:
        raise HVEstimationError(
            f"All {len(outcomes)} replications failed.",
            param="replications",
            value=len(outcomes),
        ) from None
    if failures:
        HVWarning.warn(
            f"{failures} of {len(outcomes)} replications failed and were "
            "excluded."
        )
    if warned:
        HVWarning.warn(
            "Estimation warnings, such as eigenvalue floors, occurred in "
            f"{warned} of {len(outcomes)} replications; rerun with debug "
            "logging for details."
        )

    wall_time = time.perf_counter() - started
    metadata = {
        **spec.describe(),
        "completed": len(completed),
        "failures": failures,
        "warned": warned,
        "wall_time": round(wall_time, 3),
    }
    logger.info(
        "Finished %d replications (%d failed) in %.1f s.",
        len(outcomes),
        failures,
        wall_time,
    )
    return completed, metadata


def run_selection_experiment(spec: ExperimentSpec) -> FrequencyTable:
    """Frequencies (in %) of the order selected by each criterion.

    Every replication simulates the design with ``p_max`` presample values
    and compares the orders 1..p_max on the same sample.

    Parameters
    ----------
    spec : ExperimentSpec
        The design.

    Returns
    -------
    FrequencyTable
        One row per criterion (``"AIC"``, ``"AIC_ALS"``, ``"AIC_GLS"``)
        and one column per order; each row sums to 100.

    Raises
    ------
    HVEstimationError
        If every replication fails.

    Examples
    --------
    >>> table = run_selection_experiment(ExperimentSpec(n=100, seed=7))
    >>> table["AIC_ALS", 2]  # doctest: +SKIP
    78.4
    """

    task = _prepare(spec)
    methods = list(dict.fromkeys(spec.methods))
    logger.info(
        "Selection experiment: %d replications of n=%d, %s variance.",
        spec.replications,
        spec.n,
        spec.variance,
    )
    started = time.perf_counter()
    outcomes = _map(
        partial(
            _quietly,
            partial(_selection_replication, task, methods, spec.cap),
        ),
        range(spec.replications),
        spec.n_jobs,
    )
    completed, metadata = _finish(spec, outcomes, started)

    orders = tuple(range(1, spec.p_max + 1))
    counts = np.zeros((len(methods), len(orders)))
    for selected in completed:
        for i, method in enumerate(methods):
            counts[i, selected[method] - 1] += 1
    return FrequencyTable(
        "selection",
        tuple(method.upper() for method in methods),
        orders,
        100.0 * counts / len(completed),
        len(completed),
        len(outcomes) - len(completed),
        {"experiment": "selection", **metadata, "n_jobs": spec.n_jobs},
    )


def run_bounds_experiment(spec: ExperimentSpec) -> FrequencyTable:
    """Frequencies (in %) of the (1, 1) PAM and PCM entries lying beyond
    their 95% bounds, per lag and bound method.

    Parameters
    ----------
    spec : ExperimentSpec
        The design; ``spec.bounds`` lists the bound methods.

    Returns
    -------
    FrequencyTable
        Rows ``PAM_S``, ``PAM_OLS``, ``PAM_ALS``, ``PAM_GLS`` then the
        matching ``PCM_*`` rows (those requested); one column per lag.

    Raises
    ------
    HVEstimationError
        If every replication fails.
    """

    task = _prepare(spec)
    bounds = list(dict.fromkeys(spec.bounds))
    logger.info(
        "Bounds experiment: %d replications of n=%d, %s variance.",
        spec.replications,
        spec.n,
        spec.variance,
    )
    started = time.perf_counter()
    outcomes = _map(
        partial(_quietly, partial(_bounds_replication, task, bounds)),
        range(spec.replications),
        spec.n_jobs,
    )
    completed, metadata = _finish(spec, outcomes, started)

    labels = [f"PAM_{_BOUND_LABELS[m]}" for m in bounds] + [
        f"PCM_{_BOUND_LABELS[m]}" for m in bounds
    ]
    return FrequencyTable(
        "bounds",
        tuple(labels),
        tuple(range(1, spec.p_max + 1)),
        100.0 * np.mean(np.stack(completed), axis=0),
        len(completed),
        len(outcomes) - len(completed),
        {"experiment": "bounds", **metadata, "n_jobs": spec.n_jobs},
    )
