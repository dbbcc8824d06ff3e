# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Gaussian likelihoods, information criteria and lag order selection.

Three criteria share the penalty ``2 p d^2 / n`` and differ in the
likelihood they penalize:

- ``aic`` uses the OLS fit and the constant residual covariance,
- ``aic_als`` uses the ALS fit and the kernel covariance path,
- ``aic_gls`` uses the GLS fit and the true covariance path, so it is only
  available for simulated data.

Constants ``d ln(2 pi)`` are dropped from every likelihood.
"""

__all__ = [
    "CriterionTrace",
    "CriterionValue",
    "SelectionReport",
    "criterion",
    "gaussian_neg2ll",
    "select_order",
]

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, NamedTuple, Sequence, Tuple, get_args

import numpy as np
import pandas as pd
from numpy.typing import ArrayLike

from .estimation import (
    als_estimate,
    build_design,
    covariance_stack,
    gls_estimate,
    ols_estimate,
)
from .exceptions import HVValidationError, HVWarning
from .paths import BaseVariancePath
from .utils import DEFAULT_CAP, Criterion, KernelName
from .variance_kernel import (
    BandwidthGrid,
    VariancePathEstimate,
    cross_validate_bandwidth,
    estimate_variance_path,
)
from .varproc import TimeSeries

logger = logging.getLogger(__name__)


class CriterionValue(NamedTuple):
    """One information criterion evaluated at one order."""

    criterion: Criterion
    p: int
    neg2ll: float
    penalty: float
    value: float


def _neg2ll(
    residuals: np.ndarray, inverse: np.ndarray, logdet: np.ndarray
) -> float:
    quadratic = np.einsum("ta,tab,tb->t", residuals, inverse, residuals)
    return float(np.mean(logdet + quadratic))


def gaussian_neg2ll(
    theta: ArrayLike,
    sigma: BaseVariancePath | VariancePathEstimate | ArrayLike,
    ts: TimeSeries,
    p: int,
) -> float:
    """Minus twice the average conditional Gaussian log-likelihood.

    .. math::

        n^{-1} \\sum_t \\ln\\det\\Sigma_t + u_t'\\Sigma_t^{-1}u_t

    Parameters
    ----------
    theta : array_like
        Column-stacked coefficients of length ``p d^2``.
    sigma : BaseVariancePath | VariancePathEstimate | array_like
        A constant ``(d, d)`` covariance, an ``(n, d, d)`` sequence, a
        variance path, or a kernel estimate.
    ts : TimeSeries
        The sample.
    p : int
        Order.

    Raises
    ------
    HVNumericalError
        If a covariance is not positive definite.

    Examples
    --------
    >>> ts = TimeSeries.from_array([1.0, 2.0])
    >>> gaussian_neg2ll([], [[1.0]], ts, 0)
    2.5
    """

    design = build_design(ts, p)
    theta = np.asarray(theta, dtype=float)
    if theta.size != p * design.d**2:
        raise HVValidationError(
            f"'theta' must have {p * design.d**2} entries.",
            param="theta",
            value=theta.size,
        ) from None
    coefficients = theta.reshape(design.d, -1, order="F")
    residuals = design.responses - design.regressors @ coefficients.T
    inverse, logdet = covariance_stack(sigma, design.n, design.d)
    return _neg2ll(residuals, inverse, logdet)


def _penalty(p: int, d: int, n: int) -> float:
    return 2.0 * p * d * d / n


def criterion(
    ts: TimeSeries,
    p: int,
    method: Criterion,
    context: Any = None,
    *,
    bandwidth: float | None = None,
    kernel: KernelName = "gaussian",
    grid: BandwidthGrid | None = None,
) -> CriterionValue:
    """Evaluates one information criterion at order p.

    Parameters
    ----------
    ts : TimeSeries
        The sample.
    p : int
        Order.
    method : Literal["aic", "aic_als", "aic_gls"]
        Criterion.
    context : Any, optional
        For ``aic_als``, the covariance estimates used to weight and
        evaluate the fit; when omitted they are computed from the order-p
        OLS residuals. For ``aic_gls``, the true variance path (required).
        Ignored for ``aic``.
    bandwidth, kernel, grid : optional
        Kernel settings of an ``aic_als`` context computed here.

    Returns
    -------
    CriterionValue
        ``value = neg2ll + 2 p d^2 / n``.
    """

    match method:
        case "aic":
            fit = ols_estimate(ts, p)
            context = fit.sigma_u_hat
        case "aic_als":
            if context is None:
                residuals = ols_estimate(ts, p).residuals
                if bandwidth is None:
                    bandwidth = cross_validate_bandwidth(
                        residuals, grid, kernel
                    )
                context = estimate_variance_path(residuals, bandwidth, kernel)
            fit = als_estimate(ts, p, context)
        case "aic_gls":
            if context is None:
                raise HVValidationError(
                    "'aic_gls' needs the true variance path.",
                    param="context",
                ) from None
            fit = gls_estimate(ts, p, context)
        case _:
            raise HVValidationError(
                f"{method!r} is not a known criterion.",
                param="method",
                value=method,
            ) from None

    inverse, logdet = covariance_stack(context, fit.n, fit.d)
    neg2ll = _neg2ll(fit.residuals, inverse, logdet)
    penalty = _penalty(p, fit.d, fit.n)
    return CriterionValue(method, p, neg2ll, penalty, neg2ll + penalty)


@dataclass(frozen=True)
class CriterionTrace:
    """Every requested criterion at one candidate order.

    Attributes
    ----------
    p : int
        Candidate order.
    aic, aic_als, aic_gls : float | None
        Criterion values; ``None`` when not requested.
    neg2ll : Dict[str, float]
        Likelihood component of each criterion.
    """

    p: int
    aic: float | None = None
    aic_als: float | None = None
    aic_gls: float | None = None
    neg2ll: Dict[str, float] = field(default_factory=dict)

    def value(self, method: Criterion) -> float:
        return getattr(self, method)


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of :func:`select_order`.

    Attributes
    ----------
    traces : Tuple[CriterionTrace, ...]
        One trace per candidate order, in increasing order.
    selected : Dict[str, int]
        Minimizing order of each criterion, ties broken toward smaller p.
    flagged : Dict[str, bool]
        Whether each selection reached the reliability cap.
    cap : int
        The reliability cap.
    bandwidth : float | None
        Kernel bandwidth shared by every ``aic_als`` evaluation.
    n, d : int
        Common effective sample size and dimension.
    """

    traces: Tuple[CriterionTrace, ...]
    selected: Dict[str, int]
    flagged: Dict[str, bool]
    cap: int
    bandwidth: float | None
    n: int
    d: int

    @property
    def methods(self) -> List[str]:
        return list(self.selected)

    @property
    def orders(self) -> List[int]:
        return [trace.p for trace in self.traces]

    def values(self, method: Criterion) -> np.ndarray:
        """Criterion values over the candidate orders."""

        return np.array([trace.value(method) for trace in self.traces])

    def to_frame(self) -> pd.DataFrame:
        """Long-form table with one row per criterion and order."""

        rows = [
            {
                "criterion": method,
                "p": trace.p,
                "neg2ll": trace.neg2ll[method],
                "penalty": _penalty(trace.p, self.d, self.n),
                "value": trace.value(method),
                "selected": trace.p == self.selected[method],
                "flagged": self.flagged[method],
            }
            for method in self.selected
            for trace in self.traces
        ]
        return pd.DataFrame(rows)


def select_order(
    ts: TimeSeries,
    p_max: int,
    methods: Sequence[Criterion] = ("aic", "aic_als"),
    cap: int = DEFAULT_CAP,
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
    p_min: int = 1,
    warn: bool = True,
) -> SelectionReport:
    """Selects the lag order minimizing each information criterion.

    Every candidate order is fitted on the same n observations, which
    follow the first ``ts.presample`` values. One bandwidth is shared by
    all ``aic_als`` evaluations: it is cross-validated on the order
    ``p_max`` OLS residuals unless given. The covariance path itself is
    re-estimated from the OLS residuals of every candidate order.

    Parameters
    ----------
    ts : TimeSeries
        The sample; its presample must hold at least ``p_max`` values.
    p_max : int
        Largest candidate order.
    methods : Sequence[str], optional
        Criteria among ``"aic"``, ``"aic_als"`` and ``"aic_gls"``.
    cap : int, optional
        A selection at or beyond this order is flagged unreliable, since
        the minimum may lie beyond the scan. Default is ``5``.
    path : BaseVariancePath | np.ndarray, optional
        True covariance path, required by ``aic_gls``.
    kernel : str, optional
        Smoothing kernel. Default is ``"gaussian"``.
    bandwidth : float, optional
        Fixed bandwidth.
    grid : BandwidthGrid, optional
        Cross-validation grid. Defaults to the grid of the sample size.
    p_min : int, optional
        Smallest candidate order. Default is ``1``.
    warn : bool, optional
        Emit an :class:`~hetvar.exceptions.HVWarning` for flagged
        selections. Default is ``True``.

    Returns
    -------
    SelectionReport

    Raises
    ------
    HVValidationError
        If the presample is too short, a criterion is unknown, or
        ``aic_gls`` is requested without a path.
    HVEstimationError
        If some candidate order cannot be fitted.

    Examples
    --------
    >>> ts = simulate(VarModel.benchmark(), VariancePath("smooth"), 200, 7,
    ...               presample=5)
    >>> report = select_order(ts, 5, methods=("aic", "aic_als"))
    >>> report.selected  # doctest: +SKIP
    {'aic': 5, 'aic_als': 2}
    """

    methods = list(dict.fromkeys(methods))
    if unknown := [m for m in methods if m not in get_args(Criterion)]:
        raise HVValidationError(
            f"Unknown criteria {unknown!r}.", param="methods", value=unknown
        ) from None
    if not 0 <= p_min <= p_max:
        raise HVValidationError(
            "Need 0 <= p_min <= p_max.", param="p_max", value=p_max
        ) from None
    if ts.presample < p_max:
        raise HVValidationError(
            f"Comparing orders up to {p_max} needs {p_max} presample "
            f"values; the series has {ts.presample}.",
            param="p_max",
            value=p_max,
        ) from None
    if "aic_gls" in methods and path is None:
        raise HVValidationError(
            "'aic_gls' needs the true variance path.", param="path"
        ) from None

    if "aic_als" in methods and bandwidth is None:
        bandwidth = cross_validate_bandwidth(
            ols_estimate(ts, p_max).residuals, grid, kernel
        )
        logger.debug("Shared bandwidth %.4g from order %d.", bandwidth, p_max)

    traces = []
    for p in range(p_min, p_max + 1):
        values = {}
        for method in methods:
            context = path if method == "aic_gls" else None
            values[method] = criterion(
                ts, p, method, context, bandwidth=bandwidth, kernel=kernel
            )
        traces.append(
            CriterionTrace(
                p,
                neg2ll={m: v.neg2ll for m, v in values.items()},
                **{m: v.value for m, v in values.items()},
            )
        )

    orders = np.array([trace.p for trace in traces])
    selected, flagged = {}, {}
    for method in methods:
        scores = np.array([trace.value(method) for trace in traces])
        selected[method] = int(orders[int(np.argmin(scores))])
        flagged[method] = selected[method] >= cap
        if flagged[method] and warn:
            HVWarning.warn(
                f"{method.upper()} selected p={selected[method]}, at or "
                f"beyond the reliability cap {cap}."
            )

    logger.info(
        "Selected orders %s over p=%d..%d (n=%d).",
        selected,
        p_min,
        p_max,
        ts.n,
    )
    return SelectionReport(
        tuple(traces),
        selected,
        flagged,
        cap,
        bandwidth if "aic_als" in methods else None,
        ts.n,
        ts.d,
    )
