# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Partial autoregressive matrices (PAM) and partial cross-correlation
matrices (PCM) with their confidence bounds.

The PAM at lag h is the last coefficient block of a VAR(h) fit. The PCM at
lag p normalizes that block by the long-run covariances of the backward
and forward regression errors,

.. math::

    P(p) = (\\underline\\Sigma_u^{-1/2} \\otimes \\underline\\Sigma_w^{1/2})
    \\,\\mathrm{vec}(A_p).

Both vanish beyond the true order. Four bound methods are supported:

====================  ==========  =========================================
method                estimator   asymptotic covariance
====================  ==========  =========================================
``"standard"``        OLS         constant-variance formula
``"ols"``             OLS         heteroscedasticity-robust sandwich
``"als"``             ALS         inverse kernel-weighted Gram matrix
``"gls"``             GLS         inverse Gram matrix of the true path
====================  ==========  =========================================

Every bound is a 95% half-width ``1.96 * sqrt(v / n)``.
"""

__all__ = [
    "LongRunCovariances",
    "PamLag",
    "PamSequence",
    "PcmSequence",
    "PcmVector",
    "coefficient_bounds",
    "long_run_covariances",
    "matrix_sqrt_pd",
    "pam_sequence",
    "partial_diagnostics",
    "pcm",
    "pcm_sequence",
]

import logging
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple, get_args

import numpy as np
import pandas as pd

from .estimation import (
    EstimationResult,
    LambdaEstimates,
    als_estimate,
    build_design,
    gls_estimate,
    lambda_estimates,
    ols_estimate,
)
from .exceptions import HVEstimationError, HVNumericalError, HVValidationError
from .paths import BaseVariancePath
from .utils import Z_975, BoundsMethod, KernelName, solve_pd, symmetrize
from .variance_kernel import (
    BandwidthGrid,
    cross_validate_bandwidth,
    estimate_variance_path,
)
from .varproc import TimeSeries

logger = logging.getLogger(__name__)

# estimator behind the point estimate of each bound method
_ESTIMATOR: Dict[str, str] = {
    "standard": "ols",
    "ols": "ols",
    "als": "als",
    "gls": "gls",
}


def _spectral_power(matrix: np.ndarray, power: float) -> np.ndarray:
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise HVValidationError(
            "Expected a square matrix.", param="M", value=matrix.shape
        ) from None
    scale = max(1.0, float(np.abs(matrix).max()))
    if np.abs(matrix - matrix.T).max() > 1e-10 * scale:
        raise HVValidationError(
            "Expected a symmetric matrix.", param="M"
        ) from None

    values, vectors = np.linalg.eigh(symmetrize(matrix))
    if values.min() <= 0.0:
        raise HVValidationError(
            "Expected a positive definite matrix.",
            param="M",
            details={"min_eigenvalue": float(values.min())},
        ) from None
    return symmetrize((vectors * values**power) @ vectors.T)


def matrix_sqrt_pd(matrix: np.ndarray) -> np.ndarray:
    """Symmetric positive definite square root by spectral decomposition.

    Raises
    ------
    HVValidationError
        If the input is not symmetric positive definite.

    Examples
    --------
    >>> matrix_sqrt_pd(np.diag([4.0, 9.0]))
    array([[2., 0.],
           [0., 3.]])
    """

    return _spectral_power(matrix, 0.5)


def _validate_bounds(
    bounds: Sequence[BoundsMethod], path: object
) -> Tuple[BoundsMethod, ...]:
    bounds = tuple(dict.fromkeys(bounds))
    if not bounds or any(b not in get_args(BoundsMethod) for b in bounds):
        raise HVValidationError(
            "'bounds' must be a non-empty selection of "
            f"{', '.join(repr(b) for b in get_args(BoundsMethod))}.",
            param="bounds",
            value=bounds,
        ) from None
    if "gls" in bounds and path is None:
        raise HVValidationError(
            "GLS bounds need the true variance path.", param="path"
        ) from None
    return bounds


@dataclass(frozen=True, eq=False)
class _LagFit:
    """Every fit at one order, shared by PAM and PCM."""

    lag: int
    fits: Dict[str, EstimationResult]
    lambdas: LambdaEstimates

    @property
    def n(self) -> int:
        return self.fits["ols"].n

    @property
    def d(self) -> int:
        return self.fits["ols"].d

    def last_block(self, method: str) -> np.ndarray:
        """``vec(A_h)`` of the estimator behind a bound method."""

        return self.fits[_ESTIMATOR[method]].theta[-self.d**2 :]

    def last_block_avar(self, method: str) -> np.ndarray:
        d2 = self.d**2
        return self.lambdas.avar(method)[-d2:, -d2:]


def _fit_lag(
    ts: TimeSeries,
    lag: int,
    bounds: Tuple[BoundsMethod, ...],
    *,
    kernel: KernelName,
    bandwidth: float | None,
    path: BaseVariancePath | np.ndarray | None,
) -> _LagFit:
    ols = ols_estimate(ts, lag)
    fits = {"ols": ols}
    covariances = ols.sigma_u_hat
    if "als" in bounds:
        covariances = estimate_variance_path(ols.residuals, bandwidth, kernel)
        fits["als"] = als_estimate(ts, lag, covariances)
    if "gls" in bounds:
        fits["gls"] = gls_estimate(ts, lag, path)

    try:
        lambdas = lambda_estimates(
            ols.design,
            ols.residuals,
            covariances,
            ols.sigma_u_hat,
            true_path=path if "gls" in bounds else None,
        )
    except HVNumericalError as exc:
        raise HVEstimationError(
            f"Asymptotic covariances at order {lag} failed: {exc.message}",
            code=exc.code,
            param="p",
            value=lag,
        ) from exc
    return _LagFit(lag, fits, lambdas)


def _shared_bandwidth(
    ts: TimeSeries,
    p: int,
    bounds: Tuple[BoundsMethod, ...],
    kernel: KernelName,
    bandwidth: float | None,
    grid: BandwidthGrid | None,
) -> float | None:
    if "als" not in bounds or bandwidth is not None:
        return bandwidth
    residuals = ols_estimate(ts, p).residuals
    return cross_validate_bandwidth(residuals, grid, kernel)


@dataclass(frozen=True, eq=False)
class PamLag:
    """Last coefficient block of a VAR(h) fit under each bound method.

    Attributes
    ----------
    lag : int
        The order h.
    estimates : Dict[str, np.ndarray]
        ``d x d`` estimate of ``A_h`` per bound method.
    halfwidths : Dict[str, np.ndarray]
        ``d x d`` 95% half-widths per bound method.
    """

    lag: int
    estimates: Dict[str, np.ndarray]
    halfwidths: Dict[str, np.ndarray]

    def significant(self, method: BoundsMethod) -> np.ndarray:
        """Entries lying beyond their bounds."""

        return np.abs(self.estimates[method]) > self.halfwidths[method]


def _pam_lag(fit: _LagFit, bounds: Tuple[BoundsMethod, ...]) -> PamLag:
    d, n = fit.d, fit.n
    estimates, halfwidths = {}, {}
    for method in bounds:
        variances = np.clip(np.diag(fit.last_block_avar(method)), 0.0, None)
        estimates[method] = fit.last_block(method).reshape(d, d, order="F")
        halfwidths[method] = Z_975 * np.sqrt(variances / n).reshape(
            d, d, order="F"
        )
    return PamLag(fit.lag, estimates, halfwidths)


def _long_form(
    lag: int,
    method: str,
    estimate: np.ndarray,
    halfwidth: np.ndarray,
) -> list[dict]:
    d = estimate.shape[0]
    return [
        {
            "lag": lag,
            "row": i + 1,
            "col": j + 1,
            "method": method,
            "value": float(estimate[i, j]),
            "halfwidth": float(halfwidth[i, j]),
            "significant": bool(abs(estimate[i, j]) > halfwidth[i, j]),
        }
        for i in range(d)
        for j in range(d)
    ]


@dataclass(frozen=True, eq=False)
class PamSequence:
    """PAM at lags 1..p_max.

    Attributes
    ----------
    lags : Tuple[PamLag, ...]
        One entry per lag, in increasing order.
    bounds : Tuple[str, ...]
        Bound methods.
    bandwidth : float | None
        Kernel bandwidth shared by every ALS fit.
    n : int
        Common effective sample size.
    """

    lags: Tuple[PamLag, ...]
    bounds: Tuple[BoundsMethod, ...]
    bandwidth: float | None
    n: int

    def __getitem__(self, lag: int) -> PamLag:
        return self.lags[lag - self.lags[0].lag]

    def to_frame(self) -> pd.DataFrame:
        """Long-form table ``lag, row, col, method, value, halfwidth,
        significant`` with 1-based rows and columns."""

        rows = [
            row
            for entry in self.lags
            for method in self.bounds
            for row in _long_form(
                entry.lag,
                method,
                entry.estimates[method],
                entry.halfwidths[method],
            )
        ]
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class LongRunCovariances:
    """Long-run covariances of the backward (w) and forward (u) regression
    errors at one lag."""

    sigma_w: np.ndarray
    sigma_u: np.ndarray


def long_run_covariances(ts: TimeSeries, p: int) -> LongRunCovariances:
    """Estimates the long-run error covariances that normalize the PCM.

    ``sigma_w`` is the Schur complement of the regressor second moment of
    the order-p regression: the residual second moment of ``X_{t-p}``
    regressed on ``X_{t-1}, ..., X_{t-p+1}``. ``sigma_u`` is the residual
    second moment of the order ``p - 1`` forward regression on the same
    sample. For ``p = 1`` both equal ``n ** -1 * sum_t X_t X_t'``.

    Raises
    ------
    HVValidationError
        If ``p < 1`` or the presample is too short.
    HVNumericalError
        If the intermediate second moment is singular.
    """

    if p < 1:
        raise HVValidationError(
            "'p' must be at least 1.", param="p", value=p
        ) from None

    design = build_design(ts, p)
    d = design.d
    if p == 1:
        moment = symmetrize(design.responses.T @ design.responses / design.n)
        return LongRunCovariances(moment, moment.copy())

    moment = design.second_moment
    inner, last = moment[:-d, :-d], moment[-d:, -d:]
    cross = moment[:-d, -d:]
    sigma_w = last - cross.T @ solve_pd(
        inner, cross, what="intermediate lag second moment"
    )
    sigma_u = ols_estimate(ts, p - 1).sigma_u_hat
    return LongRunCovariances(symmetrize(sigma_w), sigma_u)


@dataclass(frozen=True, eq=False)
class PcmVector:
    """Partial cross-correlation at one lag under each bound method.

    Attributes
    ----------
    lag : int
        The lag p.
    estimates : Dict[str, np.ndarray]
        ``d^2`` vector ``P(p)`` per bound method.
    covariances : Dict[str, np.ndarray]
        Asymptotic covariance of ``sqrt(n) P(p)`` per bound method.
    halfwidths : Dict[str, np.ndarray]
        ``d^2`` vector of 95% half-widths per bound method.
    long_run : LongRunCovariances
        The normalizing covariances.
    n : int
        Effective sample size.
    """

    lag: int
    estimates: Dict[str, np.ndarray]
    covariances: Dict[str, np.ndarray]
    halfwidths: Dict[str, np.ndarray]
    long_run: LongRunCovariances
    n: int

    @property
    def d(self) -> int:
        return self.long_run.sigma_u.shape[0]

    def matrix(self, method: BoundsMethod) -> np.ndarray:
        """``P(p)`` as a d x d matrix (inverse of column stacking)."""

        return self.estimates[method].reshape(self.d, self.d, order="F")

    def significant(self, method: BoundsMethod) -> np.ndarray:
        return np.abs(self.estimates[method]) > self.halfwidths[method]

    def to_frame(self) -> pd.DataFrame:
        rows = [
            row
            for method in self.estimates
            for row in _long_form(
                self.lag,
                method,
                self.matrix(method),
                self.halfwidths[method].reshape(self.d, self.d, order="F"),
            )
        ]
        return pd.DataFrame(rows)


def _pcm_lag(
    ts: TimeSeries, fit: _LagFit, bounds: Tuple[BoundsMethod, ...]
) -> PcmVector:
    try:
        long_run = long_run_covariances(ts, fit.lag)
    except HVNumericalError as exc:
        raise HVEstimationError(
            f"Long-run covariances at lag {fit.lag} failed: {exc.message}",
            code=exc.code,
            param="p",
            value=fit.lag,
        ) from exc

    transform = np.kron(
        _spectral_power(long_run.sigma_u, -0.5),
        _spectral_power(long_run.sigma_w, 0.5),
    )
    estimates, covariances, halfwidths = {}, {}, {}
    for method in bounds:
        estimates[method] = transform @ fit.last_block(method)
        covariance = symmetrize(
            transform @ fit.last_block_avar(method) @ transform.T
        )
        covariances[method] = covariance
        halfwidths[method] = Z_975 * np.sqrt(
            np.clip(np.diag(covariance), 0.0, None) / fit.n
        )
    return PcmVector(
        fit.lag, estimates, covariances, halfwidths, long_run, fit.n
    )


@dataclass(frozen=True, eq=False)
class PcmSequence:
    """PCM at lags 1..p_max."""

    lags: Tuple[PcmVector, ...]
    bounds: Tuple[BoundsMethod, ...]
    bandwidth: float | None
    n: int

    def __getitem__(self, lag: int) -> PcmVector:
        return self.lags[lag - self.lags[0].lag]

    def to_frame(self) -> pd.DataFrame:
        """Long-form table, one row per lag, entry and method."""

        return pd.concat(
            [vector.to_frame() for vector in self.lags], ignore_index=True
        )


def _check_presample(ts: TimeSeries, p_max: int) -> None:
    if p_max < 1:
        raise HVValidationError(
            "'p_max' must be at least 1.", param="p_max", value=p_max
        ) from None
    if ts.presample < p_max:
        raise HVValidationError(
            f"Lags up to {p_max} need {p_max} presample values; the "
            f"series has {ts.presample}.",
            param="p_max",
            value=p_max,
        ) from None


def partial_diagnostics(
    ts: TimeSeries,
    p_max: int,
    bounds_methods: Sequence[BoundsMethod] = ("standard", "ols", "als"),
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
    with_pcm: bool = True,
) -> Tuple[PamSequence, PcmSequence | None]:
    """PAM and PCM at lags 1..p_max from one set of fits per lag.

    All lags are fitted on the same n observations and share one kernel
    bandwidth, cross-validated on the order ``p_max`` OLS residuals unless
    given.

    Parameters
    ----------
    ts : TimeSeries
        The sample; its presample must hold at least ``p_max`` values.
    p_max : int
        Largest lag.
    bounds_methods : Sequence[str], optional
        Among ``"standard"``, ``"ols"``, ``"als"`` and ``"gls"``.
    path : BaseVariancePath | np.ndarray, optional
        True covariance path, required by ``"gls"``.
    kernel : str, optional
        Default is ``"gaussian"``.
    bandwidth : float, optional
        Fixed bandwidth.
    grid : BandwidthGrid, optional
        Cross-validation grid.
    with_pcm : bool, optional
        Also compute the PCM. Default is ``True``.

    Returns
    -------
    Tuple[PamSequence, PcmSequence | None]
    """

    bounds = _validate_bounds(bounds_methods, path)
    _check_presample(ts, p_max)
    bandwidth = _shared_bandwidth(ts, p_max, bounds, kernel, bandwidth, grid)

    pam_lags, pcm_lags = [], []
    for lag in range(1, p_max + 1):
        fit = _fit_lag(
            ts, lag, bounds, kernel=kernel, bandwidth=bandwidth, path=path
        )
        pam_lags.append(_pam_lag(fit, bounds))
        if with_pcm:
            pcm_lags.append(_pcm_lag(ts, fit, bounds))
    logger.debug("Partial diagnostics at lags 1..%d (n=%d).", p_max, ts.n)

    pams = PamSequence(tuple(pam_lags), bounds, bandwidth, ts.n)
    pcms = (
        PcmSequence(tuple(pcm_lags), bounds, bandwidth, ts.n)
        if with_pcm
        else None
    )
    return pams, pcms


def pam_sequence(
    ts: TimeSeries,
    p_max: int,
    bounds_methods: Sequence[BoundsMethod] = ("standard", "ols", "als"),
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
) -> PamSequence:
    """PAM at lags 1..p_max with confidence bounds.

    Refer to :func:`partial_diagnostics` for the parameters.

    Examples
    --------
    >>> pams = pam_sequence(ts, 5, ("standard", "als"))
    >>> pams.to_frame().query("method == 'als' and significant")
    """

    pams, _ = partial_diagnostics(
        ts,
        p_max,
        bounds_methods,
        path=path,
        kernel=kernel,
        bandwidth=bandwidth,
        grid=grid,
        with_pcm=False,
    )
    return pams


def pcm_sequence(
    ts: TimeSeries,
    p_max: int,
    bounds_methods: Sequence[BoundsMethod] = ("standard", "ols", "als"),
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
) -> PcmSequence:
    """PCM at lags 1..p_max with confidence bounds."""

    _, pcms = partial_diagnostics(
        ts,
        p_max,
        bounds_methods,
        path=path,
        kernel=kernel,
        bandwidth=bandwidth,
        grid=grid,
    )
    return pcms


def pcm(
    ts: TimeSeries,
    p: int,
    bounds_methods: Sequence[BoundsMethod] = ("standard", "ols", "als"),
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
) -> PcmVector:
    """Partial cross-correlation at lag p with confidence bounds.

    Parameters
    ----------
    ts : TimeSeries
        The sample; its presample must hold at least p values.
    p : int
        Lag, at least 1.
    bounds_methods : Sequence[str], optional
        Among ``"standard"``, ``"ols"``, ``"als"`` and ``"gls"``.
    path : BaseVariancePath | np.ndarray, optional
        True covariance path, required by ``"gls"``.
    kernel, bandwidth, grid : optional
        Kernel settings; the bandwidth is cross-validated on the order-p
        OLS residuals unless given.

    Returns
    -------
    PcmVector
    """

    bounds = _validate_bounds(bounds_methods, path)
    _check_presample(ts, p)
    bandwidth = _shared_bandwidth(ts, p, bounds, kernel, bandwidth, grid)
    fit = _fit_lag(
        ts, p, bounds, kernel=kernel, bandwidth=bandwidth, path=path
    )
    return _pcm_lag(ts, fit, bounds)


def coefficient_bounds(
    ts: TimeSeries,
    p: int,
    bounds_methods: Sequence[BoundsMethod] = ("standard", "ols", "als"),
    *,
    path: BaseVariancePath | np.ndarray | None = None,
    kernel: KernelName = "gaussian",
    bandwidth: float | None = None,
    grid: BandwidthGrid | None = None,
) -> pd.DataFrame:
    """Every coefficient block of a VAR(p) fit with its 95% bounds.

    Returns
    -------
    pd.DataFrame
        Long-form table ``lag, row, col, method, value, halfwidth,
        significant`` where ``lag`` indexes the block ``A_lag``.
    """

    bounds = _validate_bounds(bounds_methods, path)
    _check_presample(ts, p)
    bandwidth = _shared_bandwidth(ts, p, bounds, kernel, bandwidth, grid)
    fit = _fit_lag(
        ts, p, bounds, kernel=kernel, bandwidth=bandwidth, path=path
    )

    d, d2 = fit.d, fit.d**2
    rows = []
    for method in bounds:
        theta = fit.fits[_ESTIMATOR[method]].theta
        variances = np.clip(np.diag(fit.lambdas.avar(method)), 0.0, None)
        halfwidths = Z_975 * np.sqrt(variances / fit.n)
        for i in range(p):
            block = slice(i * d2, (i + 1) * d2)
            rows.extend(
                _long_form(
                    i + 1,
                    method,
                    theta[block].reshape(d, d, order="F"),
                    halfwidths[block].reshape(d, d, order="F"),
                )
            )
    return pd.DataFrame(rows)
