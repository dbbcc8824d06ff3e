# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""OLS, GLS and ALS estimation of VAR(p) coefficients and the matrices
behind their asymptotic covariances.

Every estimator regresses the n responses ``X_t`` on the stacked lags
``Z_t = (X_{t-1}', ..., X_{t-p}')'``. GLS weights the normal equations by
the true covariances ``Sigma_t ** -1`` and ALS by the kernel estimates,
which is why both share :func:`_weighted_least_squares`. The Kronecker
layout of every ``p d^2`` square matrix follows the column-stacked
coefficient vector ``theta = vec([A_1, ..., A_p])``.
"""

__all__ = [
    "DesignSet",
    "EstimationResult",
    "LambdaEstimates",
    "TheoreticalLambdas",
    "als_estimate",
    "build_design",
    "covariance_stack",
    "fit_variance_path",
    "gls_estimate",
    "lambda_estimates",
    "ols_estimate",
    "theoretical_lambdas",
]

import logging
from dataclasses import dataclass
from typing import Any, Tuple, Union

import numpy as np

from .exceptions import HVEstimationError, HVNumericalError, HVValidationError
from .paths import BaseVariancePath
from .utils import (
    DEFAULT_QUADRATURE_POINTS,
    EstimatorKind,
    KernelName,
    inv_pd,
    midpoint_grid,
    pd_stack_inverse,
    solve_pd,
    symmetrize,
    vec,
)
from .variance_kernel import (
    BandwidthGrid,
    VariancePathEstimate,
    cross_validate_bandwidth,
    estimate_variance_path,
)
from .varproc import TimeSeries, VarModel, companion_matrix, is_stable

logger = logging.getLogger(__name__)

#: Anything that supplies a covariance for every sample date.
CovarianceContext = Union[BaseVariancePath, VariancePathEstimate, np.ndarray]


@dataclass(frozen=True, eq=False)
class DesignSet:
    """Responses and stacked lagged regressors of a VAR(p) regression.

    Attributes
    ----------
    responses : np.ndarray
        ``(n, d)`` array of ``X_t``.
    regressors : np.ndarray
        ``(n, d p)`` array whose row t is ``(X_{t-1}', ..., X_{t-p}')``.
    p : int
        Order.
    """

    responses: np.ndarray
    regressors: np.ndarray
    p: int

    @property
    def n(self) -> int:
        return self.responses.shape[0]

    @property
    def d(self) -> int:
        return self.responses.shape[1]

    @property
    def second_moment(self) -> np.ndarray:
        """``n ** -1 * sum_t Z_t Z_t'``."""

        return self.regressors.T @ self.regressors / self.n


def build_design(ts: TimeSeries, p: int) -> DesignSet:
    """Aligns every sample observation with its p lags.

    Raises
    ------
    HVValidationError
        If the presample holds fewer than p observations.

    Examples
    --------
    >>> ts = TimeSeries.from_array([0.0, 1.0, 2.0], presample=1)
    >>> build_design(ts, 1).regressors.ravel()
    array([0., 1.])
    """

    if p < 0 or ts.presample < p:
        raise HVValidationError(
            f"Order {p} needs at least {p} presample observations; the "
            f"series has {ts.presample}.",
            param="p",
            value=p,
        ) from None

    start, n = ts.presample, ts.n
    lags = [ts.values[start - i : start - i + n] for i in range(1, p + 1)]
    regressors = np.hstack(lags) if lags else np.zeros((n, 0))
    return DesignSet(ts.sample.copy(), regressors, p)


@dataclass(frozen=True, eq=False)
class EstimationResult:
    """Outcome of an OLS, GLS or ALS fit.

    Attributes
    ----------
    method : str
        ``"ols"``, ``"gls"`` or ``"als"``.
    theta : np.ndarray
        Column-stacked coefficients, length ``p d^2``.
    residuals : np.ndarray
        ``(n, d)`` residuals.
    design : DesignSet
        The regression the fit solved.
    gram : np.ndarray
        The ``p d^2`` square matrix of the normal equations divided by n.
    sigma_u_hat : np.ndarray | None
        ``n ** -1 * sum_t u_t u_t'`` (OLS only).
    variance_path_used : Any
        The covariance context of a GLS or ALS fit.
    """

    method: EstimatorKind
    theta: np.ndarray
    residuals: np.ndarray
    design: DesignSet
    gram: np.ndarray
    sigma_u_hat: np.ndarray | None = None
    variance_path_used: Any = None

    @property
    def n(self) -> int:
        return self.design.n

    @property
    def d(self) -> int:
        return self.design.d

    @property
    def p(self) -> int:
        return self.design.p

    @property
    def model(self) -> VarModel:
        if not self.p:
            return VarModel([], d=self.d)
        return VarModel.from_theta(self.theta, self.d)

    @property
    def coeff_matrices(self) -> np.ndarray:
        """``(p, d, d)`` array of ``A_1, ..., A_p``."""

        return self.model.coeffs


def _coefficients(design: DesignSet, theta: np.ndarray) -> np.ndarray:
    return theta.reshape(design.d, -1, order="F")


def covariance_stack(
    context: CovarianceContext, n: int, d: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Inverses and log-determinants of the covariance at every date."""

    if isinstance(context, VariancePathEstimate):
        if context.n != n or context.d != d:
            raise HVValidationError(
                f"Covariance estimate has shape ({context.n}, {context.d}); "
                f"expected ({n}, {d}).",
                param="path_estimate",
            ) from None
        return context.inverse, context.logdet
    if isinstance(context, BaseVariancePath):
        if context.d != d:
            raise HVValidationError(
                f"Variance path dimension {context.d} does not match {d}.",
                param="path",
            ) from None
        return pd_stack_inverse(context.sequence(n))

    stack = np.asarray(context, dtype=float)
    if stack.shape == (d, d):
        stack = np.broadcast_to(stack, (n, d, d))
    if stack.shape != (n, d, d):
        raise HVValidationError(
            f"Covariance sequence has shape {stack.shape}; expected "
            f"({n}, {d}, {d}).",
            param="path",
        ) from None
    return pd_stack_inverse(stack)


def _weighted_least_squares(
    design: DesignSet, inverse: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Solves the normal equations weighted by ``Sigma_t ** -1``.

    Returns the coefficient vector and the weighted Gram matrix
    ``n ** -1 * sum_t Z_t Z_t' (x) Sigma_t ** -1``.
    """

    z, y = design.regressors, design.responses
    size = z.shape[1] * design.d
    gram = np.einsum("ti,tj,tab->iajb", z, z, inverse).reshape(size, size)
    gram = symmetrize(gram / design.n)
    rhs = np.einsum("ti,tab,tb->ia", z, inverse, y).reshape(size) / design.n
    return solve_pd(gram, rhs, what="weighted Gram matrix"), gram


def _fit_failed(method: str, p: int, exc: HVNumericalError):
    return HVEstimationError(
        f"{method.upper()} fit at order {p} failed: {exc.message}",
        code=exc.code,
        param="p",
        value=p,
        details=exc.details,
    )


def ols_estimate(ts: TimeSeries, p: int) -> EstimationResult:
    """Equation-by-equation least squares fit of a VAR(p).

    Returns
    -------
    EstimationResult
        With ``sigma_u_hat`` the residual second moment.

    Raises
    ------
    HVEstimationError
        If the regressor second moment is singular.
    """

    design = build_design(ts, p)
    z, y = design.regressors, design.responses
    moment = design.second_moment
    try:
        coefficients = solve_pd(
            moment, z.T @ y / design.n, what="regressor second moment"
        ).T
    except HVNumericalError as exc:
        raise _fit_failed("ols", p, exc) from exc

    residuals = y - z @ coefficients.T
    return EstimationResult(
        method="ols",
        theta=vec(coefficients),
        residuals=residuals,
        design=design,
        gram=np.kron(moment, np.eye(design.d)),
        sigma_u_hat=symmetrize(residuals.T @ residuals / design.n),
    )


def _weighted_estimate(
    method: EstimatorKind, ts: TimeSeries, p: int, context: Any
) -> EstimationResult:
    design = build_design(ts, p)
    try:
        inverse, _ = covariance_stack(context, design.n, design.d)
        theta, gram = _weighted_least_squares(design, inverse)
    except HVNumericalError as exc:
        raise _fit_failed(method, p, exc) from exc

    residuals = design.responses - design.regressors @ (
        _coefficients(design, theta).T
    )
    return EstimationResult(
        method=method,
        theta=theta,
        residuals=residuals,
        design=design,
        gram=gram,
        variance_path_used=context,
    )


def gls_estimate(
    ts: TimeSeries, p: int, path: BaseVariancePath | np.ndarray
) -> EstimationResult:
    """Generalized least squares fit weighted by the true covariances.

    Parameters
    ----------
    ts : TimeSeries
        The sample.
    p : int
        Order.
    path : BaseVariancePath | np.ndarray
        The true path, an ``(n, d, d)`` covariance sequence, or a constant
        ``(d, d)`` covariance.

    Raises
    ------
    HVEstimationError
        If a covariance is not positive definite or the weighted Gram
        matrix is singular.
    """

    return _weighted_estimate("gls", ts, p, path)


def als_estimate(
    ts: TimeSeries, p: int, path_estimate: VariancePathEstimate | np.ndarray
) -> EstimationResult:
    """Adaptive least squares: GLS with kernel-estimated covariances."""

    return _weighted_estimate("als", ts, p, path_estimate)


def fit_variance_path(
    ts: TimeSeries,
    p: int,
    bandwidth: float | None = None,
    kernel: KernelName = "gaussian",
    grid: BandwidthGrid | None = None,
) -> VariancePathEstimate:
    """Kernel covariance path from the order-p OLS residuals.

    The bandwidth is cross-validated on ``grid`` unless given.
    """

    residuals = ols_estimate(ts, p).residuals
    if bandwidth is None:
        bandwidth = cross_validate_bandwidth(residuals, grid, kernel)
    return estimate_variance_path(residuals, bandwidth, kernel)


@dataclass(frozen=True, eq=False)
class LambdaEstimates:
    """Sample counterparts of the asymptotic covariance building blocks.

    Attributes
    ----------
    lambda1_hat : np.ndarray
        ``n ** -1 * sum_t Z_t Z_t' (x) S_t ** -1`` with S_t the kernel
        estimate.
    lambda2_hat : np.ndarray
        ``n ** -1 * sum_t Z_t Z_t' (x) u_t u_t'``.
    lambda3_hat : np.ndarray
        ``n ** -1 * sum_t Z_t Z_t' (x) I_d``.
    lambda4_hat : np.ndarray
        ``n ** -1 * sum_t Z_t Z_t' (x) Sigma_u ** -1``.
    avar_ols : np.ndarray
        Sandwich ``lambda3^-1 lambda2 lambda3^-1``.
    avar_als : np.ndarray
        ``lambda1^-1``.
    avar_std : np.ndarray
        ``lambda4^-1``, valid only under constant variance.
    avar_gls : np.ndarray | None
        Inverse of the Gram matrix weighted by the true covariances, when
        a true path was supplied.
    """

    lambda1_hat: np.ndarray
    lambda2_hat: np.ndarray
    lambda3_hat: np.ndarray
    lambda4_hat: np.ndarray
    avar_ols: np.ndarray
    avar_als: np.ndarray
    avar_std: np.ndarray
    avar_gls: np.ndarray | None = None

    def avar(self, method: str) -> np.ndarray:
        """Asymptotic covariance of a bound method."""

        match method:
            case "standard":
                return self.avar_std
            case "ols":
                return self.avar_ols
            case "als":
                return self.avar_als
            case "gls" if self.avar_gls is not None:
                return self.avar_gls
            case _:
                raise HVValidationError(
                    f"No asymptotic covariance for method {method!r}.",
                    param="method",
                    value=method,
                ) from None


def lambda_estimates(
    design: DesignSet,
    residuals: np.ndarray,
    path_estimate: VariancePathEstimate | np.ndarray,
    sigma_u_hat: np.ndarray,
    true_path: BaseVariancePath | np.ndarray | None = None,
) -> LambdaEstimates:
    """Assembles the sample covariance matrices of the OLS, ALS and
    standard asymptotic distributions.

    Parameters
    ----------
    design : DesignSet
        The regression.
    residuals : np.ndarray
        OLS residuals of the same regression.
    path_estimate : VariancePathEstimate | np.ndarray
        Kernel covariance estimates, or any covariance sequence.
    sigma_u_hat : np.ndarray
        Residual second moment.
    true_path : BaseVariancePath | np.ndarray, optional
        True covariances; adds :attr:`LambdaEstimates.avar_gls`.

    Raises
    ------
    HVNumericalError
        If the regressor second moment or ``lambda1_hat`` is singular.
    """

    z, n, d = design.regressors, design.n, design.d
    size = z.shape[1] * d
    moment = design.second_moment
    residuals = np.asarray(residuals, dtype=float)

    inverse, _ = covariance_stack(path_estimate, n, d)
    lambda1 = np.einsum("ti,tj,tab->iajb", z, z, inverse).reshape(size, size)
    lambda1 = symmetrize(lambda1 / n)
    lambda2 = np.einsum(
        "ti,tj,ta,tb->iajb", z, z, residuals, residuals
    ).reshape(size, size)
    lambda2 = symmetrize(lambda2 / n)
    lambda3 = np.kron(moment, np.eye(d))
    sigma_inverse = inv_pd(sigma_u_hat, what="residual covariance")
    lambda4 = np.kron(moment, sigma_inverse)

    moment_inverse = inv_pd(moment, what="regressor second moment")
    lambda3_inverse = np.kron(moment_inverse, np.eye(d))
    avar_ols = symmetrize(lambda3_inverse @ lambda2 @ lambda3_inverse)
    avar_als = inv_pd(lambda1, what="Lambda1 estimate")
    avar_std = symmetrize(np.kron(moment_inverse, sigma_u_hat))

    avar_gls = None
    if true_path is not None:
        true_inverse, _ = covariance_stack(true_path, n, d)
        _, gram = _weighted_least_squares(design, true_inverse)
        avar_gls = inv_pd(gram, what="GLS Gram matrix")

    return LambdaEstimates(
        lambda1,
        lambda2,
        lambda3,
        lambda4,
        avar_ols,
        avar_als,
        avar_std,
        avar_gls,
    )


@dataclass(frozen=True, eq=False)
class TheoreticalLambdas:
    """Population covariance building blocks of a model and variance path.

    Attributes
    ----------
    lambda1, lambda2, lambda3, lambda4 : np.ndarray
        ``p d^2`` square matrices.
    gamma : np.ndarray
        ``int_0^1 Gamma(r) dr``, the time-averaged second moment of the
        stacked regressors.
    """

    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: np.ndarray
    lambda4: np.ndarray
    gamma: np.ndarray

    @property
    def avar_ols(self) -> np.ndarray:
        inverse = inv_pd(self.lambda3)
        return symmetrize(inverse @ self.lambda2 @ inverse)

    @property
    def avar_gls(self) -> np.ndarray:
        return inv_pd(self.lambda1)

    @property
    def avar_std(self) -> np.ndarray:
        return inv_pd(self.lambda4)


def theoretical_lambdas(
    model: VarModel,
    path: BaseVariancePath,
    p: int | None = None,
    grid_size: int = DEFAULT_QUADRATURE_POINTS,
    tail_tol: float = 1e-12,
    max_terms: int = 100_000,
) -> TheoreticalLambdas:
    """Population counterparts of the sample covariance matrices.

    With ``Gamma(r) = sum_i D^i (e_1 e_1' (x) Sigma(r)) D^i'`` for the
    companion matrix D,

    - ``lambda1 = int Gamma(r) (x) Sigma(r) ** -1 dr``,
    - ``lambda2 = int Gamma(r) (x) Sigma(r) dr``,
    - ``lambda3 = int Gamma(r) dr (x) I_d``,
    - ``lambda4 = int Gamma(r) dr (x) (int Sigma(r) dr) ** -1``.

    Parameters
    ----------
    model : VarModel
        A stable model.
    path : BaseVariancePath
        Its innovation covariance path.
    p : int, optional
        Fitted order, at least ``model.p``. Default is ``model.p``.
    grid_size : int, optional
        Midpoint rule cells; breakpoints of the path are added as cell
        boundaries. Default is ``2000``.
    tail_tol : float, optional
        The series stops once the Frobenius norm of its latest term falls
        below this value at every date.
    max_terms : int, optional
        Series length after which the computation is abandoned.

    Raises
    ------
    HVValidationError
        If the model is unstable or ``p`` is out of range.
    HVNumericalError
        If the series does not converge within ``max_terms`` terms.
    """

    p = model.p if p is None else int(p)
    if p < max(model.p, 1):
        raise HVValidationError(
            f"Fitted order must be at least max(1, {model.p}).",
            param="p",
            value=p,
        ) from None
    if path.d != model.d:
        raise HVValidationError(
            "Variance path and model dimensions differ.", param="path"
        ) from None
    if not (report := is_stable(model)).stable:
        raise HVValidationError(
            "Population moments need a stable model.",
            param="model",
            details={"spectral_radius": report.spectral_radius},
        ) from None

    d = model.d
    size = d * p
    delta = companion_matrix(model.padded(p))
    nodes, weights = midpoint_grid(grid_size, path.breakpoints)
    sigmas = path(nodes)

    term = np.zeros((nodes.size, size, size))
    term[:, :d, :d] = sigmas
    gamma = term.copy()
    for count in range(1, max_terms + 1):
        term = delta @ term @ delta.T
        gamma += term
        if np.sqrt((term**2).sum(axis=(1, 2))).max() < tail_tol:
            break
    else:
        raise HVNumericalError(
            f"Second moment series did not converge in {max_terms} terms.",
            code="not_converged",
            details={"spectral_radius": report.spectral_radius},
        )
    logger.debug("Second moment series converged after %d terms.", count)

    sigma_inverse, _ = pd_stack_inverse(sigmas, what="variance path")
    full = size * d
    lambda1 = np.einsum("m,mij,mab->iajb", weights, gamma, sigma_inverse)
    lambda2 = np.einsum("m,mij,mab->iajb", weights, gamma, sigmas)
    average = np.einsum("m,mij->ij", weights, gamma)
    sigma_u = np.einsum("m,mab->ab", weights, sigmas)

    return TheoreticalLambdas(
        lambda1=symmetrize(lambda1.reshape(full, full)),
        lambda2=symmetrize(lambda2.reshape(full, full)),
        lambda3=np.kron(average, np.eye(d)),
        lambda4=np.kron(average, inv_pd(sigma_u, what="average variance")),
        gamma=symmetrize(average),
    )
