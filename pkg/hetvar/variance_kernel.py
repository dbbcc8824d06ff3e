# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Nonparametric estimation of the innovation covariance path.

The estimate at date t is a kernel-weighted average of the residual outer
products of every other date,

.. math::

    \\check\\Sigma_t = \\sum_{i \\neq t} w_{ti}(b)\\, \\hat u_i \\hat u_i',
    \\qquad w_{ti} \\propto K\\left(\\frac{t - i}{nb}\\right),

with weights normalized to one. Dates are 0-based throughout: row ``t`` of
an array of n residuals corresponds to rescaled time ``(t + 1) / n``.
"""

__all__ = [
    "BandwidthGrid",
    "EpanechnikovKernel",
    "GaussianKernel",
    "KernelSpec",
    "VariancePathEstimate",
    "cross_validate_bandwidth",
    "cross_validation_curve",
    "estimate_variance_path",
    "kernel_weights",
]

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import List, get_args

import numpy as np
from numpy.typing import ArrayLike
from scipy.stats import norm

from .exceptions import HVNumericalError, HVValidationError, HVWarning
from .utils import (
    BANDWIDTH_C_MAX,
    BANDWIDTH_C_MIN,
    BANDWIDTH_N_POINTS,
    BANDWIDTH_RATE,
    FLOOR_SCALE,
    KernelName,
    Registry,
    floor_eigenvalues,
    pd_stack_inverse,
)

logger = logging.getLogger(__name__)

# rows of the weight matrix built at once
_CHUNK_ELEMENTS = 2_000_000


class BaseKernel(Registry, ABC):
    """A bounded symmetric density used to weight neighbouring dates."""

    @abstractmethod
    def __call__(self, z: np.ndarray) -> np.ndarray: ...

    @property
    def name(self) -> str:
        return self.registry_key

    def __repr__(self) -> str:
        return f"KernelSpec({self.name!r})"


class GaussianKernel(BaseKernel, registry_key="gaussian"):
    """Standard normal density."""

    def __call__(self, z: np.ndarray) -> np.ndarray:
        return norm.pdf(z)


class EpanechnikovKernel(BaseKernel, registry_key="epanechnikov"):
    """``0.75 * (1 - z ** 2)`` on ``[-1, 1]``, zero elsewhere."""

    def __call__(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        return 0.75 * np.clip(1.0 - z * z, 0.0, None)


class KernelSpec:
    """Factory for smoothing kernels.

    Parameters
    ----------
    name : Literal["gaussian", "epanechnikov"], optional
        Default is ``"gaussian"``.

    Returns
    -------
    GaussianKernel | EpanechnikovKernel
        A callable evaluating ``K(z)``.
    """

    def __new__(
        cls, name: "KernelName | BaseKernel" = "gaussian"
    ) -> BaseKernel:
        if isinstance(name, BaseKernel):
            return name
        if name not in (names := cls.get_available_kernels()):
            raise HVValidationError(
                f"{name!r} is an invalid kernel. Available kernels are "
                f"{', '.join(repr(k) for k in names)}.",
                param="kernel",
                value=name,
            ) from None
        return BaseKernel.registry[name]()

    @classmethod
    def get_available_kernels(cls) -> List[str]:
        return list(get_args(KernelName))


@dataclass(frozen=True)
class BandwidthGrid:
    """Candidate bandwidths ``c * b_n`` for c log-spaced in
    ``[c_min, c_max]``.

    Parameters
    ----------
    b_n : float
        Base rate value, ``n ** -0.2`` by default.
    c_min, c_max : float, optional
        Multipliers bounding the grid. Default is ``0.5`` and ``3``.
    n_points : int, optional
        Grid size. Default is ``12``.
    """

    b_n: float
    c_min: float = BANDWIDTH_C_MIN
    c_max: float = BANDWIDTH_C_MAX
    n_points: int = BANDWIDTH_N_POINTS

    def __post_init__(self) -> None:
        if not (self.b_n > 0 and self.c_min > 0 and self.n_points >= 1):
            raise HVValidationError(
                "Bandwidth grid needs b_n > 0, c_min > 0 and n_points >= 1.",
                param="grid",
                value=(self.b_n, self.c_min, self.n_points),
            ) from None
        if self.n_points > 1 and not self.c_min < self.c_max:
            raise HVValidationError(
                "'c_min' must be smaller than 'c_max'.",
                param="c_max",
                value=self.c_max,
            ) from None

    @classmethod
    def default(
        cls,
        n: int,
        c_min: float = BANDWIDTH_C_MIN,
        c_max: float = BANDWIDTH_C_MAX,
        n_points: int = BANDWIDTH_N_POINTS,
    ) -> "BandwidthGrid":
        """Grid around ``b_n = n ** -0.2``."""

        return cls(float(n) ** -BANDWIDTH_RATE, c_min, c_max, n_points)

    @classmethod
    def single(cls, bandwidth: float) -> "BandwidthGrid":
        """A grid holding only ``bandwidth``."""

        return cls(float(bandwidth), 1.0, 1.0, 1)

    @property
    def values(self) -> np.ndarray:
        """Strictly increasing bandwidths."""

        return np.geomspace(
            self.c_min * self.b_n, self.c_max * self.b_n, self.n_points
        )


@dataclass(frozen=True, eq=False)
class VariancePathEstimate:
    """Kernel estimate of the innovation covariance at every sample date.

    Attributes
    ----------
    matrices : np.ndarray
        Floored estimates, shape ``(n, d, d)``.
    bandwidth : float
        Bandwidth used.
    kernel : str
        Kernel name.
    floor : float
        Eigenvalue floor applied.
    n_floored : int
        Number of dates whose estimate was floored.
    """

    matrices: np.ndarray
    bandwidth: float
    kernel: str
    floor: float
    n_floored: int = 0

    @property
    def n(self) -> int:
        return self.matrices.shape[0]

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @cached_property
    def _inverse_and_logdet(self) -> tuple:
        return pd_stack_inverse(
            self.matrices, what="estimated covariance path"
        )

    @property
    def inverse(self) -> np.ndarray:
        """Inverses of :attr:`matrices`."""

        return self._inverse_and_logdet[0]

    @property
    def logdet(self) -> np.ndarray:
        """Log-determinants of :attr:`matrices`."""

        return self._inverse_and_logdet[1]

    def diagonal(self) -> np.ndarray:
        """Estimated variance paths, shape ``(n, d)``."""

        return np.diagonal(self.matrices, axis1=1, axis2=2).copy()


def _kernel_profile(n: int, b: float, kernel: BaseKernel) -> np.ndarray:
    """``K(j / (n b))`` for ``j = -(n - 1), ..., n - 1``."""

    if not b > 0:
        raise HVValidationError(
            "The bandwidth must be positive.", param="b", value=b
        ) from None
    offsets = np.arange(-(n - 1), n)
    return kernel(offsets / (n * b))


def kernel_weights(
    t: int, n: int, b: float, kernel: "KernelName | BaseKernel" = "gaussian"
) -> np.ndarray:
    """Normalized smoothing weights of date ``t`` (0-based).

    Parameters
    ----------
    t : int
        Date, ``0 <= t < n``.
    n : int
        Sample size.
    b : float
        Bandwidth.
    kernel : str | BaseKernel, optional
        Default is ``"gaussian"``.

    Returns
    -------
    np.ndarray
        Weights of length n summing to one, zero at ``t``.

    Raises
    ------
    HVNumericalError
        If every kernel value vanishes, which happens when a compactly
        supported kernel meets a bandwidth below ``1 / n``.

    Examples
    --------
    >>> kernel_weights(1, 3, 0.5)
    array([0.5, 0. , 0.5])
    """

    if not 0 <= t < n:
        raise HVValidationError(
            f"'t' must lie in [0, {n}).", param="t", value=t
        ) from None

    profile = _kernel_profile(n, b, KernelSpec(kernel))
    raw = profile[t - np.arange(n) + n - 1]
    raw[t] = 0.0
    total = raw.sum()
    if not total > 0:
        raise HVNumericalError(
            "All kernel weights are zero; the bandwidth is too small.",
            code="degenerate_weights",
            param="b",
            value=b,
        )
    return raw / total


def _smooth(residuals: np.ndarray, b: float, kernel: BaseKernel) -> np.ndarray:
    """Raw (unfloored) kernel covariance estimates."""

    n, d = residuals.shape
    outer = np.einsum("ta,tb->tab", residuals, residuals).reshape(n, d * d)
    profile = _kernel_profile(n, b, kernel)
    dates = np.arange(n)
    estimates = np.empty((n, d * d))
    step = max(1, _CHUNK_ELEMENTS // n)
    for start in range(0, n, step):
        rows = dates[start : start + step]
        weights = profile[rows[:, None] - dates[None, :] + n - 1]
        weights[np.arange(rows.size), rows] = 0.0
        totals = weights.sum(axis=1)
        if not np.all(totals > 0):
            raise HVNumericalError(
                "All kernel weights are zero at some date; the bandwidth "
                "is too small.",
                code="degenerate_weights",
                param="b",
                value=b,
            )
        estimates[rows] = (weights / totals[:, None]) @ outer
    estimates = estimates.reshape(n, d, d)
    return 0.5 * (estimates + estimates.transpose(0, 2, 1))


def _as_residuals(residuals: ArrayLike) -> np.ndarray:
    residuals = np.asarray(residuals, dtype=float)
    if residuals.ndim == 1:
        residuals = residuals[:, None]
    n, d = residuals.shape
    if n < d + 1:
        raise HVValidationError(
            f"Need at least d + 1 = {d + 1} residuals, got {n}.",
            param="residuals",
        ) from None
    return residuals


def estimate_variance_path(
    residuals: ArrayLike,
    b: float,
    kernel: "KernelName | BaseKernel" = "gaussian",
    floor: float | None = None,
) -> VariancePathEstimate:
    """Kernel estimate of the covariance path, eigenvalue-floored.

    Parameters
    ----------
    residuals : array_like
        Residuals of shape ``(n, d)``.
    b : float
        Bandwidth.
    kernel : str | BaseKernel, optional
        Default is ``"gaussian"``.
    floor : float, optional
        Lower bound on eigenvalues. Defaults to ``1e-6 * tr(S) / d`` where
        ``S`` is the residual second moment.

    Returns
    -------
    VariancePathEstimate

    Raises
    ------
    HVNumericalError
        If the kernel weights degenerate.
    """

    residuals = _as_residuals(residuals)
    n, d = residuals.shape
    kernel = KernelSpec(kernel)

    if floor is None:
        floor = FLOOR_SCALE * float(np.sum(residuals**2)) / (n * d)
    if not floor > 0:
        # all-zero residuals
        floor = FLOOR_SCALE

    raw = _smooth(residuals, b, kernel)
    matrices, count = floor_eigenvalues(raw, floor)
    if count:
        HVWarning.warn(
            f"Eigenvalue floor {floor:.3g} applied at {count} of {n} dates."
        )
    logger.debug(
        "Kernel covariance path: n=%d, b=%.4g, kernel=%s, floored=%d.",
        n,
        b,
        kernel.name,
        count,
    )
    matrices.setflags(write=False)
    return VariancePathEstimate(matrices, float(b), kernel.name, floor, count)


def cross_validation_curve(
    residuals: ArrayLike,
    grid: BandwidthGrid,
    kernel: "KernelName | BaseKernel" = "gaussian",
) -> np.ndarray:
    """Leave-one-out loss of every bandwidth of a grid.

    The loss is ``sum_t ||u_t u_t' - S_t(b)||_F^2`` with ``S_t(b)`` the
    unfloored estimate, which already excludes date t. Bandwidths whose
    weights degenerate get an infinite loss.
    """

    residuals = _as_residuals(residuals)
    kernel = KernelSpec(kernel)
    outer = np.einsum("ta,tb->tab", residuals, residuals)

    losses = np.empty(grid.n_points)
    for k, b in enumerate(grid.values):
        try:
            estimate = _smooth(residuals, float(b), kernel)
        except HVNumericalError:
            losses[k] = np.inf
            continue
        losses[k] = float(np.sum((outer - estimate) ** 2))
    return losses


def cross_validate_bandwidth(
    residuals: ArrayLike,
    grid: BandwidthGrid | None = None,
    kernel: "KernelName | BaseKernel" = "gaussian",
) -> float:
    """Bandwidth of a grid minimizing the leave-one-out loss.

    Ties go to the smaller bandwidth.

    Parameters
    ----------
    residuals : array_like
        Residuals of shape ``(n, d)``.
    grid : BandwidthGrid, optional
        Defaults to :meth:`BandwidthGrid.default` for the sample size.
    kernel : str | BaseKernel, optional
        Default is ``"gaussian"``.

    Raises
    ------
    HVNumericalError
        If every bandwidth of the grid has degenerate weights.
    """

    residuals = _as_residuals(residuals)
    grid = BandwidthGrid.default(residuals.shape[0]) if grid is None else grid
    losses = cross_validation_curve(residuals, grid, kernel)
    if not np.any(np.isfinite(losses)):
        raise HVNumericalError(
            "Every bandwidth of the grid has degenerate kernel weights.",
            code="degenerate_weights",
            param="grid",
        )
    chosen = float(grid.values[int(np.argmin(losses))])
    logger.debug("Cross-validated bandwidth %.4g.", chosen)
    return chosen
