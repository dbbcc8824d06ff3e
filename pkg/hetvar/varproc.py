# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Stable VAR processes, observed samples, and simulation under a
deterministic innovation covariance path.

A VAR(p) process with time-varying unconditional variance reads

.. math::

    X_t = A_1 X_{t-1} + \\dots + A_p X_{t-p} + u_t, \\qquad
    u_t = H_t \\epsilon_t, \\quad H_t H_t' = \\Sigma(t/n),

with iid standard Gaussian :math:`\\epsilon_t`. The coefficient vector
:math:`\\theta` is the column-stacked vectorization of
:math:`[A_1, \\dots, A_p]`.
"""

__all__ = [
    "StabilityReport",
    "TimeSeries",
    "VarModel",
    "companion_matrix",
    "is_stable",
    "simulate",
    "variance_at",
]

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike

from .exceptions import HVNumericalError, HVValidationError
from .paths import BaseVariancePath
from .utils import DEFAULT_BURN_IN, make_rng, unvec, vec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class VarModel:
    """Coefficients of a VAR(p) model without intercept.

    Parameters
    ----------
    coeffs : array_like
        Sequence of p real d x d matrices ``A_1, ..., A_p``. May be empty,
        in which case ``d`` is required.
    d : int, optional
        Series dimension. Inferred from ``coeffs`` when they are non-empty.

    Attributes
    ----------
    coeffs : np.ndarray
        Read-only array of shape ``(p, d, d)``.
    d : int
        Series dimension.
    p : int
        Order.
    theta : np.ndarray
        Column-stacked ``vec([A_1, ..., A_p])`` of length ``p * d ** 2``.

    Raises
    ------
    HVValidationError
        If the matrices are not square, disagree in size, or contain
        non-finite values.
    """

    coeffs: np.ndarray
    d: int | None = None

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.size == 0:
            if self.d is None or int(self.d) < 1:
                raise HVValidationError(
                    "'d' is required when the model has no coefficients.",
                    param="d",
                    value=self.d,
                ) from None
            coeffs = np.zeros((0, int(self.d), int(self.d)))
        if coeffs.ndim != 3 or coeffs.shape[1] != coeffs.shape[2]:
            raise HVValidationError(
                "'coeffs' must be a sequence of square matrices of one size.",
                param="coeffs",
                value=coeffs.shape,
            ) from None
        if self.d is not None and coeffs.shape[1] != self.d:
            raise HVValidationError(
                "'coeffs' do not match 'd'.", param="d", value=self.d
            ) from None
        if not np.all(np.isfinite(coeffs)):
            raise HVValidationError(
                "'coeffs' must be finite.", param="coeffs"
            ) from None

        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "d", coeffs.shape[1])

    @property
    def p(self) -> int:
        return self.coeffs.shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """The d x dp matrix ``[A_1, ..., A_p]``."""

        return self.coeffs.transpose(1, 0, 2).reshape(self.d, self.p * self.d)

    @property
    def theta(self) -> np.ndarray:
        return vec(self.stacked)

    @classmethod
    def from_theta(cls, theta: ArrayLike, d: int) -> "VarModel":
        """Builds a model from its column-stacked coefficient vector."""

        theta = np.asarray(theta, dtype=float)
        if theta.size % (d * d):
            raise HVValidationError(
                f"'theta' length {theta.size} is not a multiple of d^2.",
                param="theta",
            ) from None
        p = theta.size // (d * d)
        stacked = unvec(theta, d)
        return cls(stacked.reshape(d, p, d).transpose(1, 0, 2), d=d)

    @classmethod
    def benchmark(cls) -> "VarModel":
        """The bivariate VAR(2) used throughout the simulation studies."""

        return cls(
            [
                [[-0.4, 0.1], [0.0, -0.7]],
                [[-0.6, 0.0], [0.0, -0.3]],
            ]
        )

    def padded(self, p: int) -> "VarModel":
        """Returns the same process written as a VAR(p), p >= self.p."""

        if p < self.p:
            raise HVValidationError(
                f"Cannot write a VAR({self.p}) as a VAR({p}).",
                param="p",
                value=p,
            ) from None
        extra = np.zeros((p - self.p, self.d, self.d))
        return VarModel(np.concatenate([self.coeffs, extra]), d=self.d)

    def __repr__(self) -> str:
        return f"VarModel(d={self.d}, p={self.p})"


class StabilityReport(NamedTuple):
    """Outcome of :func:`is_stable`."""

    stable: bool
    spectral_radius: float


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """A d-variate sample preceded by presample values.

    Parameters
    ----------
    values : array_like
        Array of shape ``(presample + n, d)`` holding ``X_{-presample+1}``
        through ``X_n`` in time order. A 1-d array is read as ``d = 1``.
    presample : int, optional
        Number of leading rows that only serve as initial lags.
    names : Sequence[str], optional
        Column names. Defaults to ``x1, x2, ...``.

    Attributes
    ----------
    d : int
        Dimension.
    n : int
        Effective sample size.
    sample : np.ndarray
        The ``(n, d)`` block ``X_1, ..., X_n``.
    """

    values: np.ndarray
    presample: int = 0
    names: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2 or values.shape[1] < 1:
            raise HVValidationError(
                "'values' must be a 2-d array of shape (n_total, d).",
                param="values",
                value=values.shape,
            ) from None
        if not np.all(np.isfinite(values)):
            row = int(np.argwhere(~np.isfinite(values))[0, 0])
            raise HVValidationError(
                f"'values' must be finite; row {row} is not.",
                param="values",
            ) from None
        if not 0 <= self.presample < values.shape[0]:
            raise HVValidationError(
                "'presample' must leave at least one sample observation.",
                param="presample",
                value=self.presample,
            ) from None

        names = tuple(self.names) or tuple(
            f"x{i + 1}" for i in range(values.shape[1])
        )
        if len(names) != values.shape[1]:
            raise HVValidationError(
                "'names' must have one entry per column.",
                param="names",
                value=names,
            ) from None

        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "presample", int(self.presample))
        object.__setattr__(self, "names", names)

    @classmethod
    def from_array(
        cls,
        values: ArrayLike,
        presample: int = 0,
        names: Sequence[str] | None = None,
    ) -> "TimeSeries":
        return cls(np.asarray(values), presample, tuple(names or ()))

    @property
    def d(self) -> int:
        return self.values.shape[1]

    @property
    def n(self) -> int:
        return self.values.shape[0] - self.presample

    @property
    def sample(self) -> np.ndarray:
        return self.values[self.presample :]

    def reframe(self, presample: int) -> "TimeSeries":
        """Re-splits the same observations into presample and sample."""

        return TimeSeries(self.values, presample, self.names)

    def __repr__(self) -> str:
        return (
            f"TimeSeries(d={self.d}, n={self.n}, presample={self.presample})"
        )


def companion_matrix(model: VarModel) -> np.ndarray:
    """Companion matrix of a VAR(p).

    The top block row is ``[A_1, ..., A_p]``, the sub-diagonal blocks are
    identities and every other block is zero. For ``p = 1`` this is ``A_1``
    itself; for ``p = 0`` it is an empty 0 x 0 matrix.

    Returns
    -------
    np.ndarray
        Array of shape ``(d * p, d * p)``.
    """

    d, p = model.d, model.p
    delta = np.zeros((d * p, d * p))
    if p:
        delta[:d] = model.stacked
        delta[d:, : d * (p - 1)] = np.eye(d * (p - 1))
    return delta


def is_stable(model: VarModel, tol: float = 1e-8) -> StabilityReport:
    """Checks that the spectral radius of the companion matrix is at most
    ``1 - tol``.

    Examples
    --------
    >>> is_stable(VarModel([[[1.0]]]))
    StabilityReport(stable=False, spectral_radius=1.0)
    """

    delta = companion_matrix(model)
    radius = (
        float(np.abs(np.linalg.eigvals(delta)).max()) if delta.size else 0.0
    )
    return StabilityReport(radius <= 1.0 - tol, radius)


def variance_at(path: BaseVariancePath, r: float) -> np.ndarray:
    """Covariance of a variance path at rescaled time ``r`` in (0, 1].

    Raises
    ------
    HVValidationError
        If ``r`` lies outside (0, 1].
    """

    if np.ndim(r) != 0:
        raise HVValidationError(
            "'r' must be a scalar.", param="r"
        ) from None
    return path(float(r))


def simulate(
    model: VarModel,
    path: BaseVariancePath,
    n: int,
    seed: int | None,
    burn_in: int = DEFAULT_BURN_IN,
    presample: int | None = None,
    stream: int = 0,
) -> TimeSeries:
    """Simulates a VAR(p) with innovations ``u_t = H_t eps_t``.

    ``H_t`` is the lower Cholesky factor of ``Sigma(t/n)``. The process
    starts from zeros, runs ``burn_in`` discarded steps and ``presample``
    retained initial steps with the covariance frozen at ``Sigma(1/n)``,
    then ``n`` sample steps.

    Parameters
    ----------
    model : VarModel
        A stable model.
    path : BaseVariancePath
        Innovation covariance path of matching dimension.
    n : int
        Sample size.
    seed : int | None
        Master seed. Identical inputs give bit-identical output.
    burn_in : int, optional
        Discarded start-up steps. Default is ``200``.
    presample : int, optional
        Retained initial observations. Default is ``model.p``.
    stream : int, optional
        Random stream of the master seed, e.g. a replication index.

    Returns
    -------
    TimeSeries
        Sample of size ``n`` with ``presample`` initial values.

    Raises
    ------
    HVValidationError
        If the model is unstable or dimensions disagree.
    HVNumericalError
        If a covariance of the path has no Cholesky factor.
    """

    if n < 1 or burn_in < 0:
        raise HVValidationError(
            "'n' must be positive and 'burn_in' non-negative.",
            param="n",
            value=n,
        ) from None
    if path.d != model.d:
        raise HVValidationError(
            f"Variance path dimension {path.d} does not match model "
            f"dimension {model.d}.",
            param="path",
        ) from None
    if not (report := is_stable(model)).stable:
        raise HVValidationError(
            "Cannot simulate an unstable model.",
            param="model",
            details={"spectral_radius": report.spectral_radius},
        ) from None

    d, p = model.d, model.p
    presample = p if presample is None else int(presample)
    lead = burn_in + presample
    sigmas = np.concatenate(
        [np.repeat(path(1.0 / n)[None], lead, axis=0), path.sequence(n)]
    )
    try:
        factors = np.linalg.cholesky(sigmas)
    except np.linalg.LinAlgError as exc:
        raise HVNumericalError(
            "The variance path has no Cholesky factor at some date.",
            code="not_pd",
        ) from exc

    rng = make_rng(seed, stream)
    shocks = rng.standard_normal((lead + n, d))
    innovations = np.einsum("tab,tb->ta", factors, shocks)

    stacked = model.stacked
    buffer = np.zeros((p + lead + n, d))
    for t in range(lead + n):
        # lags X_{t-1}, ..., X_{t-p} stacked most recent first
        lags = buffer[t : t + p][::-1].ravel()
        buffer[t + p] = stacked @ lags + innovations[t]

    logger.debug(
        "Simulated VAR(%d) with d=%d, n=%d, stream=%d.", p, d, n, stream
    )
    return TimeSeries(buffer[p + burn_in :], presample=presample)
