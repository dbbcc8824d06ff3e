# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""This module defines the building blocks shared by the public modules.

`Registry` is a lightweight class-level registry. Implementations register
themselves by key at import time, enabling factory-style lookup without
hard-coded class references. This is how `VariancePath` and `KernelSpec`
discover their kinds. A subclass declared without a key starts a new
family with its own registry.

The linear algebra helpers wrap :mod:`scipy.linalg` factorizations with the
conditioning checks every estimator relies on, so singular Gram matrices
surface as :class:`~hetvar.exceptions.HVNumericalError` rather than as
garbage coefficients.

`make_rng` builds the counter-based random streams used by simulations:
stream ``k`` of a master seed is independent of every other stream and
does not depend on how many streams were drawn before it.
"""

__all__ = [
    "Registry",
    "floor_eigenvalues",
    "inv_pd",
    "make_rng",
    "midpoint_grid",
    "pd_stack_inverse",
    "solve_pd",
    "symmetrize",
    "unvec",
    "vec",
]

import logging
from typing import Any, ClassVar, Generic, Sequence, Tuple

import numpy as np
import scipy.linalg

from ..exceptions import HVNumericalError, HVValidationError, HVWarning
from .constants import CONDITION_LIMIT
from .typing import RegistryKey

logger = logging.getLogger(__name__)


class Registry(Generic[RegistryKey]):
    """Lightweight class-level registry mapping keys to implementations.

    Attributes
    ----------
    registry : ClassVar[dict[str, type[Any]]]
        The class-level registry mapping keys to classes.
    registry_key : ClassVar[str]
        The key the class was registered under.
    """

    registry: ClassVar[dict[str, type[Any]]] = {}
    registry_key: ClassVar[str] = ""

    def __init_subclass__(
        cls, *, registry_key: RegistryKey | None = None, **kwargs: Any
    ) -> None:
        super().__init_subclass__(**kwargs)

        # a class without a key roots a new family
        if registry_key is None:
            cls.registry = {}
            return

        if registry_key in cls.registry:
            HVWarning.warn(
                f"{registry_key!r} already registered. Overwriting."
            )

        cls.registry[registry_key] = cls
        cls.registry_key = registry_key


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Returns the symmetric part of a matrix or a stack of matrices."""

    return 0.5 * (matrix + np.swapaxes(matrix, -1, -2))


def vec(matrix: np.ndarray) -> np.ndarray:
    """Column-stacks a matrix."""

    return np.asarray(matrix).reshape(-1, order="F")


def unvec(vector: np.ndarray, rows: int) -> np.ndarray:
    """Inverts :func:`vec` for a matrix with ``rows`` rows."""

    return np.asarray(vector).reshape(rows, -1, order="F")


def solve_pd(
    matrix: np.ndarray, rhs: np.ndarray, *, what: str = "matrix"
) -> np.ndarray:
    """Solves ``matrix @ x = rhs`` for a symmetric positive definite matrix.

    Parameters
    ----------
    matrix : np.ndarray
        Symmetric positive definite coefficient matrix.
    rhs : np.ndarray
        Right-hand side vector or matrix.
    what : str, optional
        Name of the matrix used in error messages.

    Returns
    -------
    np.ndarray
        The solution.

    Raises
    ------
    HVNumericalError
        If the relative condition number exceeds the singularity threshold
        or the Cholesky factorization fails.
    """

    matrix = symmetrize(np.asarray(matrix, dtype=float))
    if matrix.size == 0:
        return np.zeros_like(np.asarray(rhs, dtype=float))

    if not np.all(np.isfinite(matrix)):
        raise HVNumericalError(
            f"The {what} contains non-finite entries.", code="non_finite"
        )

    cond = float(np.linalg.cond(matrix))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise HVNumericalError(
            f"The {what} is singular or ill-conditioned.",
            code="singular",
            details={"condition": cond},
        )

    try:
        factor = scipy.linalg.cho_factor(
            matrix, lower=True, check_finite=False
        )
    except np.linalg.LinAlgError as exc:
        raise HVNumericalError(
            f"The {what} is not positive definite.", code="not_pd"
        ) from exc

    return scipy.linalg.cho_solve(factor, rhs, check_finite=False)


def inv_pd(matrix: np.ndarray, *, what: str = "matrix") -> np.ndarray:
    """Inverts a symmetric positive definite matrix via :func:`solve_pd`."""

    matrix = np.asarray(matrix, dtype=float)
    return symmetrize(solve_pd(matrix, np.eye(matrix.shape[0]), what=what))


def pd_stack_inverse(
    stack: np.ndarray, *, what: str = "covariance path"
) -> Tuple[np.ndarray, np.ndarray]:
    """Inverts a stack of positive definite matrices.

    Parameters
    ----------
    stack : np.ndarray
        Array of shape ``(n, d, d)``.
    what : str, optional
        Name used in error messages.

    Returns
    -------
    inverse : np.ndarray
        Array of shape ``(n, d, d)`` holding the inverses.
    logdet : np.ndarray
        Array of shape ``(n,)`` holding the log-determinants.

    Raises
    ------
    HVNumericalError
        If any matrix of the stack is not positive definite.
    """

    stack = symmetrize(np.asarray(stack, dtype=float))
    try:
        chol = np.linalg.cholesky(stack)
    except np.linalg.LinAlgError as exc:
        raise HVNumericalError(
            f"The {what} is not positive definite at every date.",
            code="not_pd",
        ) from exc

    logdet = 2.0 * np.log(np.diagonal(chol, axis1=-2, axis2=-1)).sum(axis=-1)
    eye = np.broadcast_to(np.eye(stack.shape[-1]), stack.shape)
    half = np.linalg.solve(chol, eye)
    inverse = np.swapaxes(half, -1, -2) @ half
    return symmetrize(inverse), logdet


def floor_eigenvalues(
    stack: np.ndarray, floor: float
) -> Tuple[np.ndarray, int]:
    """Raises every eigenvalue below ``floor`` up to ``floor``.

    Matrices whose smallest eigenvalue is already at least ``floor`` are
    returned untouched, which makes the operation idempotent.

    Returns
    -------
    floored : np.ndarray
        The floored stack.
    count : int
        Number of matrices that were modified.
    """

    stack = symmetrize(np.asarray(stack, dtype=float))
    values, vectors = np.linalg.eigh(stack)
    # relative slack so a floored stack is not floored again
    below = values[..., 0] < floor * (1.0 - 1e-9)
    count = int(below.sum())
    if not count:
        return stack, 0

    clipped = np.maximum(values[below], floor)
    rebuilt = (vectors[below] * clipped[..., None, :]) @ np.swapaxes(
        vectors[below], -1, -2
    )
    floored = stack.copy()
    floored[below] = symmetrize(rebuilt)
    return floored, count


def midpoint_grid(
    grid_size: int, breakpoints: Sequence[float] = ()
) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the midpoint rule on (0, 1].

    Breakpoints are inserted as cell boundaries so no cell straddles a
    discontinuity.

    Returns
    -------
    nodes : np.ndarray
        Cell midpoints.
    weights : np.ndarray
        Cell widths, summing to one.
    """

    if grid_size < 1:
        raise HVValidationError(
            "'grid_size' must be a positive integer.",
            param="grid_size",
            value=grid_size,
        ) from None

    edges = np.linspace(0.0, 1.0, grid_size + 1)
    inner = [b for b in breakpoints if 0.0 < b < 1.0]
    if inner:
        edges = np.unique(np.concatenate([edges, inner]))
    return 0.5 * (edges[:-1] + edges[1:]), np.diff(edges)


def make_rng(seed: int | None, stream: int = 0) -> np.random.Generator:
    """Returns the counter-based generator of one stream of a master seed.

    Parameters
    ----------
    seed : int | None
        Master seed. ``None`` draws fresh entropy.
    stream : int, optional
        Stream index, typically a replication number.
    """

    sequence = np.random.SeedSequence(seed, spawn_key=(int(stream),))
    return np.random.Generator(np.random.Philox(sequence))
