# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Abstract surface shared by every deterministic variance path."""

__all__ = ["BaseVariancePath"]

from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import numpy as np

from ..exceptions import HVValidationError
from ..utils import (
    DEFAULT_QUADRATURE_POINTS,
    Registry,
    midpoint_grid,
)


class BaseVariancePath(Registry, ABC):
    """A deterministic map from rescaled time r in (0, 1] to a symmetric
    positive definite d x d innovation covariance.

    Subclasses implement :meth:`_evaluate` on a vector of dates and declare
    their discontinuities through :attr:`breakpoints`.

    Methods
    -------
    __call__(r) -> np.ndarray
        Covariance at a date or an array of dates.
    sequence(n) -> np.ndarray
        Covariances at t/n for t = 1..n, shape ``(n, d, d)``.
    integrate(grid_size) -> np.ndarray
        Midpoint-rule integral of the path over (0, 1].
    validate(grid_size) -> BaseVariancePath
        Checks symmetry and positive definiteness on a grid.
    """

    @property
    @abstractmethod
    def d(self) -> int:
        """Dimension of the covariance matrices."""

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        """Dates in (0, 1) at which the path may jump."""

        return ()

    @abstractmethod
    def _evaluate(self, r: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def describe(self) -> Dict[str, Any]:
        """Plain parameters of the path, used in output metadata."""

    def __call__(self, r: float | np.ndarray) -> np.ndarray:
        dates = np.asarray(r, dtype=float)
        if not np.all((dates > 0.0) & (dates <= 1.0)):
            raise HVValidationError(
                "Rescaled time must lie in (0, 1].",
                param="r",
                value=r if dates.ndim == 0 else None,
            ) from None
        flat = self._evaluate(np.atleast_1d(dates).ravel())
        return flat.reshape(dates.shape + (self.d, self.d))

    def sequence(self, n: int) -> np.ndarray:
        """Covariances at the sample dates t/n, t = 1..n."""

        if n < 1:
            raise HVValidationError(
                "'n' must be a positive integer.", param="n", value=n
            ) from None
        return self._evaluate(np.arange(1, n + 1) / n)

    def integrate(
        self, grid_size: int = DEFAULT_QUADRATURE_POINTS
    ) -> np.ndarray:
        """Integral of the path over (0, 1] by the midpoint rule."""

        nodes, weights = midpoint_grid(grid_size, self.breakpoints)
        return np.einsum("m,mab->ab", weights, self._evaluate(nodes))

    def validate(self, grid_size: int = 1000) -> "BaseVariancePath":
        """Checks symmetry and positive definiteness on a grid of dates.

        Raises
        ------
        HVValidationError
            If some covariance is asymmetric, non-finite, or not positive
            definite.
        """

        dates = np.arange(1, grid_size + 1) / grid_size
        dates = np.union1d(dates, self.breakpoints)
        values = self._evaluate(dates)
        name = type(self).__name__

        if not np.all(np.isfinite(values)):
            raise HVValidationError(
                f"{name} produced non-finite covariances.",
                details=self.describe(),
            ) from None

        asymmetry = np.abs(values - np.swapaxes(values, -1, -2)).max()
        if asymmetry >= 1e-12:
            raise HVValidationError(
                f"{name} produced asymmetric covariances.",
                details={"asymmetry": float(asymmetry)},
            ) from None

        smallest = np.linalg.eigvalsh(values)[:, 0]
        if smallest.min() <= 0.0:
            worst = int(smallest.argmin())
            raise HVValidationError(
                f"{name} is not positive definite at r={dates[worst]:.6g}.",
                details={"min_eigenvalue": float(smallest[worst])},
            ) from None
        return self

    def __repr__(self) -> str:
        params = ", ".join(
            f"{key}={value!r}"
            for key, value in self.describe().items()
            if key != "kind"
        )
        return f"{type(self).__name__}({params})"
