# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Time-invariant innovation covariance."""

__all__ = ["ConstantPath"]

from typing import Any, Dict

import numpy as np
from numpy.typing import ArrayLike

from ..exceptions import HVValidationError
from .base import BaseVariancePath


class ConstantPath(BaseVariancePath, registry_key="constant"):
    """Covariance that does not change with time.

    Parameters
    ----------
    sigma : float | array_like, optional
        Either a positive scalar, read as ``sigma * I_d``, or a symmetric
        positive definite d x d matrix. Default is ``1.0``.
    d : int, optional
        Dimension when ``sigma`` is a scalar. Default is ``1``.

    Examples
    --------
    >>> from hetvar import VariancePath
    >>> path = VariancePath("constant", sigma=[[1.0, 0.3], [0.3, 2.0]])
    >>> path(0.5)
    array([[1. , 0.3],
           [0.3, 2. ]])
    """

    def __init__(self, sigma: float | ArrayLike = 1.0, d: int | None = None):
        value = np.array(sigma, dtype=float)
        if value.ndim == 0:
            dim = 1 if d is None else int(d)
            if dim < 1:
                raise HVValidationError(
                    "'d' must be a positive integer.", param="d", value=d
                ) from None
            value = float(value) * np.eye(dim)
        elif value.ndim != 2 or value.shape[0] != value.shape[1]:
            raise HVValidationError(
                "'sigma' must be a scalar or a square matrix.",
                param="sigma",
                value=value.shape,
            ) from None
        elif d is not None and value.shape[0] != d:
            raise HVValidationError(
                "'sigma' does not match 'd'.", param="d", value=d
            ) from None

        value.setflags(write=False)
        self._matrix = value
        self.validate(grid_size=1)

    @property
    def d(self) -> int:
        return self._matrix.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The constant covariance."""

        return self._matrix

    def _evaluate(self, r: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self._matrix, (r.size, self.d, self.d)).copy()

    def describe(self) -> Dict[str, Any]:
        return {"kind": "constant", "sigma": self._matrix.tolist()}
