# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Bivariate covariance whose variances grow linearly in rescaled time."""

__all__ = ["SmoothTrendPath"]

from typing import Any, Dict

import numpy as np

from ..exceptions import HVValidationError
from ..utils import DEFAULT_GAMMA1, DEFAULT_RHO
from .base import BaseVariancePath


class SmoothTrendPath(BaseVariancePath, registry_key="smooth"):
    """Smoothly trending bivariate covariance.

    .. math::

        \\Sigma(r) = \\begin{pmatrix}
            (1+\\gamma_1 r)(1+\\rho^2) & \\rho s(r) \\\\
            \\rho s(r) & 1+\\gamma_2 r
        \\end{pmatrix},
        \\quad s(r) = \\sqrt{(1+\\gamma_1 r)(1+\\gamma_2 r)}

    Parameters
    ----------
    gamma1 : float, optional
        Slope of the first variance. Default is ``20``.
    gamma2 : float, optional
        Slope of the second variance. Default is ``gamma1 / 3``.
    rho : float, optional
        Correlation parameter. Default is ``0.2``.

    Notes
    -----
    Only the (1, 1) entry carries the ``1 + rho ** 2`` factor. The
    determinant is ``(1 + gamma1 r)(1 + gamma2 r)``, so the path is positive
    definite whenever both slopes exceed -1.
    """

    def __init__(
        self,
        gamma1: float = DEFAULT_GAMMA1,
        gamma2: float | None = None,
        rho: float = DEFAULT_RHO,
    ) -> None:
        gamma2 = gamma1 / 3.0 if gamma2 is None else gamma2
        for name, value in (("gamma1", gamma1), ("gamma2", gamma2)):
            if not value > -1.0:
                raise HVValidationError(
                    f"'{name}' must exceed -1.", param=name, value=value
                ) from None

        self.gamma1 = float(gamma1)
        self.gamma2 = float(gamma2)
        self.rho = float(rho)
        self.validate()

    @property
    def d(self) -> int:
        return 2

    def _evaluate(self, r: np.ndarray) -> np.ndarray:
        s1 = 1.0 + self.gamma1 * r
        s2 = 1.0 + self.gamma2 * r
        out = np.empty((r.size, 2, 2))
        out[:, 0, 0] = s1 * (1.0 + self.rho**2)
        out[:, 1, 1] = s2
        out[:, 0, 1] = out[:, 1, 0] = self.rho * np.sqrt(s1 * s2)
        return out

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "smooth",
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "rho": self.rho,
        }
