# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Bivariate covariance with a common variance break."""

__all__ = ["AbruptBreakPath"]

from typing import Any, Dict, Tuple

import numpy as np

from ..exceptions import HVValidationError
from ..utils import DEFAULT_GAMMA1, DEFAULT_RHO
from .base import BaseVariancePath


class AbruptBreakPath(BaseVariancePath, registry_key="break"):
    """Bivariate covariance whose variances jump at ``break_fraction``.

    With ``f_i(r) = (gamma_i - 1) * 1(r >= break_fraction)``, the diagonal
    entries are ``(1 + f_i(r))(1 + rho ** 2)`` and both off-diagonal entries
    are ``rho * sqrt((1 + f_1(r))(1 + f_2(r)))``. After the break the
    variances are ``gamma_i`` times their initial values.

    Parameters
    ----------
    gamma1 : float, optional
        Variance ratio of the first component. Default is ``20``.
    gamma2 : float, optional
        Variance ratio of the second component. Default is ``gamma1 / 3``.
    rho : float, optional
        Correlation parameter. Default is ``0.2``.
    break_fraction : float, optional
        Break date in rescaled time. Default is ``0.5``.
    """

    def __init__(
        self,
        gamma1: float = DEFAULT_GAMMA1,
        gamma2: float | None = None,
        rho: float = DEFAULT_RHO,
        break_fraction: float = 0.5,
    ) -> None:
        gamma2 = gamma1 / 3.0 if gamma2 is None else gamma2
        for name, value in (("gamma1", gamma1), ("gamma2", gamma2)):
            if not value > 0.0:
                raise HVValidationError(
                    f"'{name}' must be positive.", param=name, value=value
                ) from None
        if not 0.0 < break_fraction < 1.0:
            raise HVValidationError(
                "'break_fraction' must lie strictly between 0 and 1.",
                param="break_fraction",
                value=break_fraction,
            ) from None

        self.gamma1 = float(gamma1)
        self.gamma2 = float(gamma2)
        self.rho = float(rho)
        self.break_fraction = float(break_fraction)
        self.validate()

    @property
    def d(self) -> int:
        return 2

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return (self.break_fraction,)

    def _evaluate(self, r: np.ndarray) -> np.ndarray:
        after = r >= self.break_fraction
        s1 = np.where(after, self.gamma1, 1.0)
        s2 = np.where(after, self.gamma2, 1.0)
        scale = 1.0 + self.rho**2
        out = np.empty((r.size, 2, 2))
        out[:, 0, 0] = s1 * scale
        out[:, 1, 1] = s2 * scale
        out[:, 0, 1] = out[:, 1, 0] = self.rho * np.sqrt(s1 * s2)
        return out

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": "break",
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "rho": self.rho,
            "break_fraction": self.break_fraction,
        }
