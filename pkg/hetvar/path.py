# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Public factory for constructing deterministic variance paths."""

from __future__ import annotations

__all__ = ["VariancePath"]

from typing import List, TypeAlias, get_args

from .exceptions import HVValidationError
from .paths import (
    AbruptBreakPath,
    BaseVariancePath,
    ConstantPath,
    PiecewisePath,
    SmoothTrendPath,
)
from .utils import PathKind

VariancePathType: TypeAlias = (
    ConstantPath | SmoothTrendPath | AbruptBreakPath | PiecewisePath
)


class VariancePath:
    """Factory class for deterministic innovation covariance paths
    r -> Sigma(r) on (0, 1].

    Parameters
    ----------
    kind : Literal["constant", "smooth", "break", "piecewise"], optional
        The path kind. It must match a registered kind. Default is
        ``"constant"``.

    Other Parameters
    ----------------
    **kwargs : Any, optional
        Parameters of the selected kind. Refer to
        :class:`~hetvar.paths.constant.ConstantPath`,
        :class:`~hetvar.paths.smooth.SmoothTrendPath`,
        :class:`~hetvar.paths.abrupt.AbruptBreakPath` and
        :class:`~hetvar.paths.piecewise.PiecewisePath`.

    Returns
    -------
    ConstantPath | SmoothTrendPath | AbruptBreakPath | PiecewisePath
        The path instance. Every kind is validated to be symmetric positive
        definite on a dense grid of dates before it is returned.

    Raises
    ------
    HVValidationError
        If ``kind`` is unknown or the parameters do not define a positive
        definite path.

    Examples
    --------
    >>> from hetvar import VariancePath
    >>> path = VariancePath("smooth", gamma1=20.0, rho=0.2)
    >>> round(path(1e-12)[0, 0], 2)
    1.04
    >>> round(VariancePath("break")(0.75)[0, 0], 2)
    20.8
    """

    def __new__(
        cls, kind: PathKind = "constant", **kwargs
    ) -> VariancePathType:
        if kind not in (kinds := cls.get_available_kinds()):
            raise HVValidationError(
                f"{kind!r} is an invalid variance path kind. "
                "Available kinds are "
                f"{', '.join(repr(k) for k in kinds)}.",
                param="kind",
                value=kind,
            ) from None

        return BaseVariancePath.registry[kind](**kwargs)

    @classmethod
    def get_available_kinds(cls) -> List[str]:
        """Lists all available variance path kinds.

        Returns
        -------
        List[str]
            The registered kinds, e.g. 'constant', 'smooth', etc.
        """

        return list(get_args(PathKind))
