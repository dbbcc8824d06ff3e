# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""User-defined covariance path built from Lipschitz segments."""

__all__ = ["PiecewisePath"]

from typing import Any, Dict, Sequence, Tuple

import numpy as np

from ..exceptions import HVValidationError
from ..utils import SegmentFunction
from .base import BaseVariancePath


class PiecewisePath(BaseVariancePath, registry_key="piecewise"):
    """Covariance path assembled from consecutive segments.

    Segment ``k`` covers ``[end_{k-1}, end_k)`` with ``end_{-1} = 0``; the
    last segment also covers ``r = 1``. Each segment function maps a date
    to either a d x d covariance or a positive scalar ``s``, read as
    ``s * I_d``.

    Parameters
    ----------
    segments : Sequence[tuple[float, Callable[[float], float | np.ndarray]]]
        Pairs ``(end, function)`` with strictly increasing ends, the last
        of which is ``1``.
    d : int, optional
        Dimension. Inferred from the first segment when it returns a matrix,
        otherwise ``1``.

    Examples
    --------
    Scalar variance ``1 + 19 r``:

    >>> segment = (1.0, lambda r: 1 + 19 * r)
    >>> path = VariancePath("piecewise", segments=[segment])
    >>> path(0.5)
    array([[10.5]])
    """

    def __init__(
        self,
        segments: Sequence[Tuple[float, SegmentFunction]],
        d: int | None = None,
    ) -> None:
        if not segments:
            raise HVValidationError(
                "'segments' must not be empty.", param="segments"
            ) from None

        ends = np.array([float(end) for end, _ in segments])
        if (
            np.any(np.diff(ends) <= 0)
            or ends[0] <= 0.0
            or not np.isclose(ends[-1], 1.0)
        ):
            raise HVValidationError(
                "Segment ends must increase strictly and finish at 1.",
                param="segments",
                value=ends.tolist(),
            ) from None
        ends[-1] = 1.0

        self._ends = ends
        self._functions = tuple(function for _, function in segments)

        if d is None:
            sample = np.asarray(self._functions[0](0.5 * ends[0]))
            d = sample.shape[0] if sample.ndim == 2 else 1
        self._d = int(d)
        self.validate()

    @property
    def d(self) -> int:
        return self._d

    @property
    def breakpoints(self) -> Tuple[float, ...]:
        return tuple(float(end) for end in self._ends[:-1])

    def _segment_value(self, k: int, r: float) -> np.ndarray:
        value = np.asarray(self._functions[k](float(r)), dtype=float)
        if value.ndim == 0:
            return float(value) * np.eye(self._d)
        if value.shape != (self._d, self._d):
            raise HVValidationError(
                f"Segment {k} returned shape {value.shape} at r={r:.6g}; "
                f"expected a scalar or ({self._d}, {self._d}).",
                param="segments",
            ) from None
        return value

    def _evaluate(self, r: np.ndarray) -> np.ndarray:
        index = np.minimum(
            np.searchsorted(self._ends, r, side="right"), self._ends.size - 1
        )
        return np.stack(
            [self._segment_value(k, x) for k, x in zip(index, r)]
        )

    def describe(self) -> Dict[str, Any]:
        return {"kind": "piecewise", "ends": self._ends.tolist(), "d": self.d}
