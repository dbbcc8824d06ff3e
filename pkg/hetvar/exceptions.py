# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Exceptions and warnings raised by hetvar.

Every exception derives from :class:`HVError` and carries optional
structured context (``code``, ``param``, ``value``, ``details``) appended
to its message. The command line maps each class to an exit status:
problems with what the user supplied (:class:`HVValidationError`,
:class:`HVConfigurationError`, :class:`HVDataError`) exit with ``2``;
failures of the computation itself (:class:`HVNumericalError`,
:class:`HVEstimationError`) exit with ``1``.
"""

__all__ = [
    "HVConfigurationError",
    "HVDataError",
    "HVError",
    "HVEstimationError",
    "HVNumericalError",
    "HVValidationError",
    "HVWarning",
]

import warnings
from typing import Any, Dict

# order in which context fields are rendered
_CONTEXT_FIELDS = ("code", "param", "value", "details")


class HVError(Exception):
    """The base exception for hetvar.

    Parameters
    ----------
    message : str, optional
        Human readable description.
    code : str | int, optional
        Short machine-friendly code, e.g. ``"degenerate_weights"``.
    details : Dict[str, Any], optional
        Extra structured data, e.g. the row of a missing value.
    param : str, optional
        Name of the offending parameter.
    value : Any, optional
        Value of the offending parameter.

    Attributes
    ----------
    exit_status : int
        Exit status of the command line when this error ends a command.
    """

    exit_status: int = 1

    def __init__(
        self,
        message: str | None = None,
        *,
        code: str | int | None = None,
        details: Dict[str, Any] | None = None,
        param: str | None = None,
        value: Any | None = None,
    ) -> None:
        self.message = message or ""
        self.code = code
        self.details = details
        self.param = param
        self.value = value
        super().__init__(self.message)

    @property
    def context(self) -> Dict[str, Any]:
        """The context fields that are set, in rendering order."""

        return {
            name: getattr(self, name)
            for name in _CONTEXT_FIELDS
            if getattr(self, name) is not None
        }

    def _rendered_context(self) -> list[str]:
        return [f"{name}={field!r}" for name, field in self.context.items()]

    def __str__(self) -> str:
        context = ", ".join(self._rendered_context())
        if not context:
            return self.message
        return f"{self.message} ({context})" if self.message else context

    def __repr__(self) -> str:
        parts = ", ".join([repr(self.message), *self._rendered_context()])
        return f"{type(self).__name__}({parts})"


class HVValidationError(HVError):
    """Raised when inputs are missing, malformed, or out of domain."""

    exit_status = 2


class HVConfigurationError(HVError):
    """Raised when a configuration file or option is invalid."""

    exit_status = 2


class HVDataError(HVError):
    """Raised when a dataset cannot be ingested."""

    exit_status = 2


class HVNumericalError(HVError):
    """Raised when a factorization, solve, or series fails numerically."""


class HVEstimationError(HVError):
    """Raised when a model cannot be fitted at a given order."""


class HVWarning(UserWarning):
    """Warning for recoverable conditions.

    Emitted when covariance estimates are floored, when a selected order
    reaches the reliability cap, and when Monte Carlo replications fail.
    """

    def __init__(self, message: str | None = None) -> None:
        self.message = message or ""
        super().__init__(self.message)

    def __str__(self) -> str:
        return self.message

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.message!r})"

    @classmethod
    def warn(cls, message: str, *, stacklevel: int = 2) -> None:
        """Emits the warning, attributed to the caller of the caller."""

        warnings.warn(cls(message), stacklevel=stacklevel + 1)
