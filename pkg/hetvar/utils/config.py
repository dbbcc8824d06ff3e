# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Configuration objects for hetvar runs.

Configurations are validated dictionaries: every key is checked when it is
set, unknown keys are rejected, and setting a key to ``None`` removes it.
:class:`RunConfig` holds the parameters of one command line invocation and
can be read from, and rendered to, a TOML file.
"""

__all__ = ["BaseConfig", "RunConfig", "default_n_jobs"]

import math
import os
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, get_args

import tomlkit
from tomlkit.exceptions import TOMLKitError
from typing_extensions import Unpack

from ..exceptions import HVConfigurationError, HVValidationError
from .constants import N_JOBS_ENV, RUN_CONFIG_PARAMETERS
from .typing import BoundsMethod, Criterion, KernelName, PathKind, RunParams

# parameter groups shared by the run and experiment configurations
INT_PARAMETERS: dict[str, int] = {
    "p_max": 1,
    "lag": 1,
    "cap": 1,
    "n_points": 1,
    "seed": 0,
    "n": 1,
    "replications": 1,
    "burn_in": 0,
    "presample": 0,
    "p": 0,
}
POSITIVE_FLOAT_PARAMETERS: tuple[str, ...] = ("bandwidth", "c_min", "c_max")
FLOAT_PARAMETERS: tuple[str, ...] = ("gamma1", "gamma2", "rho")
BOOL_PARAMETERS: tuple[str, ...] = ("difference", "demean")
STR_PARAMETERS: tuple[str, ...] = (
    "command",
    "input",
    "output",
    "index_column",
)


class BaseConfig(dict, ABC):
    """Base configuration class."""

    def __init__(self, **kwargs):
        super().__init__()
        self.update(kwargs)

    def __setitem__(self, key: str, value: Any) -> None:
        self._validate(key, value)
        if value is None:
            if key in self:
                super().__delitem__(key)
            return
        super().__setitem__(key, value)

    def __getattr__(self, name: str) -> Any:
        try:
            return self[name]
        except KeyError:
            try:
                self._validate(name, None)
            except HVValidationError as exc:
                raise AttributeError(
                    f"'{name}' is an unknown attribute."
                ) from exc
            return None

    def __setattr__(self, name: str, value: Any) -> None:
        self.__setitem__(name, value)

    def update(self, *args, **kwargs) -> None:
        for key, value in dict(*args, **kwargs).items():
            self.__setitem__(key, value)

    def setdefault(self, key: str, default: Any = None) -> None:
        if key in self:
            return super().setdefault(key, default)
        self._validate(key, default)
        return super().setdefault(key, default)

    def _check_common(self, key: str, value: Any) -> None:
        """Checks a parameter shared with other configurations."""

        name = type(self).__name__
        if key in INT_PARAMETERS:
            if isinstance(value, bool) or not isinstance(value, int):
                raise HVValidationError(
                    f"'{key}' must be an integer.", param=key, value=value
                ) from None
            if value < INT_PARAMETERS[key]:
                raise HVValidationError(
                    f"'{key}' must be at least {INT_PARAMETERS[key]}.",
                    param=key,
                    value=value,
                ) from None
        elif key == "n_jobs":
            if isinstance(value, bool) or not isinstance(value, int):
                raise HVValidationError(
                    "'n_jobs' must be an integer.", param=key, value=value
                ) from None
            if value == 0:
                raise HVValidationError(
                    "'n_jobs' must be nonzero; use -1 for all cores.",
                    param=key,
                    value=value,
                ) from None
        elif key in POSITIVE_FLOAT_PARAMETERS or key in FLOAT_PARAMETERS:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise HVValidationError(
                    f"'{key}' must be a real number.", param=key, value=value
                ) from None
            if not math.isfinite(value):
                raise HVValidationError(
                    f"'{key}' must be finite.", param=key, value=value
                ) from None
            if key in POSITIVE_FLOAT_PARAMETERS and value <= 0:
                raise HVValidationError(
                    f"'{key}' must be positive.", param=key, value=value
                ) from None
        elif key == "break_fraction":
            if not isinstance(value, (int, float)) or not 0 < value < 1:
                raise HVValidationError(
                    "'break_fraction' must lie strictly between 0 and 1.",
                    param=key,
                    value=value,
                ) from None
        elif key == "kernel":
            if value not in get_args(KernelName):
                raise HVValidationError(
                    f"{value!r} is not a known kernel.",
                    param=key,
                    value=value,
                ) from None
        elif key == "variance":
            if value not in get_args(PathKind) or value == "piecewise":
                raise HVValidationError(
                    f"{value!r} cannot be simulated from {name}.",
                    param=key,
                    value=value,
                ) from None
        elif key in ("methods", "bounds"):
            allowed = get_args(Criterion if key == "methods" else BoundsMethod)
            if (
                isinstance(value, str)
                or not value
                or any(item not in allowed for item in value)
            ):
                raise HVValidationError(
                    f"'{key}' must be a non-empty list drawn from "
                    f"{', '.join(repr(a) for a in allowed)}.",
                    param=key,
                    value=value,
                ) from None


class RunConfig(BaseConfig):
    """Configuration of one command line invocation.

    Attributes
    ----------
    p_max : int, optional
        Largest candidate order.
    lag : int, optional
        Order of a single PCM.
    cap : int, optional
        Reliability cap of order selection.
    kernel : str, optional
        ``"gaussian"`` or ``"epanechnikov"``.
    bandwidth : float, optional
        Fixed bandwidth. Cross-validated when unset.
    methods : list of str, optional
        Information criteria.
    bounds : list of str, optional
        Confidence bound methods.
    seed : int, optional
        Master random seed.

    Notes
    -----
    Every key of :class:`~hetvar.utils.typing.RunParams` is accepted. Values
    can be accessed via dot-notation (e.g., ``config.p_max``) or
    dictionary-style access (e.g., ``config['p_max']``). Accessing a valid
    but unset attribute returns ``None``.

    Examples
    --------
    >>> config = RunConfig.from_toml("run.toml")
    >>> config.update(p_max=6)
    >>> print(config.to_toml())
    """

    def __init__(self, **kwargs: Unpack[RunParams]) -> None:
        super().__init__(**kwargs)

    def _validate(self, key: str, value: Any) -> None:
        if not isinstance(key, str):
            raise HVValidationError(
                "Attribute name must be a string."
            ) from None

        if key not in RUN_CONFIG_PARAMETERS:
            raise HVValidationError(
                f"'{key}' is not a valid attribute for RunConfig.",
                param=key,
            ) from None

        if value is None:
            return

        if key in BOOL_PARAMETERS and not isinstance(value, bool):
            raise HVValidationError(
                f"'{key}' must be a boolean.", param=key, value=value
            ) from None
        if key in STR_PARAMETERS and not isinstance(value, str):
            raise HVValidationError(
                f"'{key}' must be a string.", param=key, value=value
            ) from None

        self._check_common(key, value)

    @classmethod
    def from_toml(cls, path: str | Path) -> "RunConfig":
        """Reads a configuration from a TOML file.

        Keys may sit at the top level or under a ``[hetvar]`` table, and
        dashes in key names are read as underscores.

        Raises
        ------
        HVConfigurationError
            If the file cannot be read or parsed, or holds invalid keys.
        """

        try:
            text = Path(path).read_text(encoding="utf-8")
            data = tomlkit.parse(text).unwrap()
        except (OSError, TOMLKitError) as exc:
            raise HVConfigurationError(
                f"Could not read configuration file {str(path)!r}: {exc}",
                param="config",
                value=str(path),
            ) from None

        if isinstance(data.get("hetvar"), dict):
            data = data["hetvar"]

        try:
            return cls(**{k.replace("-", "_"): v for k, v in data.items()})
        except HVValidationError as exc:
            raise HVConfigurationError(
                f"Invalid configuration file {str(path)!r}: {exc.message}",
                param=exc.param,
                value=exc.value,
            ) from None

    def to_toml(self) -> str:
        """Renders the configuration as a TOML document."""

        document = tomlkit.document()
        for key in sorted(self):
            document.add(key, self[key])
        return tomlkit.dumps(document)


def default_n_jobs() -> int:
    """Worker count from the ``HETVAR_N_JOBS`` environment variable.

    Returns ``1`` when the variable is unset.

    Raises
    ------
    HVConfigurationError
        If the variable is not a nonzero integer.
    """

    raw = os.environ.get(N_JOBS_ENV, "").strip()
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError:
        value = 0
    if value == 0:
        raise HVConfigurationError(
            f"{N_JOBS_ENV} must be a nonzero integer.",
            param=N_JOBS_ENV,
            value=raw,
        ) from None
    return value
