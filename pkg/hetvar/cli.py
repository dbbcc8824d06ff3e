# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Command line front end.

Every command writes one table, CSV by default, to ``--output`` or standard
output. The table is preceded by ``# key = value`` lines holding the command
and its effective configuration. Values come from command line flags, then
from the ``--config`` TOML file, then from built-in defaults.

Examples
--------
.. code-block:: console

    $ hetvar simulate --n 200 --variance smooth --seed 7 -o sim.csv
    $ hetvar select -i sim.csv --p-max 5
    $ hetvar pcm -i sim.csv --lag 3 --bounds standard,ols,als
    $ hetvar mc-select --n 100 --reps 500 --variance smooth --seed 7
"""

__all__ = ["build_parser", "main"]

import argparse
import logging
import sys
from importlib.metadata import PackageNotFoundError, version
from typing import Any, Callable, Dict, List, NamedTuple, Sequence

import numpy as np
import pandas as pd

from .estimation import fit_variance_path, ols_estimate
from .exceptions import HVConfigurationError, HVError
from .io import FLOAT_FORMAT, format_csv, ingest, write_sidecar, write_text
from .montecarlo import (
    ExperimentSpec,
    FrequencyTable,
    run_bounds_experiment,
    run_selection_experiment,
)
from .partial import coefficient_bounds, partial_diagnostics, pcm
from .selection import select_order
from .utils import (
    EXPERIMENT_SPEC_PARAMETERS,
    RUN_CONFIG_PARAMETERS,
    RunConfig,
)
from .variance_kernel import BandwidthGrid, cross_validation_curve
from .varproc import TimeSeries, VarModel, simulate

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

_DATA_DEFAULTS: Dict[str, Any] = {"kernel": "gaussian", "p_max": 5}
_BOUNDS_DEFAULT: List[str] = ["standard", "ols", "als"]

# built-in defaults, applied after flags and the config file
COMMAND_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "simulate": {
        "n": 200,
        "variance": "smooth",
        "seed": 0,
        "burn_in": 200,
    },
    "fit": {**_DATA_DEFAULTS, "p": 2, "bounds": _BOUNDS_DEFAULT},
    "select": {**_DATA_DEFAULTS, "cap": 5, "methods": ["aic", "aic_als"]},
    "pam": {**_DATA_DEFAULTS, "bounds": _BOUNDS_DEFAULT},
    "pcm": {**_DATA_DEFAULTS, "bounds": _BOUNDS_DEFAULT},
    "mc-select": {},
    "mc-bounds": {},
    "cv-bandwidth": {**_DATA_DEFAULTS, "p": 5},
    "variance": {**_DATA_DEFAULTS, "p": 5},
}


class Report(NamedTuple):
    """Output of a command."""

    frame: pd.DataFrame
    metadata: Dict[str, Any]
    table: FrequencyTable | None = None


def _csv_list(text: str) -> List[str]:
    items = [item.strip() for item in text.split(",") if item.strip()]
    if not items:
        raise argparse.ArgumentTypeError("expected a comma-separated list")
    return items


def _load(config: RunConfig, presample: int) -> TimeSeries:
    if config.input is None:
        raise HVConfigurationError(
            f"'{config.command}' needs an input dataset (--input).",
            param="input",
        )
    ts = ingest(
        config.input,
        bool(config.difference),
        bool(config.demean),
        index_column=config.index_column,
    )
    return ts.reframe(presample)


def _version() -> str:
    try:
        return version("hetvar")
    except PackageNotFoundError:
        return "unknown"


def _grid(config: RunConfig, n: int) -> BandwidthGrid:
    values = {
        key: config[key]
        for key in ("c_min", "c_max", "n_points")
        if key in config
    }
    return BandwidthGrid.default(n, **values)


def _experiment(config: RunConfig) -> ExperimentSpec:
    return ExperimentSpec(
        **{
            key: config[key]
            for key in EXPERIMENT_SPEC_PARAMETERS
            if key in config
        }
    )


def _simulate(config: RunConfig) -> Report:
    spec = ExperimentSpec(
        **{
            key: config[key]
            for key in (
                "variance",
                "gamma1",
                "gamma2",
                "rho",
                "break_fraction",
            )
            if key in config
        }
    )
    model = VarModel.benchmark()
    ts = simulate(
        model,
        spec.variance_path(),
        config.n,
        config.seed,
        config.burn_in,
        presample=config.presample,
    )
    frame = pd.DataFrame(np.asarray(ts.values), columns=list(ts.names))
    return Report(frame, {"presample": ts.presample})


def _fit(config: RunConfig) -> Report:
    ts = _load(config, config.p)
    frame = coefficient_bounds(
        ts,
        config.p,
        config.bounds,
        kernel=config.kernel,
        bandwidth=config.bandwidth,
        grid=_grid(config, ts.n),
    )
    return Report(frame, {"n": ts.n, "d": ts.d})


def _select(config: RunConfig) -> Report:
    ts = _load(config, config.p_max)
    report = select_order(
        ts,
        config.p_max,
        config.methods,
        config.cap,
        kernel=config.kernel,
        bandwidth=config.bandwidth,
        grid=_grid(config, ts.n),
    )
    for method, p in report.selected.items():
        logger.info("%s selects p=%d.", method.upper(), p)
    return Report(
        report.to_frame(),
        {"n": ts.n, "d": ts.d, "selected_bandwidth": report.bandwidth},
    )


def _pam(config: RunConfig) -> Report:
    ts = _load(config, config.p_max)
    pams, _ = partial_diagnostics(
        ts,
        config.p_max,
        config.bounds,
        kernel=config.kernel,
        bandwidth=config.bandwidth,
        grid=_grid(config, ts.n),
        with_pcm=False,
    )
    return Report(
        pams.to_frame(),
        {"n": ts.n, "d": ts.d, "selected_bandwidth": pams.bandwidth},
    )


def _pcm(config: RunConfig) -> Report:
    if config.lag is not None:
        ts = _load(config, config.lag)
        vector = pcm(
            ts,
            config.lag,
            config.bounds,
            kernel=config.kernel,
            bandwidth=config.bandwidth,
            grid=_grid(config, ts.n),
        )
        return Report(vector.to_frame(), {"n": ts.n, "d": ts.d})

    ts = _load(config, config.p_max)
    _, pcms = partial_diagnostics(
        ts,
        config.p_max,
        config.bounds,
        kernel=config.kernel,
        bandwidth=config.bandwidth,
        grid=_grid(config, ts.n),
    )
    return Report(
        pcms.to_frame(),
        {"n": ts.n, "d": ts.d, "selected_bandwidth": pcms.bandwidth},
    )


def _mc_select(config: RunConfig) -> Report:
    table = run_selection_experiment(_experiment(config))
    return Report(table.to_frame().reset_index(), {}, table)


def _mc_bounds(config: RunConfig) -> Report:
    table = run_bounds_experiment(_experiment(config))
    return Report(table.to_frame().reset_index(), {}, table)


def _cv_bandwidth(config: RunConfig) -> Report:
    ts = _load(config, config.p)
    residuals = ols_estimate(ts, config.p).residuals
    grid = _grid(config, ts.n)
    losses = cross_validation_curve(residuals, grid, config.kernel)
    frame = pd.DataFrame({"bandwidth": grid.values, "loss": losses})
    finite = np.isfinite(losses)
    frame["selected"] = False
    if finite.any():
        frame.loc[int(np.argmin(losses)), "selected"] = True
    return Report(frame, {"n": ts.n, "d": ts.d})


def _variance(config: RunConfig) -> Report:
    ts = _load(config, config.p)
    estimate = fit_variance_path(
        ts,
        config.p,
        config.bandwidth,
        config.kernel,
        _grid(config, ts.n),
    )
    squared = ols_estimate(ts, config.p).residuals ** 2
    diagonal = estimate.diagonal()
    columns: Dict[str, Any] = {"t": np.arange(1, ts.n + 1)}
    for i, name in enumerate(ts.names):
        columns[f"u2_{name}"] = squared[:, i]
        columns[f"var_{name}"] = diagonal[:, i]
    return Report(
        pd.DataFrame(columns),
        {
            "n": ts.n,
            "d": ts.d,
            "selected_bandwidth": estimate.bandwidth,
            "n_floored": estimate.n_floored,
        },
    )


COMMANDS: Dict[str, Callable[[RunConfig], Report]] = {
    "simulate": _simulate,
    "fit": _fit,
    "select": _select,
    "pam": _pam,
    "pcm": _pcm,
    "mc-select": _mc_select,
    "mc-bounds": _mc_bounds,
    "cv-bandwidth": _cv_bandwidth,
    "variance": _variance,
}


def _add_data_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("-i", "--input", help="delimited dataset")
    group.add_argument(
        "--difference",
        action="store_true",
        default=None,
        help="use first differences",
    )
    group.add_argument(
        "--demean",
        action="store_true",
        default=None,
        help="subtract column means",
    )
    group.add_argument("--index-column", help="column to drop as the index")


def _add_kernel_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("variance path estimation")
    group.add_argument("--kernel", choices=("gaussian", "epanechnikov"))
    group.add_argument(
        "--bandwidth", type=float, help="fixed bandwidth (skips CV)"
    )
    group.add_argument("--c-min", type=float, help="smallest grid multiple")
    group.add_argument("--c-max", type=float, help="largest grid multiple")
    group.add_argument("--n-points", type=int, help="grid size")


def _add_design_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("simulation design")
    group.add_argument("--n", type=int, help="sample size")
    group.add_argument("--variance", choices=("constant", "smooth", "break"))
    group.add_argument("--gamma1", type=float)
    group.add_argument("--gamma2", type=float)
    group.add_argument("--rho", type=float)
    group.add_argument("--break-fraction", type=float)
    group.add_argument("--seed", type=int)
    group.add_argument("--burn-in", type=int)


def _add_p_max(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--p-max", "--pmax", dest="p_max", type=int, help="largest order"
    )


def build_parser() -> argparse.ArgumentParser:
    """The ``hetvar`` argument parser."""

    parser = argparse.ArgumentParser(
        prog="hetvar",
        description=(
            "Lag order identification for VAR models with time-varying "
            "variance."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {_version()}"
    )
    parser.add_argument("--config", help="TOML configuration file")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true")
    verbosity.add_argument("-q", "--quiet", action="store_true")

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("-o", "--output", help="output file (default stdout)")
    output.add_argument(
        "--format", choices=("csv", "text"), default="csv", dest="fmt"
    )

    commands = parser.add_subparsers(
        dest="command", metavar="COMMAND", required=True
    )

    command = commands.add_parser(
        "simulate", parents=[output], help="simulate the benchmark VAR(2)"
    )
    _add_design_options(command)
    command.add_argument(
        "--presample", type=int, help="initial values kept before the sample"
    )

    command = commands.add_parser(
        "fit", parents=[output], help="VAR(p) coefficients with bounds"
    )
    _add_data_options(command)
    _add_kernel_options(command)
    command.add_argument("--p", type=int, help="order")
    command.add_argument("--bounds", type=_csv_list)

    command = commands.add_parser(
        "select", parents=[output], help="information criteria by order"
    )
    _add_data_options(command)
    _add_kernel_options(command)
    _add_p_max(command)
    command.add_argument("--methods", type=_csv_list)
    command.add_argument("--cap", type=int, help="reliability cap")

    for name, help_text in (
        ("pam", "partial autoregressive matrices"),
        ("pcm", "partial cross-correlation matrices"),
    ):
        command = commands.add_parser(name, parents=[output], help=help_text)
        _add_data_options(command)
        _add_kernel_options(command)
        _add_p_max(command)
        command.add_argument("--bounds", type=_csv_list)
        if name == "pcm":
            command.add_argument("--lag", type=int, help="a single lag")

    for name, help_text in (
        ("mc-select", "Monte Carlo selection frequencies"),
        ("mc-bounds", "Monte Carlo bound rejection frequencies"),
    ):
        command = commands.add_parser(name, parents=[output], help=help_text)
        _add_design_options(command)
        _add_p_max(command)
        command.add_argument(
            "--reps",
            "--replications",
            dest="replications",
            type=int,
            help="number of replications",
        )
        command.add_argument("--kernel", choices=("gaussian", "epanechnikov"))
        command.add_argument("--bandwidth", type=float)
        command.add_argument("--n-jobs", type=int, help="parallel workers")
        if name == "mc-select":
            command.add_argument("--methods", type=_csv_list)
            command.add_argument("--cap", type=int)
        else:
            command.add_argument("--bounds", type=_csv_list)

    for name, help_text in (
        ("cv-bandwidth", "cross-validation loss per bandwidth"),
        ("variance", "squared residuals and kernel variance estimates"),
    ):
        command = commands.add_parser(name, parents=[output], help=help_text)
        _add_data_options(command)
        _add_kernel_options(command)
        command.add_argument("--p", type=int, help="order of the OLS fit")

    return parser


def effective_config(args: argparse.Namespace) -> RunConfig:
    """Merges flags, the config file and the command defaults."""

    config = RunConfig() if args.config is None else (
        RunConfig.from_toml(args.config)
    )
    try:
        config.update(
            {
                key: value
                for key, value in vars(args).items()
                if key in RUN_CONFIG_PARAMETERS and value is not None
            }
        )
        for key, value in COMMAND_DEFAULTS[args.command].items():
            config.setdefault(key, value)
    except HVError as exc:
        raise HVConfigurationError(
            f"Invalid option: {exc.message}", param=exc.param, value=exc.value
        ) from None
    return config


def _render(report: Report, config: RunConfig, fmt: str) -> str:
    if report.table is not None:
        metadata = {
            "command": config.command,
            **report.table.deterministic_metadata(),
        }
        if config.output in (None, "-"):
            # no sidecar on stdout
            metadata["n_jobs"] = report.table.metadata["n_jobs"]
    else:
        metadata = {
            "command": config.command,
            **{key: config[key] for key in sorted(config)},
            **report.metadata,
        }

    if fmt == "csv":
        return format_csv(report.frame, metadata)
    header = "".join(
        f"# {key} = {value!r}\n" for key, value in metadata.items()
    )
    if report.table is not None:
        return header + report.table.to_text()
    body = report.frame.to_string(
        index=False, float_format=lambda v: FLOAT_FORMAT % v
    )
    return header + body + "\n"


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    level = logging.WARNING if quiet else level
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)
    logging.captureWarnings(True)


def main(argv: Sequence[str] | None = None) -> int:
    """Runs the command line and returns the exit status.

    Returns ``0`` on success, ``2`` on invalid configuration, options or
    data, and ``1`` on numerical or estimation failures.
    """

    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)

    try:
        config = effective_config(args)
        report = COMMANDS[args.command](config)
        write_text(_render(report, config, args.fmt), config.output)
        if report.table is not None and config.output not in (None, "-"):
            write_sidecar(
                config.output,
                {
                    "command": config.command,
                    **report.table.metadata,
                    "config": dict(config),
                },
            )
    except HVError as exc:
        logger.debug("Command %r failed.", args.command, exc_info=True)
        sys.stderr.write(f"hetvar {args.command}: error: {exc}\n")
        return exc.exit_status

    logger.info("Command %r finished.", args.command)
    return 0
