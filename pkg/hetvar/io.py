# This Source Code Form is subject to the terms of the Mozilla Public
# License, v. 2.0. If a copy of the MPL was not distributed with this
# file, You can obtain one at https://mozilla.org/MPL/2.0/.

"""Dataset ingestion and table output.

Datasets are delimited text files with a header row, an optional index
column (dates, labels) and d numeric columns, one row per time point.
Output tables are CSV with ``# key = value`` comment lines on top holding
the effective configuration; they read back with
``pandas.read_csv(path, comment="#")``. Run metadata that varies between
identical runs, such as wall time, goes to a TOML sidecar instead.
"""

__all__ = [
    "format_csv",
    "ingest",
    "sidecar_path",
    "write_sidecar",
    "write_text",
]

import logging
import sys
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import pandas as pd
import tomlkit

from .exceptions import HVDataError
from .varproc import TimeSeries

logger = logging.getLogger(__name__)

#: float format of every numeric output, 10 significant digits
FLOAT_FORMAT = "%.10g"

# cell contents read as a gap in the data
_MISSING = frozenset({"", "na", "nan", "null", "none", "."})


def _delimiter(path: str | Path) -> str:
    """Delimiter of the first non-comment line; comma when none is found."""

    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if line.strip() and not line.lstrip().startswith("#"):
                break
        else:
            line = ""
    for candidate in (",", "\t", ";", "|"):
        if candidate in line:
            return candidate
    return ","


def _read(path: str | Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            sep=_delimiter(path),
            comment="#",
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        ).fillna("")
    except FileNotFoundError:
        raise HVDataError(
            f"Dataset {str(path)!r} does not exist.", param="path"
        ) from None
    except (
        pd.errors.ParserError,
        pd.errors.EmptyDataError,
        UnicodeDecodeError,
    ) as exc:
        raise HVDataError(
            f"Could not parse {str(path)!r}: {exc}", code="parse", param="path"
        ) from None


def _numeric(column: pd.Series) -> pd.Series:
    return pd.to_numeric(column.str.strip(), errors="coerce")


def ingest(
    path: str | Path,
    difference: bool = False,
    demean: bool = False,
    *,
    index_column: str | None = None,
    min_per_dimension: int = 10,
) -> TimeSeries:
    """Reads a dataset into a :class:`~hetvar.varproc.TimeSeries`.

    Parameters
    ----------
    path : str | Path
        Delimited text file with a header row. The delimiter is sniffed.
    difference : bool, optional
        Replace the series by its first differences (one row shorter).
    demean : bool, optional
        Subtract the column means, after differencing.
    index_column : str, optional
        Name of a column to drop before parsing. When omitted, a first
        column that is not numeric is dropped as the index.
    min_per_dimension : int, optional
        The resulting series must have at least this many observations per
        dimension. Default is ``10``.

    Returns
    -------
    TimeSeries
        Every row is a sample observation (no presample).

    Raises
    ------
    HVDataError
        On parse failures, missing values, non-numeric entries, or a series
        that is too short. Row numbers in messages count data rows from 1.
    """

    frame = _read(path)
    if frame.empty or frame.shape[1] == 0:
        raise HVDataError(
            f"Dataset {str(path)!r} holds no data.", code="empty"
        ) from None

    if index_column is not None:
        if index_column not in frame.columns:
            raise HVDataError(
                f"Index column {index_column!r} is not in the header.",
                param="index_column",
                value=index_column,
            ) from None
        frame = frame.drop(columns=index_column)
    elif frame.shape[1] > 1 and _numeric(frame.iloc[:, 0]).isna().all():
        frame = frame.iloc[:, 1:]

    blank = frame.apply(
        lambda column: column.str.strip().str.lower().isin(_MISSING)
    )
    if blank.to_numpy().any():
        row, col = np.argwhere(blank.to_numpy())[0]
        raise HVDataError(
            f"Missing value in row {row + 1}, column "
            f"{frame.columns[col]!r}.",
            code="missing",
            details={"row": int(row + 1), "column": str(frame.columns[col])},
        ) from None

    numeric = frame.apply(_numeric)
    if numeric.isna().to_numpy().any():
        row, col = np.argwhere(numeric.isna().to_numpy())[0]
        raise HVDataError(
            f"Non-numeric value {frame.iat[row, col]!r} in row {row + 1}, "
            f"column {frame.columns[col]!r}.",
            code="parse",
            details={"row": int(row + 1), "column": str(frame.columns[col])},
        ) from None

    values = numeric.to_numpy(dtype=float)
    if difference:
        values = np.diff(values, axis=0)
    if demean and values.size:
        values = values - values.mean(axis=0)

    n, d = values.shape
    if n < max(1, min_per_dimension * d):
        raise HVDataError(
            f"Series too short: n={n} for d={d}; need at least "
            f"{max(1, min_per_dimension * d)} observations.",
            code="too_short",
            details={"n": n, "d": d},
        ) from None

    logger.info("Ingested %s: d=%d, n=%d.", path, d, n)
    return TimeSeries(values, 0, tuple(str(c).strip() for c in frame.columns))


def _plain(value: Any) -> Any:
    """Converts numpy and container values to TOML-friendly types."""

    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Mapping):
        return {
            str(k): _plain(v) for k, v in value.items() if v is not None
        }
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def format_csv(frame: pd.DataFrame, metadata: Mapping[str, Any]) -> str:
    """Renders a table as CSV preceded by ``# key = value`` lines."""

    header = "".join(
        f"# {key} = {_plain(value)!r}\n"
        for key, value in metadata.items()
        if value is not None
    )
    body = frame.to_csv(
        index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
    )
    return header + body


def write_text(text: str, path: str | Path | None) -> None:
    """Writes text to a file, or to standard output when no path is given."""

    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    Path(path).write_text(text, encoding="utf-8")
    logger.info("Wrote %s.", path)


def sidecar_path(path: str | Path) -> Path:
    """Location of the metadata sidecar of an output file."""

    path = Path(path)
    return path.with_name(path.name + ".meta.toml")


def write_sidecar(path: str | Path, metadata: Mapping[str, Any]) -> Path:
    """Writes run metadata next to an output file as TOML."""

    target = sidecar_path(path)
    document = tomlkit.document()
    for key, value in _plain(dict(metadata)).items():
        document.add(key, value)
    target.write_text(tomlkit.dumps(document), encoding="utf-8")
    return target
