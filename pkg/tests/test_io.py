import numpy as np
import pandas as pd
import pytest
import tomlkit

from hetvar import HVDataError, format_csv, ingest, write_sidecar
from hetvar.io import sidecar_path


def _write(tmp_path, text, name="data.csv"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def test_ingest_reads_columns(tmp_path):
    """Keeps the header names and every row as a sample observation."""
    path = _write(tmp_path, "a,b\n1,2\n3,4\n5,7\n")
    ts = ingest(path, min_per_dimension=1)

    assert ts.names == ("a", "b")
    assert ts.presample == 0
    np.testing.assert_array_equal(ts.sample, [[1, 2], [3, 4], [5, 7]])


def test_ingest_difference_and_demean(tmp_path):
    """Differencing drops a row and demeaning follows it."""
    path = _write(tmp_path, "x\n1\n2\n4\n")

    ts = ingest(path, difference=True, min_per_dimension=1)
    np.testing.assert_array_equal(ts.sample[:, 0], [1.0, 2.0])

    ts = ingest(path, difference=True, demean=True, min_per_dimension=1)
    np.testing.assert_allclose(ts.sample[:, 0], [-0.5, 0.5])


def test_ingest_drops_index_columns(tmp_path):
    """A named index column, or a non-numeric first column, is dropped."""
    text = "date;x;y\n2001-01;1;2\n2001-02;3;4\n2001-03;5;6\n"
    path = _write(tmp_path, text)

    assert ingest(path, min_per_dimension=1).names == ("x", "y")
    assert ingest(path, index_column="date", min_per_dimension=1).d == 2

    with pytest.raises(HVDataError):
        ingest(path, index_column="when", min_per_dimension=1)


def test_ingest_skips_comments_and_sniffs_tabs(tmp_path):
    path = _write(tmp_path, "# source: test\nx\ty\n1\t2\n3\t4\n")
    ts = ingest(path, min_per_dimension=1)

    assert ts.n == 2
    assert ts.d == 2


@pytest.mark.parametrize(
    "text, code, row",
    [
        ("x,y\n1,2\n3,\n5,6\n", "missing", 2),
        ("x,y\n1,2\n3,NA\n5,6\n", "missing", 2),
        ("x,y\n1,2\n3,4\n5,six\n", "parse", 3),
    ],
)
def test_ingest_names_the_offending_row(tmp_path, text, code, row):
    """Gaps and non-numeric cells raise with their row."""
    with pytest.raises(HVDataError) as exc:
        ingest(_write(tmp_path, text), min_per_dimension=1)

    assert exc.value.code == code
    assert exc.value.details["row"] == row
    assert exc.value.details["column"] == "y"


def test_ingest_rejects_short_series(tmp_path):
    """Needs ten observations per dimension by default."""
    rows = "".join(f"{i},{i * i}\n" for i in range(15))
    path = _write(tmp_path, "x,y\n" + rows)

    with pytest.raises(HVDataError) as exc:
        ingest(path)
    assert exc.value.code == "too_short"
    assert exc.value.exit_status == 2

    assert ingest(path, min_per_dimension=5).n == 15


def test_ingest_missing_file(tmp_path):
    with pytest.raises(HVDataError):
        ingest(tmp_path / "absent.csv")


def test_format_csv_writes_metadata_header():
    """Metadata lines precede the table and None values are skipped."""
    frame = pd.DataFrame({"p": [1, 2], "value": [0.1, 1 / 3]})
    text = format_csv(
        frame, {"seed": np.int64(7), "bounds": ("ols",), "skip": None}
    )

    assert text.splitlines() == [
        "# seed = 7",
        "# bounds = ['ols']",
        "p,value",
        "1,0.1",
        "2,0.3333333333",
    ]


def test_write_sidecar(tmp_path):
    """Run metadata lands next to the output as TOML."""
    output = tmp_path / "table.csv"
    target = write_sidecar(
        output, {"seed": 3, "wall_time": 1.5, "dgp": np.eye(2), "x": None}
    )

    assert target == sidecar_path(output)
    assert target.name == "table.csv.meta.toml"
    data = tomlkit.parse(target.read_text(encoding="utf-8")).unwrap()
    assert data == {
        "seed": 3,
        "wall_time": 1.5,
        "dgp": [[1.0, 0.0], [0.0, 1.0]],
    }
