import numpy as np
import pytest

from hetvar import (
    ExperimentSpec,
    FrequencyTable,
    HVEstimationError,
    HVValidationError,
    HVWarning,
    VarModel,
    run_bounds_experiment,
    run_selection_experiment,
)


def _spec(**kwargs):
    params = {
        "n": 80,
        "replications": 6,
        "seed": 3,
        "p_max": 3,
        "cap": 3,
        "bandwidth": 0.3,
        "n_jobs": 1,
    }
    return ExperimentSpec(**{**params, **kwargs})


def test_experiment_spec_defaults(monkeypatch):
    """Unset parameters follow the simulation study."""
    monkeypatch.delenv("HETVAR_N_JOBS", raising=False)
    spec = ExperimentSpec()

    assert spec.variance == "smooth"
    assert spec.gamma1 == 20
    assert spec.rho == 0.2
    assert spec.n == 100
    assert spec.replications == 500
    assert spec.p_max == 5
    assert spec.methods == ["aic", "aic_als", "aic_gls"]
    assert spec.bounds == ["standard", "ols", "als", "gls"]
    assert spec.n_jobs == 1
    assert spec.bandwidth is None
    np.testing.assert_array_equal(
        spec.dgp.coeffs, VarModel.benchmark().coeffs
    )


def test_experiment_spec_reads_worker_count(monkeypatch):
    monkeypatch.setenv("HETVAR_N_JOBS", "3")
    assert ExperimentSpec().n_jobs == 3
    assert ExperimentSpec(n_jobs=1).n_jobs == 1


@pytest.mark.parametrize(
    "kwargs",
    [
        {"not_a_key": 1},
        {"dgp": [[0.5]]},
        {"dgp": VarModel([[[1.2]]])},
        {"variance": "piecewise"},
        {"n": 0},
        {"methods": ["aic", "fpe"]},
        {"n_jobs": 0},
    ],
)
def test_experiment_spec_validation(kwargs):
    """Rejects unknown keys, unstable models and invalid values."""
    with pytest.raises(HVValidationError):
        ExperimentSpec(**kwargs)


def test_experiment_spec_variance_path():
    """Builds the design path from the experiment parameters."""
    spec = ExperimentSpec(variance="break", gamma1=10, break_fraction=0.25)
    path = spec.variance_path()

    assert path.describe()["kind"] == "break"
    np.testing.assert_allclose(path(0.5)[0, 0], 10 * 1.04)

    constant = ExperimentSpec(
        dgp=VarModel([[[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]]]),
        variance="constant",
    ).variance_path()
    np.testing.assert_allclose(constant(0.3), np.eye(3))

    with pytest.raises(HVValidationError):
        ExperimentSpec(
            dgp=VarModel([[[0.5, 0, 0], [0, 0.5, 0], [0, 0, 0.5]]])
        ).variance_path()


def test_experiment_spec_describe():
    described = _spec().describe()

    assert described["dgp"] == VarModel.benchmark().coeffs.tolist()
    assert described["path"]["kind"] == "smooth"
    assert described["replications"] == 6


def test_selection_experiment_table():
    """Each criterion row is a distribution over the orders."""
    table = run_selection_experiment(_spec())

    assert isinstance(table, FrequencyTable)
    assert table.kind == "selection"
    assert table.rows == ("AIC", "AIC_ALS", "AIC_GLS")
    assert table.columns == (1, 2, 3)
    assert table.replications == 6
    assert table.failures == 0
    np.testing.assert_allclose(table.values.sum(axis=1), 100.0)
    assert table["AIC", 1] == table.values[0, 0]

    frame = table.to_frame()
    assert list(frame.columns) == ["p1", "p2", "p3"]
    assert frame.index.name == "method"


def test_single_replication_is_one_full_cell():
    """With one replication every row holds a single 100."""
    table = run_selection_experiment(_spec(replications=1))

    for row in table.values:
        assert sorted(row.tolist()) == [0.0, 0.0, 100.0]


def test_selection_experiment_is_reproducible():
    """Tables depend on the seed only, not on the worker count."""
    first = run_selection_experiment(_spec())
    second = run_selection_experiment(_spec(n_jobs=2))

    np.testing.assert_array_equal(first.values, second.values)
    assert first.to_csv() == second.to_csv()
    assert first.metadata["n_jobs"] == 1
    assert "wall_time" in first.metadata
    assert "wall_time" not in first.deterministic_metadata()
    assert "n_jobs" not in first.deterministic_metadata()


def test_frequency_table_rendering():
    table = run_selection_experiment(_spec(methods=["aic"]))

    csv = table.to_csv()
    assert "# experiment = 'selection'" in csv
    assert "method,p1,p2,p3" in csv.splitlines()

    text = table.to_text()
    assert text.startswith("selection frequencies (%) over 6 replications")
    assert "AIC" in text


def test_bounds_experiment_table():
    """PAM rows precede PCM rows; cells are percentages of replications."""
    table = run_bounds_experiment(_spec(bounds=["ols", "als"]))

    assert table.kind == "bounds"
    assert table.rows == ("PAM_OLS", "PAM_ALS", "PCM_OLS", "PCM_ALS")
    assert table.columns == (1, 2, 3)
    assert table.to_frame().columns.tolist() == ["lag1", "lag2", "lag3"]
    assert np.all((table.values >= 0) & (table.values <= 100))
    np.testing.assert_allclose(
        np.round(table.values * 6 / 100), table.values * 6 / 100
    )


def test_failed_replications_are_excluded(monkeypatch):
    """Failures are counted, warned about and left out of the shares."""
    calls = []

    def flaky(ts, *args, **kwargs):
        calls.append(1)
        if len(calls) % 3 == 0:
            raise HVEstimationError("singular")
        return type("Report", (), {"selected": {"aic": 2}})()

    monkeypatch.setattr("hetvar.montecarlo.select_order", flaky)

    with pytest.warns(HVWarning):
        table = run_selection_experiment(_spec(methods=["aic"]))

    assert table.replications == 4
    assert table.failures == 2
    assert table["AIC", 2] == 100.0


def test_all_failed_replications_raise(monkeypatch):
    def broken(*args, **kwargs):
        raise HVEstimationError("singular")

    monkeypatch.setattr("hetvar.montecarlo.select_order", broken)

    with pytest.raises(HVEstimationError):
        run_selection_experiment(_spec(methods=["aic"]))


def test_replication_warnings_are_summarized(monkeypatch, caplog):
    """One warning per experiment; details go to the debug log."""

    def floored(ts, *args, **kwargs):
        HVWarning.warn("Eigenvalue floor 1e-06 applied at 3 of 80 dates.")
        return type("Report", (), {"selected": {"aic": 1}})()

    monkeypatch.setattr("hetvar.montecarlo.select_order", floored)

    with caplog.at_level("DEBUG", logger="hetvar.montecarlo"):
        with pytest.warns(HVWarning) as record:
            table = run_selection_experiment(_spec(methods=["aic"]))

    messages = [str(w.message) for w in record if w.category is HVWarning]
    assert messages == [
        "Estimation warnings, such as eigenvalue floors, occurred in 6 of "
        "6 replications; rerun with debug logging for details."
    ]
    assert table.metadata["warned"] == 6
    assert "Replication 5: Eigenvalue floor" in caplog.text


@pytest.mark.slow
def test_selection_frequencies_on_the_smooth_design():
    """Adaptive criteria concentrate on the true order; AIC overfits more."""
    spec = ExperimentSpec(n=100, replications=200, seed=1, n_jobs=1)
    table = run_selection_experiment(spec)

    assert table["AIC_ALS", 2] == pytest.approx(78.1, abs=6.0)
    assert table["AIC_GLS", 2] == pytest.approx(86.6, abs=6.0)
    for row in table.values:
        assert int(np.argmax(row)) + 1 == 2

    # rows are AIC, AIC_ALS, AIC_GLS
    aic, als, gls = table.values[:, 2:].sum(axis=1)
    assert aic > als > gls


@pytest.mark.slow
def test_selection_frequencies_on_the_break_design():
    """AIC_ALS selects the true order most often after a variance break."""
    spec = ExperimentSpec(
        variance="break",
        n=200,
        replications=300,
        seed=2,
        methods=["aic_als"],
        n_jobs=1,
    )
    table = run_selection_experiment(spec)

    assert table["AIC_ALS", 2] >= 77.3 - 6.0
    assert int(np.argmax(table.values[0])) + 1 == 2


@pytest.mark.slow
def test_white_noise_selects_small_orders():
    """On scalar white noise AIC_ALS rarely goes beyond p = 2."""
    spec = ExperimentSpec(
        dgp=VarModel([], d=1),
        variance="constant",
        n=2000,
        replications=100,
        seed=3,
        p_max=4,
        cap=4,
        methods=["aic_als"],
        n_jobs=1,
    )
    table = run_selection_experiment(spec)

    assert table["AIC_ALS", 1] + table["AIC_ALS", 2] >= 80.0


@pytest.mark.slow
def test_bounds_frequencies_on_the_smooth_design():
    """Lag 2 is always detected; lag 3 rejects near the nominal level."""
    spec = ExperimentSpec(
        n=200, replications=200, seed=5, bounds=["als"], n_jobs=1
    )
    table = run_bounds_experiment(spec)

    assert table["PAM_ALS", 2] >= 99.0
    assert table["PCM_ALS", 2] >= 99.0
    assert table["PAM_ALS", 3] == pytest.approx(6.3, abs=4.0)
    assert table["PCM_ALS", 3] == pytest.approx(5.2, abs=4.0)


@pytest.mark.slow
def test_standard_bounds_are_oversized_after_a_break():
    """Standard bounds reject a null lag too often; OLS and ALS do not."""
    spec = ExperimentSpec(
        variance="break",
        n=200,
        replications=500,
        seed=6,
        bounds=["standard", "ols", "als"],
    )
    table = run_bounds_experiment(spec)

    assert table["PAM_S", 3] >= 12.0
    assert table["PAM_OLS", 3] <= 10.0
    assert table["PAM_ALS", 3] <= 10.0
