import pytest

from hetvar import (
    HVConfigurationError,
    HVValidationError,
    RunConfig,
    default_n_jobs,
)


def test_run_config_behaves_like_dict():
    """Supports dict-style and attribute-style access for config values."""
    config = RunConfig(p_max=5, kernel="gaussian")

    assert config["p_max"] == 5
    assert config.kernel == "gaussian"
    assert config.bandwidth is None
    assert "bandwidth" not in config

    config["bandwidth"] = 0.4
    assert config.bandwidth == 0.4

    config.methods = ["aic", "aic_als"]
    assert config["methods"] == ["aic", "aic_als"]

    assert {**config} == {
        "p_max": 5,
        "kernel": "gaussian",
        "bandwidth": 0.4,
        "methods": ["aic", "aic_als"],
    }


def test_run_config_validation():
    """Rejects unknown keys and unknown attribute lookups."""
    config = RunConfig(p_max=5)

    with pytest.raises(HVValidationError):
        config["not_a_key"] = 1

    with pytest.raises(AttributeError):
        _ = config.not_a_key


@pytest.mark.parametrize(
    "key, value",
    [
        ("p_max", 0),
        ("p_max", 2.5),
        ("p_max", True),
        ("seed", -1),
        ("bandwidth", 0.0),
        ("bandwidth", float("inf")),
        ("c_min", "1"),
        ("kernel", "triangular"),
        ("variance", "piecewise"),
        ("methods", "aic"),
        ("methods", []),
        ("methods", ["aic", "bic"]),
        ("bounds", ["bootstrap"]),
        ("break_fraction", 1.0),
        ("n_jobs", 0),
        ("difference", "yes"),
        ("input", 3),
    ],
)
def test_run_config_rejects_invalid_values(key, value):
    """Rejects values of the wrong type or out of range."""
    with pytest.raises(HVValidationError):
        RunConfig(**{key: value})


def test_run_config_setdefault_validates():
    """Validates keys provided via setdefault."""
    config = RunConfig()

    assert config.setdefault("cap", 5) == 5
    assert config["cap"] == 5

    with pytest.raises(HVValidationError):
        config.setdefault("not_a_key", 1)
    with pytest.raises(HVValidationError):
        config.setdefault("p_max", 0)


def test_run_config_setdefault_does_not_overwrite():
    """Preserves existing values when using setdefault."""
    config = RunConfig(seed=3)

    assert config.setdefault("seed", 0) == 3
    assert config["seed"] == 3


def test_run_config_none_removes_key():
    """Removes a key when assigned None and keeps attribute access None."""
    config = RunConfig(bandwidth=0.3)

    assert "bandwidth" in config
    config["bandwidth"] = None
    assert "bandwidth" not in config
    assert config.bandwidth is None

    config.update(seed=None)
    assert "seed" not in config


def test_run_config_from_toml(tmp_path):
    """Reads a [hetvar] table and maps dashes to underscores."""
    path = tmp_path / "run.toml"
    path.write_text(
        "[hetvar]\n"
        "p-max = 4\n"
        'kernel = "epanechnikov"\n'
        'methods = ["aic", "aic_als"]\n'
        "demean = true\n",
        encoding="utf-8",
    )

    config = RunConfig.from_toml(path)

    assert config == {
        "p_max": 4,
        "kernel": "epanechnikov",
        "methods": ["aic", "aic_als"],
        "demean": True,
    }


def test_run_config_from_toml_top_level(tmp_path):
    """Reads keys at the top level of the document."""
    path = tmp_path / "run.toml"
    path.write_text("seed = 11\nbandwidth = 0.25\n", encoding="utf-8")

    assert RunConfig.from_toml(path) == {"seed": 11, "bandwidth": 0.25}


@pytest.mark.parametrize(
    "text",
    [
        "p_max = \n",
        "not_a_key = 1\n",
        "p_max = 0\n",
    ],
)
def test_run_config_from_toml_errors(tmp_path, text):
    """Unreadable, unknown or invalid entries are configuration errors."""
    path = tmp_path / "run.toml"
    path.write_text(text, encoding="utf-8")

    with pytest.raises(HVConfigurationError) as exc:
        RunConfig.from_toml(path)
    assert exc.value.exit_status == 2


def test_run_config_from_missing_file(tmp_path):
    with pytest.raises(HVConfigurationError):
        RunConfig.from_toml(tmp_path / "missing.toml")


def test_run_config_to_toml_round_trip(tmp_path):
    """Rendered TOML reads back to the same configuration."""
    config = RunConfig(p_max=3, bounds=["ols", "als"], difference=True)
    path = tmp_path / "run.toml"
    path.write_text(config.to_toml(), encoding="utf-8")

    assert RunConfig.from_toml(path) == config


def test_default_n_jobs(monkeypatch):
    """Reads the worker count from the environment."""
    monkeypatch.delenv("HETVAR_N_JOBS", raising=False)
    assert default_n_jobs() == 1

    monkeypatch.setenv("HETVAR_N_JOBS", "4")
    assert default_n_jobs() == 4

    monkeypatch.setenv("HETVAR_N_JOBS", "-1")
    assert default_n_jobs() == -1


@pytest.mark.parametrize("raw", ["0", "many", "2.5"])
def test_default_n_jobs_rejects_invalid(monkeypatch, raw):
    monkeypatch.setenv("HETVAR_N_JOBS", raw)
    with pytest.raises(HVConfigurationError):
        default_n_jobs()
