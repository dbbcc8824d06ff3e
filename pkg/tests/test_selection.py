import numpy as np
import pytest

from hetvar import (
    HVValidationError,
    HVWarning,
    TimeSeries,
    VariancePath,
    VarModel,
    criterion,
    gaussian_neg2ll,
    ols_estimate,
    select_order,
    simulate,
)


def _sample(n, seed, variance="smooth", presample=5):
    path = (
        VariancePath("constant", d=2)
        if variance == "constant"
        else VariancePath(variance)
    )
    return simulate(VarModel.benchmark(), path, n, seed, presample=presample)


def test_neg2ll_vanishes_for_perfect_fit():
    """Zero residuals and identity covariance give zero."""
    ts = TimeSeries.from_array([1.0, 0.5, 0.25, 0.125], presample=1)
    assert gaussian_neg2ll([0.5], [[1.0]], ts, 1) == 0.0


def test_neg2ll_direct_evaluation():
    """Averages the squared residuals under unit variance."""
    ts = TimeSeries.from_array([1.0, 2.0])
    assert gaussian_neg2ll([], [[1.0]], ts, 0) == pytest.approx(2.5)


def test_neg2ll_checks_theta_length():
    """Rejects coefficient vectors of the wrong length."""
    ts = TimeSeries.from_array([1.0, 2.0, 3.0], presample=1)
    with pytest.raises(HVValidationError):
        gaussian_neg2ll([0.1, 0.2], [[1.0]], ts, 1)


def test_aic_matches_textbook_formula():
    """AIC is ln det S + d + 2 p d^2 / n."""
    ts = _sample(200, seed=1, variance="constant")
    value = criterion(ts, 2, "aic")
    sigma = ols_estimate(ts, 2).sigma_u_hat
    expected = np.linalg.slogdet(sigma)[1] + 2 + 2 * 2 * 4 / ts.n
    assert value.value == pytest.approx(expected, abs=1e-10)
    assert value.penalty == pytest.approx(16 / ts.n)


def test_penalty_grows_by_two_d_squared_over_n_per_lag():
    """Each extra lag adds 2 d^2 / n to the penalty."""
    ts = _sample(150, seed=2)
    penalties = [criterion(ts, p, "aic").penalty for p in (1, 2, 3)]
    np.testing.assert_allclose(np.diff(penalties), 8 / ts.n)


def test_aic_als_with_true_path_equals_aic_gls():
    """ALS weighted by the true covariances is GLS."""
    ts = _sample(150, seed=3)
    path = VariancePath("smooth")
    als = criterion(ts, 2, "aic_als", path.sequence(ts.n))
    gls = criterion(ts, 2, "aic_gls", path)
    assert als.value == gls.value


def test_aic_als_with_constant_covariance_equals_aic():
    """A constant weight equal to the residual covariance gives AIC."""
    ts = _sample(150, seed=4)
    sigma = ols_estimate(ts, 3).sigma_u_hat
    als = criterion(ts, 3, "aic_als", sigma)
    assert als.value == pytest.approx(criterion(ts, 3, "aic").value, abs=1e-10)


def test_criterion_rejects_unknown_method_and_missing_path():
    """Unknown criteria and pathless GLS are validation errors."""
    ts = _sample(80, seed=5)
    with pytest.raises(HVValidationError):
        criterion(ts, 1, "bic")
    with pytest.raises(HVValidationError):
        criterion(ts, 1, "aic_gls")


def test_select_order_report():
    """Scans every order on a common sample."""
    ts = _sample(120, seed=6)
    report = select_order(
        ts, 4, ("aic", "aic_als", "aic_gls"), path=VariancePath("smooth")
    )

    assert report.orders == [1, 2, 3, 4]
    assert report.methods == ["aic", "aic_als", "aic_gls"]
    assert report.n == ts.n
    assert report.bandwidth is not None
    for method in report.methods:
        values = report.values(method)
        assert report.selected[method] == 1 + int(np.argmin(values))
        assert report.flagged[method] == (report.selected[method] >= 5)

    frame = report.to_frame()
    assert len(frame) == 3 * 4
    assert frame.groupby("criterion")["selected"].sum().tolist() == [1, 1, 1]


def test_select_order_flags_cap():
    """Selections at the cap are flagged and warned about."""
    ts = _sample(100, seed=7)
    with pytest.warns(HVWarning):
        report = select_order(ts, 2, ("aic",), cap=1)
    assert report.flagged["aic"]


def test_select_order_uses_fixed_bandwidth():
    """A fixed bandwidth is shared by every ALS evaluation."""
    ts = _sample(100, seed=8)
    report = select_order(ts, 3, ("aic_als",), bandwidth=0.4)
    assert report.bandwidth == 0.4


@pytest.mark.parametrize(
    "kwargs",
    [
        {"p_max": 6},
        {"p_max": 3, "methods": ("aic", "hq")},
        {"p_max": 3, "methods": ("aic_gls",)},
    ],
)
def test_select_order_validation(kwargs):
    """Rejects short presamples, unknown criteria and pathless GLS."""
    ts = _sample(100, seed=9)
    with pytest.raises(HVValidationError):
        select_order(ts, **kwargs)


@pytest.mark.slow
def test_adaptive_criterion_finds_the_true_order():
    """On the smooth design AIC_ALS mostly picks the true order 2."""
    aic_als = []
    for k in range(20):
        report = select_order(
            simulate(
                VarModel.benchmark(),
                VariancePath("smooth"),
                100,
                13,
                presample=5,
                stream=k,
            ),
            5,
            ("aic_als",),
            warn=False,
        )
        aic_als.append(report.selected["aic_als"])

    assert aic_als.count(2) >= 12
    assert np.bincount(aic_als).argmax() == 2


@pytest.mark.slow
def test_adaptive_criterion_converges_to_aic_under_homoscedasticity():
    """The AIC_ALS - AIC gap shrinks with n for constant variance."""
    hits = 0
    for k in range(10):
        gaps = []
        for n in (500, 4000):
            ts = _sample(n, seed=100 + k, variance="constant", presample=2)
            gaps.append(
                abs(
                    criterion(ts, 2, "aic_als").value
                    - criterion(ts, 2, "aic").value
                )
            )
        hits += gaps[1] < 0.5 * gaps[0]
    assert hits >= 7
