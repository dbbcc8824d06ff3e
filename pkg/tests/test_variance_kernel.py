import numpy as np
import pytest
from scipy.stats import norm

from hetvar import (
    BandwidthGrid,
    HVNumericalError,
    HVValidationError,
    HVWarning,
    KernelSpec,
    VariancePath,
    cross_validate_bandwidth,
    cross_validation_curve,
    estimate_variance_path,
    kernel_weights,
)
from hetvar.utils import floor_eigenvalues, make_rng


def _iid_residuals(sigma, n, seed):
    """Gaussian residuals with covariance sigma."""
    factor = np.linalg.cholesky(np.asarray(sigma))
    return make_rng(seed).standard_normal((n, factor.shape[0])) @ factor.T


def _path_residuals(path, n, seed):
    """Residuals u_t = H_t e_t along a variance path."""
    factors = np.linalg.cholesky(path.sequence(n))
    shocks = make_rng(seed).standard_normal((n, path.d))
    return np.einsum("tab,tb->ta", factors, shocks)


@pytest.mark.parametrize(
    "t, n, b, kernel",
    [
        (0, 10, 0.1, "gaussian"),
        (4, 10, 0.5, "gaussian"),
        (9, 10, 2.0, "gaussian"),
        (17, 50, 0.2, "epanechnikov"),
        (0, 200, 0.05, "epanechnikov"),
    ],
)
def test_kernel_weights_normalized_and_exclude_self(t, n, b, kernel):
    """Weights sum to one and vanish at the date itself."""
    weights = kernel_weights(t, n, b, kernel)
    assert weights.shape == (n,)
    assert weights.sum() == pytest.approx(1.0)
    assert weights[t] == 0.0
    assert np.all(weights >= 0.0)


def test_kernel_weights_symmetric_neighbours():
    """The middle of three dates weighs both neighbours equally."""
    np.testing.assert_allclose(
        kernel_weights(1, 3, 0.7), [0.5, 0.0, 0.5]
    )


def test_kernel_weights_direct_evaluation():
    """Matches normalized Gaussian values at the scaled date offsets."""
    raw = norm.pdf(np.array([0.0, -0.5, -1.0, -1.5, -2.0]))
    raw[0] = 0.0
    np.testing.assert_allclose(
        kernel_weights(0, 5, 0.4, "gaussian"), raw / raw.sum()
    )


def test_kernel_weights_degenerate_bandwidth():
    """A compact kernel with a tiny bandwidth has no weight left."""
    with pytest.raises(HVNumericalError) as excinfo:
        kernel_weights(3, 10, 0.01, "epanechnikov")
    assert excinfo.value.code == "degenerate_weights"


def test_kernel_spec():
    """Resolves names and passes kernel instances through."""
    gaussian = KernelSpec("gaussian")
    assert gaussian.name == "gaussian"
    assert KernelSpec(gaussian) is gaussian
    assert KernelSpec("epanechnikov")(np.array([0.0, 1.0, 2.0])).tolist() == [
        0.75,
        0.0,
        0.0,
    ]
    with pytest.raises(HVValidationError):
        KernelSpec("triangular")


def test_default_bandwidth_grid():
    """Spans 0.5 to 3 times n ** -0.2 in 12 log-spaced points."""
    grid = BandwidthGrid.default(100)
    values = grid.values
    assert values.size == 12
    assert values[0] == pytest.approx(0.5 * 100**-0.2)
    assert values[-1] == pytest.approx(3.0 * 100**-0.2)
    assert np.all(np.diff(values) > 0)
    assert BandwidthGrid.single(0.3).values.tolist() == [0.3]


def test_constant_residuals_reproduce_outer_product():
    """Equal residuals give v v' at every date, floored to be PD."""
    v = np.array([1.0, 2.0])
    residuals = np.tile(v, (20, 1))
    with pytest.warns(HVWarning):
        estimate = estimate_variance_path(residuals, 0.3)

    floor = 1e-6 * 5.0 / 2
    assert estimate.floor == pytest.approx(floor)
    assert estimate.n_floored == 20
    projector = np.outer(v, v) / 5.0
    expected = np.outer(v, v) + floor * (np.eye(2) - projector)
    np.testing.assert_allclose(estimate.matrices[7], expected, atol=1e-12)
    assert np.all(np.linalg.eigvalsh(estimate.matrices)[:, 0] > 0)


def test_flooring_is_idempotent():
    """Re-flooring a floored stack changes nothing."""
    stack = np.array([[[1.0, 1.0], [1.0, 1.0]], [[2.0, 0.0], [0.0, 3.0]]])
    floored, count = floor_eigenvalues(stack, 0.1)
    assert count == 1
    np.testing.assert_array_equal(floored[1], stack[1])
    again, recount = floor_eigenvalues(floored, 0.1)
    assert recount == 0
    np.testing.assert_array_equal(again, floored)


def test_estimate_is_consistent_under_iid_residuals():
    """Smoothing iid residuals recovers their covariance."""
    sigma = np.array([[1.0, 0.3], [0.3, 1.0]])
    estimate = estimate_variance_path(
        _iid_residuals(sigma, 4000, seed=11), 0.2
    )
    errors = np.linalg.norm(estimate.matrices - sigma, axis=(1, 2))
    assert errors.max() <= 0.15 * np.linalg.norm(sigma)
    assert estimate.diagonal().shape == (4000, 2)


@pytest.mark.slow
def test_estimate_at_break_is_the_midpoint_mixture():
    """At the break date a symmetric kernel averages both regimes."""
    path = VariancePath("break")
    n = 4000
    estimate = estimate_variance_path(
        _path_residuals(path, n, seed=5), 0.05
    )
    t = n // 2 - 1
    mixture = 0.5 * path(0.499) + 0.5 * path(0.5)
    error = np.linalg.norm(estimate.matrices[t] - mixture)
    assert error <= 0.2 * np.linalg.norm(mixture)


def test_cross_validation_on_singleton_grid():
    """A singleton grid returns its only bandwidth."""
    residuals = _iid_residuals(np.eye(2), 50, seed=1)
    assert cross_validate_bandwidth(
        residuals, BandwidthGrid.single(0.25)
    ) == pytest.approx(0.25)


def test_cross_validation_returns_grid_element():
    """The chosen bandwidth minimizes the leave-one-out curve."""
    residuals = _path_residuals(VariancePath("smooth"), 200, seed=4)
    grid = BandwidthGrid.default(200)
    losses = cross_validation_curve(residuals, grid)
    chosen = cross_validate_bandwidth(residuals, grid)
    assert chosen in grid.values
    assert chosen == grid.values[int(np.argmin(losses))]


def test_cross_validation_skips_degenerate_bandwidths():
    """Degenerate bandwidths get an infinite loss."""
    residuals = _iid_residuals(np.eye(1), 40, seed=2)
    grid = BandwidthGrid(1.0, 0.001, 0.5, 5)
    losses = cross_validation_curve(residuals, grid, "epanechnikov")
    assert np.isinf(losses[0])
    assert np.isfinite(losses[-1])

    with pytest.raises(HVNumericalError):
        cross_validate_bandwidth(
            residuals, BandwidthGrid.single(0.001), "epanechnikov"
        )


@pytest.mark.slow
def test_cross_validation_prefers_smaller_bandwidths_under_breaks():
    """Break residuals usually select no larger a bandwidth."""
    n, replications = 400, 40
    grid = BandwidthGrid.default(n)
    breaks, constant = VariancePath("break"), VariancePath("constant", d=2)
    hits = sum(
        cross_validate_bandwidth(_path_residuals(breaks, n, k), grid)
        <= cross_validate_bandwidth(_path_residuals(constant, n, k), grid)
        for k in range(replications)
    )
    assert hits >= 0.7 * replications
