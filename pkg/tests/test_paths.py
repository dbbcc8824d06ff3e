import numpy as np
import pytest

from hetvar import (
    AbruptBreakPath,
    BaseVariancePath,
    ConstantPath,
    HVValidationError,
    PiecewisePath,
    SmoothTrendPath,
    VariancePath,
)


@pytest.mark.parametrize(
    "kind, cls",
    [
        ("constant", ConstantPath),
        ("smooth", SmoothTrendPath),
        ("break", AbruptBreakPath),
    ],
)
def test_factory_dispatches_to_registered_kind(kind, cls):
    """Returns an instance of the registered class."""
    assert isinstance(VariancePath(kind), cls)
    assert BaseVariancePath.registry[kind] is cls


def test_factory_rejects_unknown_kind():
    """Names the offending kind."""
    with pytest.raises(HVValidationError, match="garch"):
        VariancePath("garch")


def test_available_kinds():
    """Lists every path kind."""
    assert set(VariancePath.get_available_kinds()) == {
        "constant",
        "smooth",
        "break",
        "piecewise",
    }


def test_constant_path_scalar_and_matrix():
    """Scalar covariances become multiples of the identity."""
    np.testing.assert_array_equal(
        VariancePath("constant", sigma=2.0, d=3)(0.3), 2.0 * np.eye(3)
    )
    matrix = [[1.0, 0.3], [0.3, 2.0]]
    np.testing.assert_array_equal(
        VariancePath("constant", sigma=matrix)(1.0), matrix
    )


@pytest.mark.parametrize(
    "sigma",
    [
        [[1.0, 2.0], [2.0, 1.0]],
        [[1.0, 0.1], [0.0, 1.0]],
        -1.0,
    ],
)
def test_constant_path_rejects_invalid_covariance(sigma):
    """Rejects indefinite or asymmetric matrices."""
    with pytest.raises(HVValidationError):
        VariancePath("constant", sigma=sigma)


def test_smooth_path_shape_and_defaults():
    """Defaults gamma2 to gamma1 / 3 and evaluates arrays of dates."""
    path = VariancePath("smooth")
    assert path.gamma2 == pytest.approx(20.0 / 3.0)

    values = path(np.array([0.5, 1.0]))
    assert values.shape == (2, 2, 2)
    assert values[1, 1, 1] == pytest.approx(1.0 + 20.0 / 3.0)
    np.testing.assert_allclose(
        np.linalg.det(values), [(1 + 10.0) * (1 + 10.0 / 3.0), 21 * 23 / 3]
    )


def test_break_path_breakpoint_and_integral():
    """Integrates exactly across the break."""
    path = VariancePath("break", gamma1=20.0, gamma2=4.0, rho=0.0)
    assert path.breakpoints == (0.5,)
    np.testing.assert_allclose(
        path.integrate(grid_size=10), np.diag([10.5, 2.5])
    )


def test_piecewise_scalar_segments():
    """Scalar segment values are read as multiples of the identity."""
    path = PiecewisePath(
        [(0.5, lambda r: 1.0), (1.0, lambda r: np.diag([4.0, 9.0]))], d=2
    )
    np.testing.assert_array_equal(path(0.25), np.eye(2))
    np.testing.assert_array_equal(path(0.5), np.diag([4.0, 9.0]))
    assert path.breakpoints == (0.5,)


@pytest.mark.parametrize(
    "segments",
    [
        [],
        [(0.5, lambda r: 1.0)],
        [(0.6, lambda r: 1.0), (0.4, lambda r: 1.0), (1.0, lambda r: 1.0)],
        [(1.0, lambda r: -1.0)],
    ],
)
def test_piecewise_rejects_invalid_segments(segments):
    """Rejects empty, unordered, incomplete or indefinite segments."""
    with pytest.raises(HVValidationError):
        PiecewisePath(segments)


def test_sequence_uses_sample_dates():
    """Evaluates the path at t/n, t = 1..n."""
    path = VariancePath(
        "piecewise", segments=[(1.0, lambda r: 1.0 + 19.0 * r)]
    )
    np.testing.assert_allclose(
        path.sequence(4)[:, 0, 0], 1.0 + 19.0 * np.arange(1, 5) / 4
    )
