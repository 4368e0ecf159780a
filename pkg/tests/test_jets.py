import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnslab.jets import (Jet, JetOrderError, MarginError, StoredGrid, analytic_jet, fd_jet, gaussian_bump, grid_jet,
                         plane_smooth, polynomial, random_gaussian, spherical_wave)


def _rel(a, b):
    return np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(b)))


FAMILIES = [
    random_gaussian(4, seed=3),
    polynomial([(1.5, (2, 1, 0, 0)), (-0.5, (0, 0, 3, 1)), (2.0, (1, 1, 1, 1))], 4),
    plane_smooth([[0.3, -0.7, 0.2, 0.5]], [0.4], [1.2]),
    spherical_wave(center=1.0, width=0.4),
]


@pytest.mark.parametrize("spec", FAMILIES, ids=lambda s: s.family)
def test_analytic_jet_matches_finite_differences(spec, rng):
    pts = np.column_stack([rng.uniform(3.0, 4.0, 50), rng.uniform(-1, 1, (50, 3))])
    exact = analytic_jet(spec, pts, 3)
    approx = fd_jet(spec, pts, 3, h=1e-3, richardson=True)
    for k, tol in enumerate((1e-14, 1e-7, 1e-6, 1e-4)):
        assert _rel(exact.parts[k], approx.parts[k]) < tol, k


def test_jet_arithmetic_follows_calculus_rules(rng):
    x = rng.uniform(0.5, 2.0, 20)
    y = rng.uniform(0.5, 2.0, 20)
    X = Jet.variable(x, 0, 2, 3)
    Y = Jet.variable(y, 1, 2, 3)
    q = (X * X * Y).exp() / Y + X.sqrt() - (X * Y).log().sin()
    # d/dx of exp(x^2 y)/y + sqrt(x) - sin(log(xy))
    dq_dx = 2 * x * np.exp(x**2 * y) + 0.5 / np.sqrt(x) - np.cos(np.log(x * y)) / x
    assert np.allclose(q.grad[:, 0], dq_dx, rtol=1e-13)
    # mixed second derivative is symmetric
    assert np.allclose(q.hess[:, 0, 1], q.hess[:, 1, 0])
    assert np.allclose(q.third, np.transpose(q.third, (0, 3, 2, 1)))


@given(st.floats(0.2, 5.0), st.integers(0, 5))
@settings(max_examples=40, deadline=None)
def test_integer_power_agrees_with_real_power(a, p):
    X = Jet.variable(np.array([a]), 0, 1, 3)
    lhs, rhs = X**p, X.power(float(p))
    for k in range(4):
        assert np.allclose(lhs.parts[k], rhs.parts[k], rtol=1e-12, atol=1e-12)


def test_embed_and_derivative_shapes():
    spec = gaussian_bump([0.0, 0.0], [1.0, 2.0])
    j = analytic_jet(spec, np.array([[0.3, -0.2]]), 2)
    big = j.embed([1, 3], 5)
    assert big.grad.shape == (1, 5)
    assert big.grad[0, 0] == 0 and big.grad[0, 1] == j.grad[0, 0]
    assert big.derivative(3).val[0] == j.grad[0, 1]
    with pytest.raises(JetOrderError):
        j.truncate(0).derivative(0)


def test_grid_jet_is_exact_on_low_degree_polynomials():
    spec = polynomial([(1.0, (3, 0, 1)), (-2.0, (0, 2, 2)), (0.5, (1, 1, 1))], 3)
    grid = StoredGrid.from_function(spec.value, (-2.0, -2.0, -2.0), (0.25, 0.25, 0.25), (17, 17, 17))
    pts = np.array([[0.1, -0.3, 0.77], [1.0, 0.9, -1.1]])
    got, want = grid_jet(grid, pts, 2), analytic_jet(spec, pts, 2)
    for k in range(3):
        assert _rel(got.parts[k], want.parts[k]) < 1e-11


def test_grid_jet_refuses_points_near_the_boundary():
    grid = StoredGrid(np.zeros((10, 10)), (0.0, 0.0), (1.0, 1.0))
    with pytest.raises(MarginError):
        grid_jet(grid, np.array([[0.5, 5.0]]), 1)
    with pytest.raises(JetOrderError):
        grid_jet(grid, np.array([[5.0, 5.0]]), 3)
