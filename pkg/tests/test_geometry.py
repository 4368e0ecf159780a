import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnslab.geometry import (DomainError, complete_homogeneous, hyperboloid_measure_weight, minkowski, rho_of,
                             sample_future_points, unit_normal, v_rho, v_zero, vrho_lower_bounds, weight_values)


def test_rho_and_normal(rng):
    t, x, v = sample_future_points(rng, 1000)
    rho = rho_of(t, x)
    # t^2 - r^2 cancels near the cone, so compare on the scale of t^2
    assert np.all(np.abs(rho**2 - (t**2 - np.sum(x**2, axis=1))) <= 1e-12 * t**2)
    nu = unit_normal(t, x)
    assert np.allclose(minkowski(nu, nu), -1.0, atol=1e-12)


def test_rho_rejects_points_outside_the_cone():
    with pytest.raises(DomainError):
        rho_of(np.array([1.0]), np.array([[2.0, 0.0, 0.0]]))


def test_v_rho_equals_minus_eta_of_normal_and_momentum(rng):
    t, x, v = sample_future_points(rng, 500, v_max=5.0)
    nu = unit_normal(t, x)
    p = np.concatenate([v_zero(v)[:, None], v], axis=1)
    assert np.allclose(v_rho(t, x, v), -minkowski(nu, p), rtol=1e-9)


def test_v_rho_is_stable_next_to_the_cone():
    t = np.array([1e6])
    x = np.array([[1e6 - 1e-3, 0.0, 0.0]])
    v = np.array([[50.0, 0.0, 0.0]])
    rho = rho_of(t, x)
    v0 = v_zero(v)
    # exact (t v0 - x v) / rho computed in extended precision
    exact = float((np.longdouble(t[0]) * np.longdouble(v0[0]) - np.longdouble(x[0, 0]) * 50) / np.longdouble(rho[0]))
    assert abs(v_rho(t, x, v)[0] - exact) / exact < 1e-8


@given(st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_v_rho_lower_bounds_hold(seed):
    t, x, v = sample_future_points(np.random.default_rng(seed), 2000)
    lower = vrho_lower_bounds(t, x, v).max(axis=0)
    assert np.all(v_rho(t, x, v) >= lower * (1 - 1e-12))


def test_complete_homogeneous_small_cases(rng):
    a = rng.uniform(-1, 1, (5, 3))
    assert np.allclose(complete_homogeneous(a, 0), 1.0)
    assert np.allclose(complete_homogeneous(a, 1), a.sum(axis=1))
    h2 = sum(a[:, i] * a[:, j] for i in range(3) for j in range(i, 3))
    assert np.allclose(complete_homogeneous(a, 2), h2)


def test_weights_and_measure(rng):
    t, x, v = sample_future_points(rng, 100)
    w = weight_values(t, x, v)
    assert w.all_z().shape == (100, 6)
    # boost weight t v / v0 - x vanishes on the worldline x = v t / v0
    xs = t[:, None] * v / v_zero(v)[:, None]
    assert np.all(np.abs(weight_values(t, xs, v).z_boost) <= 1e-13 * t[:, None])
    assert np.allclose(hyperboloid_measure_weight(2.0, np.array([0.0, 1.5])), [0.0, 2.0 / 2.5 * 2.25])
