import numpy as np
import pytest

from vnslab.diagnostics.phi_growth import crossing_times, integrate_phi, launch_points, phi_growth, saturating_source


def test_rest_particle_closed_form():
    eps = 0.01
    x1, v, t1 = launch_points("rest")
    rho = np.array([1.5, 4.0, 16.0])
    phi = integrate_phi(x1, v, t1, rho, saturating_source(eps))[0]
    assert np.allclose(phi, 2 * np.sqrt(eps) * (np.sqrt(1 + rho) - np.sqrt(2)), rtol=1e-13)


def test_crossing_times_land_on_the_hyperboloids():
    x1, v, t1 = launch_points("cloud", n=200, seed=3)
    rho = np.array([1.0, 2.0, 7.0])
    t = crossing_times(x1, v, t1, rho)
    c = v / np.sqrt(1 + np.sum(v**2, axis=1))[:, None]
    for k, r in enumerate(rho):
        x = x1 + c * (t[:, k] - t1)[:, None]
        assert np.allclose(t[:, k] ** 2 - np.sum(x**2, axis=1), r**2, rtol=1e-10)
    assert np.allclose(t[:, 0], t1)


def test_source_bound_is_saturated_and_growth_is_positive():
    h = saturating_source(0.04)
    assert h(np.array([3.0]), np.array([[0.0, 0.0, 0.0]]), np.zeros((1, 3)))[0] == pytest.approx(0.1)
    g = phi_growth(rho_range=(1.0, 4.0), n_rho=8)
    assert np.all(np.diff(g.sup_phi) > 0) and g.fit.slope > 0 and g.bound_constant > 0


def test_bad_inputs():
    with pytest.raises(ValueError):
        integrate_phi(np.zeros((1, 3)), np.zeros((1, 3)), np.ones(1), np.array([0.5]), saturating_source(1.0))
    with pytest.raises(ValueError):
        launch_points("nowhere")
