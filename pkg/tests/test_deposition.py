import numpy as np
import pytest
from scipy.integrate import quad

from vnslab.diagnostics.deposition import _hat_gaussian, cic_reference, deposition_noise, momentum_factor
from vnslab.solver.config import SimConfig

CFG = SimConfig(mode="particle3d", x_max=3.0, nx=24, sponge_width=8, n_particles=1000)


def test_hat_filter_matches_numerical_quadrature():
    h, c, s = 0.25, 0.1, 0.5
    for node in (-0.5, 0.0, 0.37):
        num, _ = quad(lambda y: max(0.0, 1 - abs(y - node) / h) * np.exp(-(y - c) ** 2 / (2 * s**2)), node - h,
                      node + h, epsabs=0, epsrel=1e-13)
        assert _hat_gaussian(np.array([node]), h, c, s)[0] == pytest.approx(num / h, rel=1e-12)


def test_reference_carries_the_full_charge():
    ref = cic_reference(CFG)
    dx = 2 * CFG.x_max / CFG.nx
    total = CFG.epsilon * momentum_factor(CFG.f_width_v) * (2 * np.pi) ** 1.5 * CFG.f_width_x**3
    assert ref.sum() * dx**3 == pytest.approx(total, rel=1e-8)  # box edge sits at 6 sigma


def test_noise_decreases_with_particle_count():
    st = deposition_noise(CFG, counts=(2**10, 2**11, 2**12, 2**13))
    assert np.all(np.diff(st.errors) < 0)
    assert st.fit.slope < -0.5
    with pytest.raises(ValueError):
        cic_reference(CFG.with_updates(f_center_v=0.1))
