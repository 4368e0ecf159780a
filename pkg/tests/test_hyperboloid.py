import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnslab.diagnostics.hyperboloid import (build_quadrature, free_wave_energy, horizon_radius, measure_closed_form,
                                            wave_coverage)
from vnslab.diagnostics.series1d import HorizonError


@given(st.floats(1.0, 20.0), st.floats(0.1, 30.0))
@settings(max_examples=30, deadline=None)
def test_measure_against_closed_form(rho, r_max):
    q = build_quadrature(rho, n_r=24, n_angles=4, r_max=r_max)
    assert q.measure == pytest.approx(measure_closed_form(rho, r_max), rel=1e-12)


def test_quadrature_respects_the_horizon():
    assert horizon_radius(3.0, 5.0) == pytest.approx(4.0)
    with pytest.raises(HorizonError):
        build_quadrature(3.0, r_max=4.5, t_max=5.0)
    with pytest.raises(HorizonError):
        horizon_radius(6.0, 5.0)


def test_free_wave_flux_is_the_same_through_every_hyperboloid():
    # a narrow pulse at t0 = 1 leaves along u in [0.6, 1.4], so it crosses each H_rho within r <= 40
    e = [free_wave_energy(rho, 40.0, 1.0, 0.1, t0=1.0, n_r=64, panels=64) for rho in (2.0, 3.0, 5.0)]
    assert np.ptp(e) / e[0] < 1e-6


def test_coverage():
    assert wave_coverage(2.0, 40.0, 1.0, 0.1) == pytest.approx(1.0, abs=1e-9)
    part = wave_coverage(6.0, 3.0, 1.0, 0.3)
    assert 0 <= part < 0.5
    assert wave_coverage(6.0, 3.0, 0.0, 0.3) == 1.0
