from itertools import product

import numpy as np
import pytest

from vnslab.diagnostics.free_transport import (FreeGaussian, ks_modified_check, ks_rhs, l2_free,
                                               sup_velocity_density)
from vnslab.jets import fd_jet_of

SOL = FreeGaussian(epsilon=1.0, sigma_x=0.5, sigma_v=0.5, t_data=0.0)


def test_jet_matches_finite_differences(rng):
    pts = np.column_stack([rng.uniform(2, 4, 30), rng.uniform(-1, 1, (30, 3)), rng.uniform(-0.8, 0.8, (30, 3))])
    exact = SOL.jet(pts, 2)
    approx = fd_jet_of(lambda p: SOL.value(p[:, 0], p[:, 1:4], p[:, 4:7]), pts, 2, h=1e-3, richardson=True)
    assert np.allclose(exact.val, approx.val, rtol=1e-14)
    assert np.max(np.abs(exact.grad - approx.grad)) < 1e-7
    assert np.max(np.abs(exact.hess - approx.hess)) < 1e-5


def test_velocity_moment_against_direct_momentum_grid():
    t, x = 3.0, np.array([[0.6, -0.2, 0.1]])
    # direct tensor trapezoid over |v_i| <= 3 (f decays like exp(-|v|^2 / 2 sigma_v^2) at late times too)
    g = np.linspace(-3, 3, 97)
    v = np.array(list(product(g, repeat=3)))
    direct = SOL.value(np.full(len(v), t), np.broadcast_to(x, v.shape), v).sum() * (g[1] - g[0]) ** 3
    moment = SOL.velocity_moment(t, x, n_y=16)[0]
    assert moment == pytest.approx(direct, rel=1e-4)


def test_momentum_nodes_need_positive_elapsed_time():
    with pytest.raises(ValueError):
        SOL.momentum_nodes(0.0, np.zeros((1, 3)))


def test_density_spreads_out():
    a, _ = sup_velocity_density(SOL, 5.0)
    b, _ = sup_velocity_density(SOL, 10.0)
    assert b < a / 4  # roughly the t^-3 law


def test_l2_of_the_free_solution_decays():
    assert l2_free(SOL, 8.0, n_r=8, r_panels=2, n_theta=4, n_y=6) < l2_free(SOL, 2.0, n_r=8, r_panels=2,
                                                                             n_theta=4, n_y=6)


COARSE = dict(n_r=4, r_panels=1, n_theta=2, n_y=3)


def test_weighted_rhs_is_linear_in_the_data():
    one = ks_rhs(SOL, 5.0, **COARSE)
    two = ks_rhs(FreeGaussian(epsilon=2.0), 5.0, **COARSE)
    assert one > 0 and two == pytest.approx(2 * one, rel=1e-12)


def test_zero_data_give_zero_on_both_sides():
    rep = ks_modified_check(FreeGaussian(epsilon=0.0), times=(5.0,), **COARSE)
    assert rep.lhs[0] == 0 and rep.rhs[0] == 0 and rep.spread == 0.0
