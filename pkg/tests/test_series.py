import numpy as np
import pytest

from vnslab.diagnostics.hyperboloid import _free_wave_radial, free_wave_energy
from vnslab.diagnostics.series1d import (GridSeries1D, HorizonError, chi_integral_1d, energy_f_1d,
                                         energy_identity_residual, l2_1d)
from vnslab.diagnostics.series3d import ParticleSeries3D, ResolutionError, energy_wave_3d, l2_density_3d
from vnslab.solver.grid1d import run_grid1d
from vnslab.solver.snapshot import Snapshot


def _series1d(cfg):
    out = []
    run_grid1d(cfg, out.append, with_Phi=cfg.evolve_Phi)
    return GridSeries1D.from_snapshots(out)


def test_chi_is_conserved_under_free_transport(small_grid1d):
    cfg = small_grid1d.with_updates(coupling="free_transport", evolve_Phi=False, epsilon=1.0, nx=128, nv=64,
                                    x_max=10.0, t_final=6.0)
    s = _series1d(cfg)
    # the horizon at rho = 3 is |x| <= 5.2, beyond the reach of the data by t = 6
    chi = [chi_integral_1d(s, rho) for rho in (1.5, 2.0, 3.0)]
    assert np.ptp(chi) / chi[0] < 0.01


def test_energy_identity_on_a_small_coupled_run(small_grid1d):
    s = _series1d(small_grid1d.with_updates(snapshot_every=1, t_final=4.0))
    ident = energy_identity_residual(s, 1.5, 3.0)
    assert ident.residual < 0.02
    assert ident.source != 0
    with pytest.raises(ValueError):
        energy_identity_residual(s, 3.0, 1.5)


def test_energies_and_l2_are_positive_and_bounded_by_horizon(small_grid1d):
    s = _series1d(small_grid1d)
    assert energy_f_1d(s, 1, 2.0) >= energy_f_1d(s, 0, 2.0) > 0
    assert l2_1d(s, 2.0, 0) > 0 and l2_1d(s, 2.0, 1) > 0
    with pytest.raises(HorizonError):
        chi_integral_1d(s, s.t_max + 1)


# -- 3D series on exact free-wave data -------------------------------------------------------

AMP, WIDTH, T0 = 1.0, 0.5, 1.0


def _exact_free_wave_series(times, x_max=6.0, n_cells=47, sponge=8):
    nodes = -x_max + 2 * x_max / n_cells * np.arange(n_cells + 1)  # odd cell count keeps r = 0 off the nodes
    X, Y, Z = np.meshgrid(nodes, nodes, nodes, indexing="ij")
    r = np.sqrt(X**2 + Y**2 + Z**2)
    snaps = []
    for t in times:
        tau = t - T0
        a = lambda s: s * AMP * np.exp(-0.5 * (s / WIDTH) ** 2)  # noqa: E731
        phi = (a(r - tau) + a(r + tau)) / (2 * r)
        phi_t, _ = _free_wave_radial(t, r, AMP, WIDTH, T0)
        meta = {"nx": str(n_cells), "x_max": repr(x_max), "sponge_width": str(sponge), "epsilon": "1.0",
                "phi_amplitude": repr(AMP), "phi_width": repr(WIDTH), "t0": repr(T0), "n_particles": "0"}
        snaps.append(Snapshot("particle3d", float(t), 0, {"phi": phi, "phi_t": phi_t, "rho": np.zeros_like(r)},
                              meta))
    return ParticleSeries3D.from_snapshots(snaps)


@pytest.fixture(scope="module")
def wave_series():
    return _exact_free_wave_series(np.linspace(1.0, 3.5, 51))


def test_wave_energy_from_exact_snapshots(wave_series):
    rho = 2.0
    est = energy_wave_3d(wave_series, 0, rho)
    r_max = wave_series.usable_radius(rho)
    exact = free_wave_energy(rho, r_max, AMP, WIDTH, T0)
    assert est.value == pytest.approx(exact, rel=0.01)
    assert 0 < est.covered_fraction <= 1 and est.tolerance < 0.01 * est.value
    assert energy_wave_3d(wave_series, 1, rho).value > est.value


def test_higher_order_energies_need_more_stored_derivatives(wave_series):
    with pytest.raises(ResolutionError):
        energy_wave_3d(wave_series, 2, 2.0)


def test_density_norm_vanishes_without_particles(wave_series):
    assert l2_density_3d(wave_series, 2.0).value == 0.0
    assert not wave_series.has_particles
    with pytest.raises(HorizonError):
        energy_wave_3d(wave_series, 0, 4.0)
