"""Acceptance criteria 1-12, one PASS/FAIL line each.

Each test records its verdict with ``record_criterion`` before asserting, so
the summary at the end of the pytest session lists every criterion even when
some fail.  Run on its own with ``python3 -m pytest tests/test_acceptance.py``.
"""

import filecmp
import os
import time

import numpy as np
import pytest

from conftest import record_criterion
from vnslab.cli import main as cli_main
from vnslab.diagnostics.convergence import convergence_study
from vnslab.diagnostics.deposition import deposition_noise
from vnslab.diagnostics.fits import fit_decay
from vnslab.diagnostics.free_transport import free_transport_decay
from vnslab.diagnostics.phi_growth import phi_growth
from vnslab.diagnostics.report import read_norm_csv
from vnslab.diagnostics.series1d import GridSeries1D, energy_identity_residual
from vnslab.diagnostics.series3d import ParticleSeries3D, energy_wave_3d
from vnslab.identities import (ANALYTIC_TOL, EXACT_SUITES, FD_TOL, fit_order, run_suites, scaling_residual_norms,
                               verify_appendix_suite, verify_integral_spot, verify_ks_wave, verify_vrho_bounds)
from vnslab.solver.config import SimConfig, load_config
from vnslab.solver.driver import CROSSINGS_FILE, simulate
from vnslab.solver.grid1d import run_grid1d
from vnslab.solver.snapshot import load_series

CONFIGS = os.path.join(os.path.dirname(__file__), "..", "configs")
WORKERS = os.cpu_count() or 1


def _config(name: str) -> SimConfig:
    return load_config(os.path.join(CONFIGS, name))


def test_criterion_01_exact_identities():
    start = time.perf_counter()
    analytic = run_suites(list(EXACT_SUITES), seed=0, n_samples=10_000)
    fd = run_suites(list(EXACT_SUITES), seed=0, mode="fd")
    elapsed = time.perf_counter() - start
    gating = [r for r in analytic if r.gating]
    fd_gating = [r for r in fd if r.gating]
    worst = max(r.max_rel for r in gating)
    worst_fd = max(r.max_rel for r in fd_gating)
    fewest = min(r.samples for r in gating)
    ok = worst <= ANALYTIC_TOL and worst_fd <= FD_TOL and fewest >= 10_000 and elapsed <= 60
    record_criterion(1, ok, f"{len(gating)} identities, worst analytic {worst:.2e} (<= 1e-9), worst fd {worst_fd:.2e}"
                            f" (<= 1e-5), {fewest} points min, {elapsed:.1f} s (<= 60 s)")
    assert ok


def test_criterion_02_weight_propagation():
    reports = {r.name: r for r in run_suites(["weights"], seed=0, n_samples=10_000)}
    rep = reports["free_transport_of_weights"]
    ok = rep.max_rel <= 1e-12
    record_criterion(2, ok, f"T(z) for six weights: max residual {rep.max_rel:.2e} over {rep.samples} values"
                            " (<= 1e-12)")
    assert ok


def test_criterion_03_vrho_bounds():
    rep = verify_vrho_bounds(n_samples=1_000_000, seed=0)
    ok = rep.passed and rep.samples == 1_000_000
    record_criterion(3, ok, f"{rep.note} (need 0), worst relative excess {rep.max_rel:.1e}")
    assert ok


def test_criterion_04_integral_estimates():
    reports = verify_appendix_suite()
    grid = [r for r in reports if r.name.startswith("integral_estimate[")]
    spot = verify_integral_spot((1.0, 2.0, 4.0, 8.0))
    ok = all(r.passed for r in grid) and spot.max_rel <= 1e-8
    bad = sum(not r.passed for r in grid)
    record_criterion(4, ok, f"{len(grid) - bad}/{len(grid)} grid cases below the bound; pi/(4 rho) spot value"
                            f" residual {spot.max_rel:.1e} (<= 1e-8)")
    assert ok


def test_criterion_05_lambda_scaling():
    data = scaling_residual_norms(list(range(8)))
    orders = [fit_order(data["lambdas"], data["norms"][a]) for a in range(8)]
    ok = min(orders) >= 1.9
    record_criterion(5, ok, "fitted orders Y0..Y7: " + ", ".join(f"{o:.3f}" for o in orders) + " (>= 1.9)")
    assert ok


def test_criterion_06_free_transport_decay():
    start = time.perf_counter()
    fit, _, _ = free_transport_decay(t_window=(5.0, 40.0))
    elapsed = time.perf_counter() - start
    ok = -3.15 <= fit.slope <= -2.85 and elapsed <= 300
    record_criterion(6, ok, f"exponent {fit.slope:.4f} +- {fit.half_width:.4f} (in [-3.15, -2.85]), {elapsed:.1f} s")
    assert ok


def test_criterion_07_wave_klainerman_sobolev():
    rep = verify_ks_wave()
    ok = rep.max_rel <= 0.2
    record_criterion(7, ok, f"variation {rep.max_rel:.3f} over rho in [2, 10] (<= 0.20); {rep.note}")
    assert ok


def test_criterion_08_phi_growth():
    rest = phi_growth(eps=1e-2, rho_range=(1.0, 16.0), launch="rest")
    cloud = phi_growth(eps=1e-2, rho_range=(1.0, 16.0), launch="cloud")
    ok = rest.fit.slope <= 0.55
    record_criterion(8, ok, f"growth exponent {rest.fit.slope:.3f} (<= 0.55), cloud {cloud.fit.slope:.3f}; "
                            f"|Phi| <= K sqrt(eps rho) with K = {rest.bound_constant:.3f}; "
                            f"slope between the last two rho {rest.tail_slope:.3f}")
    assert ok


def _grid1d_series(cfg: SimConfig) -> GridSeries1D:
    out = []
    run_grid1d(cfg, out.append, with_Phi=cfg.evolve_Phi)
    return GridSeries1D.from_snapshots(out)


ENERGY_PAIRS = ((1.5, 2.0), (2.0, 3.0), (3.0, 4.0), (1.5, 4.0))


def test_criterion_09_energy_identity():
    base = _config("grid1d.cfg").with_updates(snapshot_every=1)
    # one refinement level halves dx, dv, dt and the snapshot interval
    fine = base.with_updates(nx=2 * base.nx, nv=2 * base.nv, sponge_width=2 * base.sponge_width)
    coarse_s, fine_s = _grid1d_series(base), _grid1d_series(fine)
    coarse = [energy_identity_residual(coarse_s, a, b).residual for a, b in ENERGY_PAIRS]
    refined = [energy_identity_residual(fine_s, a, b).residual for a, b in ENERGY_PAIRS]
    ok = max(coarse) <= 0.02 and all(f <= 0.5 * c for f, c in zip(refined, coarse))
    detail = ", ".join(f"H{a}->H{b}: {c:.2e} -> {f:.2e}" for (a, b), c, f in zip(ENERGY_PAIRS, coarse, refined))
    record_criterion(9, ok, f"residuals at {base.nx}x{base.nv} -> {fine.nx}x{fine.nv}: {detail} (<= 2%, halving)")
    assert ok


STABILITY_RHO = np.geomspace(1.0, 8.0, 16)


@pytest.mark.slow
def test_criterion_10_coupled_stability(tmp_path):
    cfg = _config("particle3d_stability.cfg").with_updates(workers=WORKERS)
    start = time.perf_counter()
    res = simulate(cfg, str(tmp_path), rho_list=STABILITY_RHO)
    elapsed = time.perf_counter() - start
    series = ParticleSeries3D.from_snapshots(load_series(str(tmp_path)))
    wave = [energy_wave_3d(series, 1, rho) for rho in STABILITY_RHO]
    e1 = fit_decay(STABILITY_RHO, [w.value for w in wave])
    rows = [r for r in read_norm_csv(os.path.join(str(tmp_path), CROSSINGS_FILE)) if r.quantity == "E0_f"]
    e0 = fit_decay([r.rho for r in rows], [r.value for r in rows])
    ok = e1.slope <= 0.1 and e0.slope <= 0.1 and res.frozen_fraction <= 0.01 and elapsed <= 1800
    record_criterion(10, ok, f"E1[phi] exponent {e1.slope:+.3f} +- {e1.half_width:.3f}, E0[f] exponent "
                             f"{e0.slope:+.3f} +- {e0.half_width:.3f} (<= 0.1); frozen {res.frozen_fraction:.1e}"
                             f" (<= 1%); wave coverage {wave[0].covered_fraction:.2f} at rho=1 to "
                             f"{wave[-1].covered_fraction:.1e} at rho=8; {elapsed:.0f} s on {WORKERS} worker(s)")
    assert ok


HALTON_STATIC = SimConfig(mode="particle3d", x_max=3.0, nx=24, sponge_width=8, n_particles=1000, seeding="halton")


@pytest.mark.slow
def test_criterion_11_convergence_orders():
    coupled = convergence_study(_config("grid1d_coupled_convergence.cfg"), 4)
    free_wave = convergence_study(_config("grid1d_free_wave.cfg"), 3)
    noise = deposition_noise(HALTON_STATIC, workers=WORKERS)
    orders = {f"coupled {q}": coupled.fitted_order(q) for q in coupled.gated}
    orders["free wave phi"] = free_wave.fitted_order("phi")
    grid_ok = min(orders.values()) >= 1.8
    noise_ok = noise.fit.slope <= -0.9
    ok = grid_ok and noise_ok
    record_criterion(11, ok, ", ".join(f"{k} {v:.2f}" for k, v in orders.items()) + " (>= 1.8); Halton "
                             f"deposition noise exponent {noise.fit.slope:.3f} +- {noise.fit.half_width:.3f} (<= -0.9)")
    assert grid_ok, orders
    assert noise_ok, noise.fit


def _same_tree(a: str, b: str) -> bool:
    names = sorted(os.listdir(a))
    if names != sorted(os.listdir(b)):
        return False
    _, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    return not mismatch and not errors


def test_criterion_12_determinism(tmp_path):
    runs = {
        "grid1d": (os.path.join(CONFIGS, "grid1d_free_transport.cfg"), "1.5,2.0,3.0,4.0"),
        "particle3d": (os.path.join(CONFIGS, "particle3d_small.cfg"), "1.5,2.0,3.0"),
    }
    same = {}
    for label, (cfg, rhos) in runs.items():
        dirs = []
        for k in range(2):
            out = str(tmp_path / f"{label}_{k}")
            assert cli_main(["simulate", cfg, "--out", out, "--seed", "7", "--workers", "2", "--rho", rhos]) == 0
            assert cli_main(["diagnose", out, "--rho", rhos, "--workers", "2"]) == 0
            dirs.append(out)
        same[label] = _same_tree(*dirs)
    reports = []
    for k in range(2):
        path = str(tmp_path / f"verify_{k}.csv")
        assert cli_main(["verify", "--suite", "commutators", "--samples", "500", "--seed", "7", "--out", path]) == 0
        reports.append(path)
    same["verify"] = filecmp.cmp(*reports, shallow=False)
    ok = all(same.values())
    record_criterion(12, ok, ", ".join(f"{k} {'identical' if v else 'DIFFERENT'}" for k, v in same.items())
                             + " (snapshots, crossings and norm reports compared bytewise)")
    assert ok


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
