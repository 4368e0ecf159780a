import numpy as np

from vnslab.diagnostics.convergence import exact_solution
from vnslab.solver.grid1d import Grid1D, run_grid1d


def _run(cfg):
    out = []
    state = run_grid1d(cfg, out.append, with_Phi=cfg.evolve_Phi)
    return out, state


def test_zero_data_stays_zero(small_grid1d):
    snaps, _ = _run(small_grid1d.with_updates(epsilon=0.0))
    assert len(snaps) > 2
    for s in snaps:
        for name, a in s.arrays.items():
            assert not np.any(a), name


def test_snapshot_cadence_and_final_time(small_grid1d):
    snaps, state = _run(small_grid1d)
    steps = [int(s.meta["step"]) for s in snaps]
    assert steps[0] == 0 and steps[-1] == small_grid1d.n_steps
    assert all(b - a <= small_grid1d.snapshot_every for a, b in zip(steps, steps[1:]))
    assert snaps[-1].time == state.t
    assert abs(state.t - small_grid1d.t_final) < 1e-12


def test_free_transport_conserves_mass_and_matches_closed_form(small_grid1d):
    cfg = small_grid1d.with_updates(coupling="free_transport", evolve_Phi=False, epsilon=1.0)
    snaps, _ = _run(cfg)
    grid = Grid1D.from_config(cfg)
    mass = [grid.x_weights @ s["f"] @ grid.v_weights for s in snaps]
    assert np.ptp(mass) / mass[0] < 1e-3
    exact = exact_solution(cfg, snaps[-1].time, grid.x, grid.v)["f"]
    assert np.max(np.abs(snaps[-1]["f"] - exact)) < 0.05
    assert not np.any(snaps[-1]["phi"])


def test_free_wave_matches_dalembert(small_grid1d):
    cfg = small_grid1d.with_updates(coupling="free_wave", evolve_Phi=False, epsilon=1.0, nx=128)
    snaps, _ = _run(cfg)
    grid = Grid1D.from_config(cfg)
    exact = exact_solution(cfg, snaps[-1].time, grid.x, grid.v)["phi"]
    assert np.max(np.abs(snaps[-1]["phi"] - exact)) < 0.02
    assert not np.any(snaps[-1]["f"])


def test_coupled_response_is_linear_at_small_amplitude(small_grid1d):
    a, _ = _run(small_grid1d.with_updates(epsilon=1e-4))
    b, _ = _run(small_grid1d.with_updates(epsilon=2e-4))
    fa, fb = a[-1]["f"], b[-1]["f"]
    assert np.max(np.abs(fb - 2 * fa)) < 1e-3 * np.max(np.abs(fb))
    assert "Phi0" in a[-1].arrays and np.any(a[-1]["Phi1"])
