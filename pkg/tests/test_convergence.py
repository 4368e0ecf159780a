import pytest

from vnslab.diagnostics.convergence import ConvergenceError, convergence_study, level_config
from vnslab.solver.config import SimConfig

WAVE = SimConfig(mode="grid1d", x_max=8.0, nx=64, nv=16, v_max=4.0, t_final=3.0, epsilon=1.0, coupling="free_wave",
                 evolve_Phi=False, sponge_width=8)


def test_levels_double_every_resolution():
    cfg = level_config(WAVE, 2)
    assert (cfg.nx, cfg.nv, cfg.sponge_width) == (256, 64, 32)
    assert cfg.dt == pytest.approx(WAVE.dt / 4)


def test_free_wave_is_second_order():
    table = convergence_study(WAVE, 3)
    assert table.method == "exact" and table.gated == ("phi",)
    assert table.fitted_order("phi") > 1.8 and table.passed()
    assert any("order" in line for line in table.lines())


def test_setup_errors():
    with pytest.raises(ConvergenceError):
        convergence_study(WAVE, 1)
    with pytest.raises(ConvergenceError):
        convergence_study(WAVE.with_updates(coupling="full"), 2)
    with pytest.raises(ConvergenceError):
        convergence_study(WAVE.with_updates(mode="particle3d"), 3)
