"""Shared fixtures; also prints the acceptance verdicts at the end of the session."""

import numpy as np
import pytest

from vnslab.solver.config import SimConfig

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> str:
    line = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_grid1d():
    return SimConfig(mode="grid1d", x_max=8.0, nx=64, v_max=6.0, nv=32, t_final=3.0, sponge_width=8,
                     snapshot_every=2, epsilon=0.01).validate()


@pytest.fixture
def small_particle3d():
    return SimConfig(mode="particle3d", x_max=6.0, nx=40, n_particles=4000, t_final=2.0, sponge_width=8,
                     snapshot_every=2, epsilon=0.01, f_width_v=0.25).validate()
