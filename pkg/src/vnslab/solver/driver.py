"""Run a configuration to its final time and persist the results in a directory."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

from ..diagnostics.report import NormRow, write_norm_csv
from .config import SimConfig
from .grid1d import run_grid1d
from .particle3d import run_particle3d
from .snapshot import snapshot_name, write_snapshot

CROSSINGS_FILE = "crossings.csv"
CONFIG_COPY = "config.txt"


@dataclass(frozen=True)
class SimulationResult:
    out_dir: str
    n_snapshots: int
    frozen_fraction: float
    wall_time: float


class DirectorySink:
    """Writes numbered snapshots; the directory is cleared of stale ones first."""

    def __init__(self, out_dir: str):
        os.makedirs(out_dir, exist_ok=True)
        for name in os.listdir(out_dir):
            if name.startswith("snap_") and name.endswith(".vns"):
                os.remove(os.path.join(out_dir, name))
        self.out_dir = out_dir
        self.count = 0

    def __call__(self, snap) -> None:
        write_snapshot(os.path.join(self.out_dir, snapshot_name(self.count)), snap)
        self.count += 1


def simulate(cfg: SimConfig, out_dir: str | None = None, rho_list=(), progress=None) -> SimulationResult:
    """Evolve ``cfg``; particle runs also tally chi and E_0 through each H_rho in ``rho_list``."""
    out_dir = cfg.output_dir if out_dir is None else out_dir
    sink = DirectorySink(out_dir)
    with open(os.path.join(out_dir, CONFIG_COPY), "w") as fh:
        fh.write(cfg.to_text())
    start = time.perf_counter()
    if cfg.mode == "grid1d":
        run_grid1d(cfg, sink, with_Phi=cfg.evolve_Phi)
        frozen = 0.0
    else:
        run = run_particle3d(cfg, sink, rho_list=rho_list, progress=progress)
        frozen = run.ensemble.frozen_fraction
        if run.tally is not None:
            rows = []
            for k, rho in enumerate(run.tally.rho):
                rows.append(NormRow("chi_f", float(rho), float(run.tally.chi[k])))
                rows.append(NormRow("E0_f", float(rho), float(run.tally.e0[k])))
            write_norm_csv(rows, os.path.join(out_dir, CROSSINGS_FILE))
    return SimulationResult(out_dir, sink.count, frozen, time.perf_counter() - start)

