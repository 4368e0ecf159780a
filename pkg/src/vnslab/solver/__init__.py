"""Evolution of the coupled system: a 1D grid analogue and a 3D particle mode."""

from .common import NumericalBlowup
from .config import ConfigError, SimConfig, load_config, parse_config
from .driver import SimulationResult, simulate
from .grid1d import init_grid1d, run_grid1d, step_grid1d
from .particle3d import deposit, init_particle3d, run_particle3d, seed_particles, step_particle3d
from .phi_source import phi_source, phi_sources
from .snapshot import Snapshot, SnapshotError, load_series, read_snapshot, write_snapshot

__all__ = [
    "ConfigError", "NumericalBlowup", "SimConfig", "SimulationResult", "Snapshot", "SnapshotError",
    "deposit", "init_grid1d", "init_particle3d", "load_config", "load_series", "parse_config", "phi_source",
    "phi_sources", "read_snapshot", "run_grid1d", "run_particle3d", "seed_particles", "simulate",
    "step_grid1d", "step_particle3d", "write_snapshot",
]
