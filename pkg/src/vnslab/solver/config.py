"""Simulation configuration: a flat key=value text format mirroring :class:`SimConfig`."""

from __future__ import annotations

import math
import os
from dataclasses import asdict, dataclass, fields, replace
from typing import Any


class ConfigError(ValueError):
    """Invalid or unknown configuration key; the message names the key."""

    def __init__(self, key: str, message: str):
        super().__init__(f"config key '{key}': {message}")
        self.key = key


MODES = ("grid1d", "particle3d")
COUPLINGS = ("full", "free_transport", "free_wave")
SEEDINGS = ("halton", "sobol", "random")


@dataclass(frozen=True)
class SimConfig:
    mode: str = "grid1d"
    # space: box [-x_max, x_max]^d with nx cells per axis
    x_max: float = 10.0
    nx: int = 256
    # momentum grid (grid1d)
    v_max: float = 6.0
    nv: int = 128
    # particles (particle3d)
    n_particles: int = 100_000
    seeding: str = "halton"
    store_particles: bool = True
    # time stepping
    cfl: float = 0.5
    t0: float = 1.0
    t_final: float = 8.0
    # data: f0 = epsilon * gaussian(x, v), phi0 = epsilon * phi_amplitude * gaussian(x), phi1 = 0
    epsilon: float = 1e-2
    f_center_x: float = 0.0
    f_width_x: float = 0.5
    f_center_v: float = 0.0
    f_width_v: float = 0.5
    phi_amplitude: float = 1.0
    phi_width: float = 0.5
    coupling: str = "full"
    evolve_Phi: bool = True
    # absorbing layer at the box faces, width in cells
    sponge_width: int = 16
    sponge_strength: float = 2.0
    # output
    snapshot_every: int = 4
    output: str = "snapshots"
    seed: int = 0
    workers: int = 1
    base_dir: str = "."

    @property
    def dx(self) -> float:
        return 2 * self.x_max / self.nx

    @property
    def dv(self) -> float:
        return 2 * self.v_max / self.nv

    @property
    def n_steps(self) -> int:
        """Smallest step count with dt <= cfl * dx that lands exactly on t_final."""
        return max(1, math.ceil((self.t_final - self.t0) / (self.cfl * self.dx) - 1e-9))

    @property
    def dt(self) -> float:
        return (self.t_final - self.t0) / self.n_steps

    def step_time(self, n: int) -> float:
        return self.t0 + n * self.dt

    @property
    def output_dir(self) -> str:
        return self.output if os.path.isabs(self.output) else os.path.join(self.base_dir, self.output)

    def validate(self) -> "SimConfig":
        def need(cond, key, msg):
            if not cond:
                raise ConfigError(key, msg)

        need(self.mode in MODES, "mode", f"must be one of {MODES}")
        need(self.coupling in COUPLINGS, "coupling", f"must be one of {COUPLINGS}")
        need(self.seeding in SEEDINGS, "seeding", f"must be one of {SEEDINGS}")
        need(0 < self.cfl <= 0.9, "cfl", "CFL number must lie in (0, 0.9]")
        need(self.x_max > 0, "x_max", "must be positive")
        need(self.nx >= 16, "nx", "need at least 16 cells")
        need(self.sponge_width >= 8, "sponge_width", "sponge needs at least 8 cells")
        need(2 * self.sponge_width < self.nx, "sponge_width", "sponge wider than the box")
        need(self.sponge_strength >= 0, "sponge_strength", "must be nonnegative")
        need(self.epsilon >= 0, "epsilon", "must be nonnegative")
        need(self.t_final > self.t0, "t_final", "must exceed t0")
        need(self.t0 >= 1.0, "t0", "initial slice must satisfy t0 >= 1")
        need(self.f_width_x > 0 and self.f_width_v > 0, "f_width_x", "widths must be positive")
        need(self.phi_width > 0, "phi_width", "must be positive")
        need(self.snapshot_every >= 1, "snapshot_every", "must be >= 1 step")
        need(self.workers >= 1, "workers", "must be >= 1")
        if self.mode == "grid1d":
            need(self.v_max > 0 and self.nv >= 16, "nv", "need at least 16 momentum cells")
        else:
            need(self.n_particles >= 1, "n_particles", "need at least one particle")
        return self

    def with_updates(self, **kw) -> "SimConfig":
        return replace(self, **kw)

    def to_text(self) -> str:
        d = asdict(self)
        d.pop("base_dir")
        return "".join(f"{k} = {_format(v)}\n" for k, v in d.items())


def _format(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


_TYPES = {f.name: f.type for f in fields(SimConfig)}


def _coerce(key: str, raw: str) -> Any:
    kind = _TYPES[key]
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(raw)
            return low in ("true", "1", "yes")
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw!r} as {kind}") from None


def parse_config(text: str, base_dir: str = ".") -> SimConfig:
    """Parse key=value lines; '#' starts a comment.  Unknown keys are errors."""
    values: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno} is not key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES or key == "base_dir":
            raise ConfigError(key, "unknown key")
        values[key] = _coerce(key, raw)
    return SimConfig(base_dir=base_dir, **values).validate()


def load_config(path: str) -> SimConfig:
    with open(path) as fh:
        text = fh.read()
    return parse_config(text, base_dir=os.path.dirname(os.path.abspath(path)))
