"""Observed convergence orders of the 1D grid solver under refinement.

Level k doubles the x and v cell counts k times; dt follows the CFL factor.
Node sets are nested, so fine solutions are compared on the coarse nodes.
When a closed form exists (free transport, free wave) each level is
compared against it; otherwise the differences between consecutive levels
are used, whose ratio also converges to 2^order.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..solver.config import SimConfig
from ..solver.grid1d import gaussian_f0, gaussian_phi0, run_grid1d
from ..solver.snapshot import Snapshot

DECLARED_ORDER = 2.0
ORDER_SLACK = 0.2


class ConvergenceError(ValueError):
    """The setup cannot produce an order estimate."""


def level_config(cfg: SimConfig, level: int) -> SimConfig:
    k = 2**level
    return replace(cfg, nx=cfg.nx * k, nv=cfg.nv * k, sponge_width=cfg.sponge_width * k,
                   snapshot_every=10**9)


def final_snapshot(cfg: SimConfig) -> Snapshot:
    out: list[Snapshot] = []
    run_grid1d(cfg, out.append, with_Phi=cfg.evolve_Phi)
    return out[-1]


def exact_solution(cfg: SimConfig, t: float, x: np.ndarray, v: np.ndarray) -> dict[str, np.ndarray] | None:
    """Closed-form f and phi for the uncoupled settings, None for the coupled system."""
    tau = t - cfg.t0
    if cfg.coupling == "free_transport":
        speed = v / np.sqrt(1 + v**2)
        x_foot = x[:, None] - tau * speed[None, :]
        f = np.empty((x.size, v.size))
        for j in range(v.size):
            f[:, j] = gaussian_f0(cfg, x_foot[:, j], v[j:j + 1])[:, 0]
        return {"f": f}
    if cfg.coupling == "free_wave":
        return {"phi": 0.5 * (gaussian_phi0(cfg, x - tau) + gaussian_phi0(cfg, x + tau))}
    return None


def _coarse(a: np.ndarray, level: int) -> np.ndarray:
    k = 2**level
    return a[(slice(None, None, k),) * a.ndim]


@dataclass
class ConvergenceTable:
    quantities: list[str]
    nx: list[int]
    errors: dict[str, list[float]]
    method: str  # "exact" or "two-grid"
    gated: tuple = ()

    def fitted_order(self, q: str) -> float:
        e = np.asarray(self.errors[q])
        h = 1.0 / np.asarray(self.nx[: e.size], dtype=float)
        slope, _ = np.polyfit(np.log(h), np.log(e), 1)
        return float(slope)

    def passed(self, declared: float = DECLARED_ORDER, slack: float = ORDER_SLACK) -> bool:
        return all(self.fitted_order(q) >= declared - slack for q in self.gated)

    def lines(self) -> list[str]:
        out = [f"method: {self.method}"]
        head = "nx".rjust(8) + "".join(q.rjust(14) for q in self.quantities)
        out.append(head)
        for k in range(len(self.errors[self.quantities[0]])):
            out.append(str(self.nx[k]).rjust(8) + "".join(f"{self.errors[q][k]:14.4e}" for q in self.quantities))
        out.append("order".rjust(8) + "".join(f"{self.fitted_order(q):14.3f}" for q in self.quantities))
        out.append("gated: " + ", ".join(self.gated))
        return out


def convergence_study(cfg: SimConfig, levels: int) -> ConvergenceTable:
    """Errors of every level (exact oracle) or of every consecutive pair (two-grid)."""
    if cfg.mode != "grid1d":
        raise ConvergenceError("convergence studies run the grid1d mode")
    if levels < 2:
        raise ConvergenceError("need at least 2 levels to fit an order")
    snaps = [final_snapshot(level_config(cfg, k)) for k in range(levels)]
    x = -cfg.x_max + cfg.dx * np.arange(cfg.nx + 1)
    v = -cfg.v_max + cfg.dv * np.arange(cfg.nv + 1)
    exact = exact_solution(cfg, snaps[0].time, x, v)
    nx = [cfg.nx * 2**k for k in range(levels)]
    if exact is not None:
        names = list(exact)
        errors = {q: [float(np.max(np.abs(_coarse(s[q], k) - exact[q]))) for k, s in enumerate(snaps)]
                  for q in names}
        return ConvergenceTable(names, nx, errors, "exact", gated=tuple(names))
    if levels < 3:
        raise ConvergenceError("two-grid orders need at least 3 levels")
    names = ["f", "phi"] + [q for q in ("Phi0", "Phi1") if q in snaps[0].arrays]
    errors = {q: [float(np.max(np.abs(_coarse(snaps[k][q], k) - _coarse(snaps[k + 1][q], k + 1))))
                  for k in range(levels - 1)] for q in names}
    return ConvergenceTable(names, nx, errors, "two-grid", gated=tuple(names))
