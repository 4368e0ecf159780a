"""Hyperboloidal diagnostics for stored 3D particle runs.

Wave quantities come from the stored phi and phi_t grids.  Spatial jets use
the local Lagrange interpolant; phi_tt is recovered from the wave equation
as Laplacian(phi) - rho(f).  Values at a node (t_k, x_k) are blended
linearly between the two snapshots bracketing t_k.  Particle quantities
(chi and E_0) are tallied from worldline crossings between consecutive
particle snapshots, so they need runs stored with particles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import map_coordinates

from ..jets import GRID_MARGIN, GRID_STENCIL, Jet, StoredGrid, grid_jet
from ..solver.crossings import CrossingTally
from ..solver.snapshot import Snapshot
from ..wave_energy import commuted_energy_density
from .hyperboloid import HyperboloidQuadrature, build_quadrature, horizon_radius, wave_coverage
from .series1d import HorizonError


class ResolutionError(ValueError):
    """The stored data cannot resolve the requested number of derivatives."""


MAX_SNAPSHOT_WAVE_ORDER = 1  # grid jets stop at second derivatives


@dataclass
class ParticleSeries3D:
    times: np.ndarray
    snapshots: list[Snapshot]
    half_width: float
    n_cells: int
    sponge_cells: int

    @classmethod
    def from_snapshots(cls, snaps: Sequence[Snapshot]) -> "ParticleSeries3D":
        if not snaps:
            raise ValueError("empty snapshot series")
        snaps = sorted(snaps, key=lambda s: s.time)
        first = snaps[0]
        if first.mode != "particle3d":
            raise ValueError(f"expected particle3d snapshots, got {first.mode!r}")
        meta = first.meta
        return cls(np.array([s.time for s in snaps]), list(snaps), float(meta["x_max"]), int(meta["nx"]),
                   int(meta.get("sponge_width", "0")))

    @property
    def dx(self) -> float:
        return 2 * self.half_width / self.n_cells

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    @property
    def has_particles(self) -> bool:
        return int(self.snapshots[0].meta.get("n_particles", "0")) > 0

    def box_radius(self) -> float:
        """Radius of the largest ball free of sponge cells and interpolation margins."""
        margin = self.sponge_cells + GRID_MARGIN + GRID_STENCIL // 2
        return self.half_width - margin * self.dx

    def usable_radius(self, rho: float) -> float:
        return min(self.box_radius(), horizon_radius(rho, self.t_max))

    def _stored(self, values: np.ndarray) -> StoredGrid:
        o = -self.half_width
        return StoredGrid(values, (o, o, o), (self.dx, self.dx, self.dx))

    def _bracket(self, t: np.ndarray) -> np.ndarray:
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.t_max + 1e-12):
            raise HorizonError("node time outside stored snapshot range")
        return np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2)

    def _snapshot_jet(self, snap: Snapshot, x: np.ndarray) -> Jet:
        """Spacetime jet (order 2) of phi at time snap.time and points x."""
        p = grid_jet(self._stored(snap["phi"]), x, 2)
        q = grid_jet(self._stored(snap["phi_t"]), x, 1)
        src = map_coordinates(snap["rho"], list(((x + self.half_width) / self.dx).T), order=1, mode="nearest")
        n = x.shape[0]
        grad = np.empty((n, 4))
        grad[:, 0] = q.val
        grad[:, 1:] = p.grad
        hess = np.empty((n, 4, 4))
        hess[:, 0, 0] = np.trace(p.hess, axis1=1, axis2=2) - src
        hess[:, 0, 1:] = hess[:, 1:, 0] = q.grad
        hess[:, 1:, 1:] = p.hess
        return Jet([p.val, grad, hess])

    def phi_jet(self, t: np.ndarray, x: np.ndarray) -> Jet:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        x = np.atleast_2d(x)
        idx = self._bracket(t)
        parts = [np.zeros((t.size,)), np.zeros((t.size, 4)), np.zeros((t.size, 4, 4))]
        for s in np.unique(idx):
            sel = idx == s
            ta, tb = self.times[s], self.times[s + 1]
            lam = (t[sel] - ta) / (tb - ta)
            ja = self._snapshot_jet(self.snapshots[s], x[sel])
            jb = self._snapshot_jet(self.snapshots[s + 1], x[sel])
            for k in range(3):
                shape = (-1,) + (1,) * k
                parts[k][sel] = (1 - lam).reshape(shape) * ja.parts[k] + lam.reshape(shape) * jb.parts[k]
        return Jet(parts)

    def grid_values(self, name: str, t: np.ndarray, x: np.ndarray) -> np.ndarray:
        """Trilinear values of a stored grid, blended linearly in t."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        idx = self._bracket(t)
        out = np.empty(t.size)
        coords = ((np.atleast_2d(x) + self.half_width) / self.dx).T
        for s in np.unique(idx):
            sel = idx == s
            ta, tb = self.times[s], self.times[s + 1]
            lam = (t[sel] - ta) / (tb - ta)
            a = map_coordinates(self.snapshots[s][name], list(coords[:, sel]), order=1, mode="constant")
            b = map_coordinates(self.snapshots[s + 1][name], list(coords[:, sel]), order=1, mode="constant")
            out[sel] = (1 - lam) * a + lam * b
        return out


@dataclass(frozen=True)
class Estimate:
    value: float
    covered_fraction: float
    tolerance: float


def _quadrature(series: ParticleSeries3D, rho: float, n_r: int, n_angles: int) -> HyperboloidQuadrature:
    return build_quadrature(rho, n_r, n_angles, series.usable_radius(rho), series.t_max)


def energy_wave_3d(series: ParticleSeries3D, N: int, rho: float, n_r: int = 24, n_angles: int = 8) -> Estimate:
    """Sum over Poincare words |alpha| <= N of the flux of T[Z^alpha phi] through H_rho.

    The tolerance is the change under halving n_r; the covered fraction is
    that of the free wave launched by the stored data parameters.
    """
    if N > MAX_SNAPSHOT_WAVE_ORDER:
        raise ResolutionError(f"energy_wave from snapshots supports N <= {MAX_SNAPSHOT_WAVE_ORDER}; "
                              f"N={N} needs third derivatives of phi")

    def value(nr):
        q = _quadrature(series, rho, nr, n_angles)
        pts = np.concatenate([q.grid.t[:, None], q.grid.x], axis=1)
        jet = series.phi_jet(q.grid.t, q.grid.x)
        return q.integrate(commuted_energy_density(jet, pts, N)), q.r_max

    fine, r_max = value(n_r)
    coarse, _ = value(max(4, n_r // 2))
    meta = series.snapshots[0].meta
    amplitude = float(meta.get("epsilon", "0")) * float(meta.get("phi_amplitude", "0"))
    width = float(meta.get("phi_width", "1"))
    t0 = float(meta.get("t0", "1"))
    return Estimate(fine, wave_coverage(rho, r_max, amplitude, width, t0), abs(fine - coarse))


def l2_density_3d(series: ParticleSeries3D, rho: float, n_r: int = 24, n_angles: int = 8) -> Estimate:
    """int_{H_rho} (t / rho)(int f dv / v0)^2 dmu from the deposited source grids (order 0, r1 = 0)."""

    def value(nr):
        q = _quadrature(series, rho, nr, n_angles)
        dens = series.grid_values("rho", q.grid.t, q.grid.x)
        return q.integrate(q.grid.t / rho * dens**2)

    fine, coarse = value(n_r), value(max(4, n_r // 2))
    return Estimate(fine, 1.0, abs(fine - coarse))


def crossing_tally(series: ParticleSeries3D, rho_list) -> CrossingTally:
    """chi and E_0 fluxes through each H_rho from particle snapshots."""
    if not series.has_particles:
        raise ValueError("particle quantities need snapshots stored with particles")
    rho_list = np.asarray(rho_list, dtype=float)
    if rho_list.size and (rho_list.max() > series.t_max or rho_list.min() < series.times[0]):
        raise HorizonError("requested rho outside the stored time range")
    tally = CrossingTally(rho_list)

    def state(s: Snapshot):
        x = np.stack([s[f"x{i}"] for i in (1, 2, 3)], axis=1)
        v = np.stack([s[f"v{i}"] for i in (1, 2, 3)], axis=1)
        return s.time, x, v, s["w"] * s["F"], s["frozen"] > 0.5

    for a, b in zip(series.snapshots[:-1], series.snapshots[1:]):
        tally.add_step(state(a), state(b))
    return tally
