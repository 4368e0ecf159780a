"""Semi-Lagrangian grid solver for the 1D analogue.

The system on the line is

    -phi_tt + phi_xx = int f dv / v0,
    d_t f + (v / v0) d_x f - (v phi_t + v0 phi_x) d_v f = 2 (phi_t + (v / v0) phi_x) f,

and Phi_a (a = scaling, boost) are carried by the same characteristics with
d Phi_a / dt = h_a / v0.  One step is a Strang splitting

    drift dt/2 -> kick dt/2 -> Phi source dt -> kick dt/2 -> drift dt/2

where the kick uses the φ fields at the half step, taken from the leapfrog
values at t^n and t^{n+1}.  Interpolation is cubic B-spline with zero
inflow outside the box.

Nodes are x_j = -x_max + j dx for j = 0..nx, so levels with nx and 2 nx
share their coarse nodes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .common import check_finite, sponge_profile, trapezoid_weights
from .config import SimConfig
from .interp import interp_along
from .phi_source import N_MODIFIED_1D, phi_sources_1d
from .snapshot import Snapshot


@dataclass(frozen=True)
class Grid1D:
    x: np.ndarray
    v: np.ndarray
    dx: float
    dv: float
    dt: float
    sigma: np.ndarray  # sponge damping rate on the x nodes

    @property
    def v0(self) -> np.ndarray:
        return np.sqrt(1.0 + self.v**2)

    @property
    def v_weights(self) -> np.ndarray:
        return trapezoid_weights(self.v.size, self.dv)

    @property
    def x_weights(self) -> np.ndarray:
        return trapezoid_weights(self.x.size, self.dx)

    @classmethod
    def from_config(cls, cfg: SimConfig) -> "Grid1D":
        x = -cfg.x_max + cfg.dx * np.arange(cfg.nx + 1)
        v = -cfg.v_max + cfg.dv * np.arange(cfg.nv + 1)
        inner = cfg.x_max - cfg.sponge_width * cfg.dx
        return cls(x=x, v=v, dx=cfg.dx, dv=cfg.dv, dt=cfg.dt,
                   sigma=sponge_profile(x, inner, cfg.x_max, cfg.sponge_strength))


@dataclass
class GridState1D:
    t: float
    step: int
    f: np.ndarray  # (nx+1, nv+1)
    phi: np.ndarray  # (nx+1,) at t
    phi_prev: np.ndarray  # (nx+1,) at t - dt
    Phi: np.ndarray  # (2, nx+1, nv+1)

    def copy(self) -> "GridState1D":
        return GridState1D(self.t, self.step, self.f.copy(), self.phi.copy(), self.phi_prev.copy(),
                           self.Phi.copy())


def gaussian_f0(cfg: SimConfig, x, v) -> np.ndarray:
    gx = np.exp(-0.5 * ((np.asarray(x) - cfg.f_center_x) / cfg.f_width_x) ** 2)
    gv = np.exp(-0.5 * ((np.asarray(v) - cfg.f_center_v) / cfg.f_width_v) ** 2)
    return cfg.epsilon * np.multiply.outer(gx, gv)


def gaussian_phi0(cfg: SimConfig, x) -> np.ndarray:
    return cfg.epsilon * cfg.phi_amplitude * np.exp(-0.5 * (np.asarray(x) / cfg.phi_width) ** 2)


def velocity_density(f: np.ndarray, grid: Grid1D) -> np.ndarray:
    """int f dv / v0 on the x nodes."""
    return f @ (grid.v_weights / grid.v0)


def _laplacian(phi: np.ndarray, dx: float) -> np.ndarray:
    lap = np.zeros_like(phi)
    lap[1:-1] = (phi[2:] - 2 * phi[1:-1] + phi[:-2]) / dx**2
    return lap


def wave_update(phi, phi_prev, source, grid: Grid1D) -> np.ndarray:
    """Next leapfrog value with the sponge term sigma * phi_t, Dirichlet ends."""
    damp = 0.5 * grid.sigma * grid.dt
    new = (2 * phi - (1 - damp) * phi_prev + grid.dt**2 * (_laplacian(phi, grid.dx) - source)) / (1 + damp)
    new[[0, -1]] = 0.0
    return new


def _dx(a: np.ndarray, dx: float) -> np.ndarray:
    return np.gradient(a, dx, edge_order=2)


def init_grid1d(cfg: SimConfig) -> tuple[Grid1D, GridState1D]:
    grid = Grid1D.from_config(cfg)
    f = gaussian_f0(cfg, grid.x, grid.v)
    phi = gaussian_phi0(cfg, grid.x)
    if cfg.coupling == "free_transport":
        phi = np.zeros_like(phi)
    if cfg.coupling == "free_wave":
        f = np.zeros_like(f)
    source = velocity_density(f, grid) if cfg.coupling == "full" else np.zeros_like(phi)
    # phi_t = 0 at t0, so a Taylor step backwards is phi - dt^2/2 phi_tt
    phi_prev = phi + 0.5 * grid.dt**2 * (_laplacian(phi, grid.dx) - source)
    phi_prev[[0, -1]] = 0.0
    Phi = np.zeros((N_MODIFIED_1D,) + f.shape)
    return grid, GridState1D(t=cfg.t0, step=0, f=f, phi=phi, phi_prev=phi_prev, Phi=Phi)


class _Split:
    """Sub-steps of one Strang step at fixed half-step fields."""

    def __init__(self, grid: Grid1D, phi_t: np.ndarray, phi_x: np.ndarray, t: float):
        self.grid = grid
        self.t = t
        self.jj = np.arange(grid.x.size, dtype=float)[:, None]
        self.phi_t = phi_t[:, None]
        self.phi_x = phi_x[:, None]

    def drift(self, arrays, tau):
        g = self.grid
        shift = (g.v / g.v0) * tau / g.dx
        xi = np.broadcast_to(self.jj - shift[None, :], arrays[0].shape)
        return [interp_along(a, xi, axis=0) for a in arrays]

    def _force(self, v):
        v0 = np.sqrt(1 + v**2)
        return -(v * self.phi_t + v0 * self.phi_x), 2 * (self.phi_t + (v / v0) * self.phi_x)

    def kick(self, f, others, tau):
        """Advance in v over time tau; f also picks up its amplitude factor."""
        g = self.grid
        v = np.broadcast_to(g.v[None, :], f.shape)
        # RK4 backwards in time from the arrival node to the departure point
        h = -tau
        k1v, k1a = self._force(v)
        k2v, k2a = self._force(v + 0.5 * h * k1v)
        k3v, k3a = self._force(v + 0.5 * h * k2v)
        k4v, k4a = self._force(v + h * k3v)
        foot = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        log_amp_back = h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        # non-finite departure points would otherwise surface as indexing errors
        check_finite(self.t, momentum_foot=foot, amplitude=log_amp_back)
        vi = (foot - g.v[0]) / g.dv
        f_new = interp_along(f, vi, axis=1) * np.exp(-log_amp_back)
        return f_new, [interp_along(a, vi, axis=1) for a in others]


def step_grid1d(state: GridState1D, grid: Grid1D, cfg: SimConfig, phi_next: np.ndarray | None = None) -> GridState1D:
    """Advance ``state`` by one step in place and return it."""
    dt = grid.dt
    coupled = cfg.coupling == "full"
    if phi_next is None:
        phi_next = next_phi(state, grid, cfg)
    check_finite(state.t, phi_next=phi_next)
    phi_mid = 0.5 * (state.phi + phi_next)
    phi_t = (phi_next - state.phi) / dt
    phi_x = _dx(phi_mid, grid.dx)
    split = _Split(grid, phi_t, phi_x, state.t)

    evolve_Phi = cfg.evolve_Phi
    arrays = [state.f] + (list(state.Phi) if evolve_Phi else [])
    arrays = split.drift(arrays, 0.5 * dt)
    f, others = split.kick(arrays[0], arrays[1:], 0.5 * dt)

    if evolve_Phi:
        t_mid = state.t + 0.5 * dt
        if coupled:
            rho_mid = velocity_density(f, grid)
        else:
            rho_mid = np.zeros_like(phi_mid)
        phi_xx = _laplacian(phi_mid, grid.dx)
        phi_tt = phi_xx - rho_mid
        phi_tx = _dx(phi_t, grid.dx)
        X, V = np.meshgrid(grid.x, grid.v, indexing="ij")
        col = lambda a: a[:, None]  # noqa: E731
        with np.errstate(divide="ignore", invalid="ignore"):
            h = phi_sources_1d(t_mid, X, V, col(phi_mid), col(phi_t), col(phi_x), col(phi_tt), col(phi_tx),
                               col(phi_xx))
        # h only acts in the future of H_1, where Phi starts from zero
        inside = (t_mid**2 - X**2 >= 1.0)[..., None]
        h = np.where(inside, h, 0.0) / np.sqrt(1 + V**2)[..., None]
        others = [o + dt * h[..., a] for a, o in enumerate(others)]

    f, others = split.kick(f, others, 0.5 * dt)
    arrays = split.drift([f] + others, 0.5 * dt)
    f = np.maximum(arrays[0], 0.0)

    state.f = f
    if evolve_Phi:
        state.Phi = np.stack(arrays[1:])
    if cfg.coupling != "free_transport":
        state.phi_prev, state.phi = state.phi, phi_next
    state.t = cfg.step_time(state.step + 1)
    state.step += 1
    check_finite(state.t, f=state.f, phi=state.phi, Phi=state.Phi)
    return state


def next_phi(state: GridState1D, grid: Grid1D, cfg: SimConfig) -> np.ndarray:
    if cfg.coupling == "free_transport":
        return np.zeros_like(state.phi)
    source = velocity_density(state.f, grid) if cfg.coupling == "full" else np.zeros_like(state.phi)
    return wave_update(state.phi, state.phi_prev, source, grid)


def grid_snapshot(state: GridState1D, grid: Grid1D, cfg: SimConfig, phi_next: np.ndarray,
                  with_Phi: bool = True) -> Snapshot:
    arrays = {
        "f": state.f.copy(),
        "phi": state.phi.copy(),
        "phi_t": (phi_next - state.phi_prev) / (2 * grid.dt),
    }
    if with_Phi:
        for a in range(N_MODIFIED_1D):
            arrays[f"Phi{a}"] = state.Phi[a].copy()
    meta = {
        "nx": str(cfg.nx), "nv": str(cfg.nv), "x_max": repr(cfg.x_max), "v_max": repr(cfg.v_max),
        "step": str(state.step), "dt": repr(grid.dt), "t0": repr(cfg.t0), "coupling": cfg.coupling,
        "n_particles": "0",
    }
    return Snapshot(mode="grid1d", time=state.t, seed=cfg.seed, arrays=arrays, meta=meta)


def run_grid1d(cfg: SimConfig, sink, with_Phi: bool = True) -> GridState1D:
    """Evolve to t_final, handing a snapshot to ``sink`` every ``snapshot_every`` steps and at the end."""
    grid, state = init_grid1d(cfg)
    n_steps = cfg.n_steps
    while True:
        phi_next = next_phi(state, grid, cfg)
        if state.step % cfg.snapshot_every == 0 or state.step == n_steps:
            sink(grid_snapshot(state, grid, cfg, phi_next, with_Phi))
        if state.step == n_steps:
            return state
        step_grid1d(state, grid, cfg, phi_next)
