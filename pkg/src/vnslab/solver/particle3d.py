"""Particle (characteristics) solver in three dimensions.

Each particle follows a characteristic of T_phi and carries

    dx/dt = v / v0,
    dv/dt = -(T(phi) v + grad phi) / v0,
    d ln F / dt = 4 T(phi) / v0,      (value of f)
    d ln w / dt = -3 T(phi) / v0,     (phase-space volume, from div of the flow)
    d Phi_a^i / dt = h_a^i / v0,      (only in the future of H_1)

with T(phi) = v0 phi_t + v . grad phi.  The wave is a 7-point leapfrog
scheme on a node grid with a quadratic sponge ``sponge_width`` cells
wide at the box faces.  The source int f dv / v0 is deposited with
cloud-in-cell weights.

A step from t^n deposits rho^n, advances the wave to phi^{n+1} and then
pushes the particles with RK4, using fields interpolated quadratically in
time through phi^{n-1}, phi^n, phi^{n+1}.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm, qmc

from ..fields import N_MODIFIED
from ..jets import Jet
from .common import check_finite, sponge_profile
from .config import SimConfig
from .crossings import CrossingTally
from .phi_source import phi_sources
from .snapshot import PARTICLE_COMPONENTS, Snapshot

CHUNK = 65_536  # particles per work item; fixes the deposition summation order
GATHER_MARGIN = 2  # cells kept between live particles and the sponge


# -- wave grid -------------------------------------------------------------------

@dataclass
class WaveGrid3D:
    half_width: float
    n_cells: int
    dt: float
    sponge_cells: int
    phi: np.ndarray
    phi_prev: np.ndarray
    sigma: np.ndarray

    @property
    def dx(self) -> float:
        return 2 * self.half_width / self.n_cells

    @property
    def nodes(self) -> np.ndarray:
        return -self.half_width + self.dx * np.arange(self.n_cells + 1)

    @property
    def interior(self) -> float:
        """Particles beyond this coordinate are frozen."""
        return self.half_width - (self.sponge_cells + GATHER_MARGIN) * self.dx

    @classmethod
    def empty(cls, cfg: SimConfig) -> "WaveGrid3D":
        n = cfg.nx + 1
        x = -cfg.x_max + cfg.dx * np.arange(n)
        s1 = sponge_profile(x, cfg.x_max - cfg.sponge_width * cfg.dx, cfg.x_max, cfg.sponge_strength)
        sigma = np.maximum(np.maximum(s1[:, None, None], s1[None, :, None]), s1[None, None, :])
        zeros = np.zeros((n, n, n))
        return cls(cfg.x_max, cfg.nx, cfg.dt, cfg.sponge_width, zeros, zeros.copy(), sigma)


def laplacian3d(phi: np.ndarray, dx: float) -> np.ndarray:
    lap = np.zeros_like(phi)
    c = phi[1:-1, 1:-1, 1:-1]
    lap[1:-1, 1:-1, 1:-1] = (
        phi[2:, 1:-1, 1:-1] + phi[:-2, 1:-1, 1:-1]
        + phi[1:-1, 2:, 1:-1] + phi[1:-1, :-2, 1:-1]
        + phi[1:-1, 1:-1, 2:] + phi[1:-1, 1:-1, :-2]
        - 6 * c
    ) / dx**2
    return lap


def wave_update3d(wave: WaveGrid3D, source: np.ndarray) -> np.ndarray:
    damp = 0.5 * wave.sigma * wave.dt
    new = (2 * wave.phi - (1 - damp) * wave.phi_prev
           + wave.dt**2 * (laplacian3d(wave.phi, wave.dx) - source)) / (1 + damp)
    for ax in range(3):
        sl = [slice(None)] * 3
        sl[ax] = [0, -1]
        new[tuple(sl)] = 0.0
    return new


def discrete_wave_energy(wave: WaveGrid3D) -> float:
    """Conserved leapfrog energy of the free scheme between levels n-1 and n."""
    dt, dx = wave.dt, wave.dx
    a, b = wave.phi, wave.phi_prev
    kinetic = np.sum(((a - b) / dt) ** 2)
    grad = sum(np.sum(np.diff(a, axis=k) * np.diff(b, axis=k)) for k in range(3)) / dx**2
    return 0.5 * dx**3 * (kinetic + grad)


# -- particles -------------------------------------------------------------------

@dataclass
class ParticleEnsemble:
    t: float
    x: np.ndarray  # (N, 3)
    v: np.ndarray  # (N, 3)
    w: np.ndarray  # (N,)
    F: np.ndarray  # (N,)
    Phi: np.ndarray  # (N, 8, 3)
    frozen: np.ndarray = field(default=None)  # (N,) bool

    def __post_init__(self):
        if self.frozen is None:
            self.frozen = np.zeros(self.w.size, dtype=bool)

    @property
    def size(self) -> int:
        return self.w.size

    @property
    def v0(self) -> np.ndarray:
        return np.sqrt(1 + np.einsum("ni,ni->n", self.v, self.v))

    @property
    def frozen_fraction(self) -> float:
        return float(np.mean(self.frozen)) if self.size else 0.0

    def mass(self) -> float:
        return float(np.sum(self.w * self.F))

    def components(self) -> dict[str, np.ndarray]:
        cols = [self.x[:, 0], self.x[:, 1], self.x[:, 2], self.v[:, 0], self.v[:, 1], self.v[:, 2], self.w, self.F]
        cols += [self.Phi[:, a, i] for a in range(N_MODIFIED) for i in range(3)]
        return dict(zip(PARTICLE_COMPONENTS, cols))


def gaussian_mass(cfg: SimConfig) -> float:
    """Closed-form int f0 dx dv of the 3D gaussian data."""
    return cfg.epsilon * (2 * np.pi) ** 3 * cfg.f_width_x**3 * cfg.f_width_v**3


def seed_particles(cfg: SimConfig) -> ParticleEnsemble:
    """Equal-mass particles sampling f0; w is the phase-space volume each one represents."""
    n = cfg.n_particles
    if cfg.seeding in ("halton", "sobol"):
        if cfg.seeding == "halton":
            u = qmc.Halton(d=6, scramble=True, seed=cfg.seed).random(n)
        else:
            with warnings.catch_warnings():  # balance is best at powers of two, but any n is valid
                warnings.simplefilter("ignore", UserWarning)
                u = qmc.Sobol(d=6, scramble=True, seed=cfg.seed).random(n)
        z = norm.ppf(np.clip(u, 1e-15, 1 - 1e-15))
    else:
        z = np.random.default_rng(cfg.seed).standard_normal((n, 6))
    x = cfg.f_center_x + cfg.f_width_x * z[:, :3]
    v = cfg.f_center_v + cfg.f_width_v * z[:, 3:]
    q2 = np.einsum("ni,ni->n", z, z)
    # sampling density g = exp(-q2/2) / ((2 pi)^3 sx^3 sv^3), so w = 1 / (n g)
    w = (2 * np.pi) ** 3 * cfg.f_width_x**3 * cfg.f_width_v**3 * np.exp(0.5 * q2) / n
    F = cfg.epsilon * np.exp(-0.5 * q2)
    return ParticleEnsemble(cfg.t0, x, v, w, F, np.zeros((n, N_MODIFIED, 3)))


def _chunks(n: int):
    return [slice(a, min(n, a + CHUNK)) for a in range(0, n, CHUNK)]


def _cic(x: np.ndarray, wave: WaveGrid3D):
    """Base node indices and the 8 trilinear corner weights, (m, 3) and (8, m)."""
    pos = (x + wave.half_width) / wave.dx
    base = np.floor(pos).astype(np.intp)
    s = pos - base
    weights = []
    for cx in (0, 1):
        for cy in (0, 1):
            for cz in (0, 1):
                weights.append((s[:, 0] if cx else 1 - s[:, 0]) * (s[:, 1] if cy else 1 - s[:, 1])
                               * (s[:, 2] if cz else 1 - s[:, 2]))
    return base, np.array(weights)


_CORNERS = [(cx, cy, cz) for cx in (0, 1) for cy in (0, 1) for cz in (0, 1)]


def _flat(base, corner, n_nodes):
    return ((base[:, 0] + corner[0]) * n_nodes + base[:, 1] + corner[1]) * n_nodes + base[:, 2] + corner[2]


def deposit(ens: ParticleEnsemble, wave: WaveGrid3D, workers: int = 1) -> np.ndarray:
    """int f dv / v0 on the wave nodes; frozen particles do not contribute."""
    n_nodes = wave.n_cells + 1
    size = n_nodes**3

    def one(sl):
        live = ~ens.frozen[sl]
        x = ens.x[sl][live]
        v = ens.v[sl][live]
        charge = ens.w[sl][live] * ens.F[sl][live] / np.sqrt(1 + np.einsum("ni,ni->n", v, v))
        base, wts = _cic(x, wave)
        acc = np.zeros(size)
        for c, wt in zip(_CORNERS, wts):
            acc += np.bincount(_flat(base, c, n_nodes), weights=charge * wt, minlength=size)
        return acc

    parts = _map(one, _chunks(ens.size), workers)
    total = np.zeros(size)
    for p in parts:  # merge in chunk order
        total += p
    return total.reshape((n_nodes,) * 3) / wave.dx**3


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# -- fields along the push -------------------------------------------------------

@dataclass
class FieldLevel:
    """phi and its spatial derivatives on the grid at one time level."""

    phi: np.ndarray
    grad: list  # 3 arrays
    hess: dict  # (i, j) with i <= j -> array

    @classmethod
    def of(cls, phi: np.ndarray, dx: float, second: bool) -> "FieldLevel":
        grad = [np.gradient(phi, dx, axis=k) for k in range(3)]
        hess = {}
        if second:
            for i in range(3):
                for j in range(i, 3):
                    hess[(i, j)] = (np.diff(phi, 2, axis=i, prepend=0, append=0) / dx**2 if i == j
                                    else np.gradient(grad[i], dx, axis=j))
        return cls(phi, grad, hess)


def _lagrange3(tau: float, dt: float):
    """Quadratic Lagrange weights through tau = -1, 0, 1 and their first and second t-derivatives."""
    l0 = (tau * (tau - 1) / 2, 1 - tau**2, tau * (tau + 1) / 2)
    l1 = ((2 * tau - 1) / (2 * dt), -2 * tau / dt, (2 * tau + 1) / (2 * dt))
    l2 = (1 / dt**2, -2 / dt**2, 1 / dt**2)
    return l0, l1, l2


def _combine(levels, coeffs, get):
    return sum(c * get(lv) for c, lv in zip(coeffs, levels))


class StageFields:
    """Spacetime derivatives of phi at one intermediate time, as grid arrays."""

    def __init__(self, levels, tau: float, dt: float, second: bool):
        l0, l1, l2 = _lagrange3(tau, dt)
        arrays = [_combine(levels, l1, lambda lv: lv.phi)]
        arrays += [_combine(levels, l0, lambda lv, k=k: lv.grad[k]) for k in range(3)]
        if second:
            arrays.append(_combine(levels, l0, lambda lv: lv.phi))
            arrays.append(_combine(levels, l2, lambda lv: lv.phi))
            arrays += [_combine(levels, l1, lambda lv, k=k: lv.grad[k]) for k in range(3)]
            arrays += [_combine(levels, l0, lambda lv, ij=ij: lv.hess[ij]) for ij in sorted(levels[0].hess)]
        self.stack = np.stack([a.ravel() for a in arrays])
        self.second = second

    def gather(self, x: np.ndarray, wave: WaveGrid3D) -> np.ndarray:
        base, wts = _cic(x, wave)
        n_nodes = wave.n_cells + 1
        out = np.zeros((self.stack.shape[0], x.shape[0]))
        for c, wt in zip(_CORNERS, wts):
            out += self.stack[:, _flat(base, c, n_nodes)] * wt
        return out


def _spacetime_jet(vals: np.ndarray) -> Jet:
    """Order-2 jet in (t, x1, x2, x3) from gathered rows."""
    m = vals.shape[1]
    grad = np.stack([vals[0], vals[1], vals[2], vals[3]], axis=1)
    hess = np.empty((m, 4, 4))
    hess[:, 0, 0] = vals[5]
    for k in range(3):
        hess[:, 0, k + 1] = hess[:, k + 1, 0] = vals[6 + k]
    for row, (i, j) in enumerate(sorted((i, j) for i in range(3) for j in range(i, 3))):
        hess[:, i + 1, j + 1] = hess[:, j + 1, i + 1] = vals[9 + row]
    return Jet([vals[4], grad, hess])


def particle_rhs(t, x, v, vals, with_Phi: bool, h_on: bool = True):
    """Time derivatives of (x, v, ln F, ln w, Phi) given gathered field rows."""
    v0 = np.sqrt(1 + np.einsum("ni,ni->n", v, v))
    phi_t, grad = vals[0], vals[1:4].T
    tphi = v0 * phi_t + np.einsum("ni,ni->n", v, grad)
    dx = v / v0[:, None]
    dv = -(tphi[:, None] * v + grad) / v0[:, None]
    dlnF = 4 * tphi / v0
    dlnw = -3 * tphi / v0
    dPhi = None
    if with_Phi:
        tt = np.full(v0.shape, t)
        inside = (t**2 - np.einsum("ni,ni->n", x, x)) >= 1.0
        dPhi = np.zeros((v0.size, N_MODIFIED, 3))
        if h_on and np.any(inside):
            jet = _spacetime_jet(vals[:, inside])
            dPhi[inside] = phi_sources(jet, tt[inside], x[inside], v[inside]) / v0[inside, None, None]
    return dx, dv, dlnF, dlnw, dPhi


def push(ens: ParticleEnsemble, wave: WaveGrid3D, levels, dt: float, with_Phi: bool, workers: int = 1) -> None:
    """RK4 step of every live particle from ens.t to ens.t + dt, in place."""
    stages = {tau: StageFields(levels, tau, dt, with_Phi) for tau in (0.0, 0.5, 1.0)}
    t0 = ens.t

    def one(sl):
        live = ~ens.frozen[sl]
        x, v = ens.x[sl][live], ens.v[sl][live]
        lnF, lnw = np.log(ens.F[sl][live] + 0.0), np.log(ens.w[sl][live])
        Phi = ens.Phi[sl][live]

        def rhs(tau, x_, v_):
            check_finite(t0 + tau * dt, x=x_, v=v_)  # before the positions become grid indices
            vals = stages[tau].gather(x_, wave)
            return particle_rhs(t0 + tau * dt, x_, v_, vals, with_Phi)

        k = []
        xs, vs = x, v
        for tau, frac in ((0.0, 0.0), (0.5, 0.5), (0.5, 0.5), (1.0, 1.0)):
            if k:
                xs = x + frac * dt * k[-1][0]
                vs = v + frac * dt * k[-1][1]
            k.append(rhs(tau, xs, vs))
        coef = (1 / 6, 1 / 3, 1 / 3, 1 / 6)
        x_new = x + dt * sum(c * kk[0] for c, kk in zip(coef, k))
        v_new = v + dt * sum(c * kk[1] for c, kk in zip(coef, k))
        lnF_new = lnF + dt * sum(c * kk[2] for c, kk in zip(coef, k))
        lnw_new = lnw + dt * sum(c * kk[3] for c, kk in zip(coef, k))
        Phi_new = Phi + dt * sum(c * kk[4] for c, kk in zip(coef, k)) if with_Phi else Phi
        return sl, live, x_new, v_new, np.exp(lnF_new), np.exp(lnw_new), Phi_new

    with np.errstate(divide="ignore"):
        results = _map(one, _chunks(ens.size), workers)
    for sl, live, x_new, v_new, F_new, w_new, Phi_new in results:
        idx = np.arange(sl.start, sl.stop)[live]
        ens.x[idx], ens.v[idx], ens.F[idx], ens.w[idx], ens.Phi[idx] = x_new, v_new, F_new, w_new, Phi_new
    ens.t = t0 + dt
    # freeze particles that reached the sponge; they keep their last state
    ens.frozen |= np.any(np.abs(ens.x) > wave.interior, axis=1)


# -- driver ----------------------------------------------------------------------

def init_particle3d(cfg: SimConfig) -> tuple[ParticleEnsemble, WaveGrid3D]:
    wave = WaveGrid3D.empty(cfg)
    ens = seed_particles(cfg)
    if cfg.coupling == "free_wave":
        ens.F[:] = 0.0
    ens.frozen |= np.any(np.abs(ens.x) > wave.interior, axis=1)
    if cfg.coupling != "free_transport":
        g = wave.nodes
        r2 = g[:, None, None] ** 2 + g[None, :, None] ** 2 + g[None, None, :] ** 2
        wave.phi = cfg.epsilon * cfg.phi_amplitude * np.exp(-0.5 * r2 / cfg.phi_width**2)
        source = deposit(ens, wave, cfg.workers) if cfg.coupling == "full" else 0.0
        wave.phi_prev = wave.phi + 0.5 * cfg.dt**2 * (laplacian3d(wave.phi, wave.dx) - source)
    return ens, wave


@dataclass
class ParticleRun:
    ensemble: ParticleEnsemble
    wave: WaveGrid3D
    tally: CrossingTally | None
    steps: int


def particle_snapshot(ens: ParticleEnsemble, wave: WaveGrid3D, cfg: SimConfig, phi_next: np.ndarray,
                      source: np.ndarray) -> Snapshot:
    arrays = {
        "phi": wave.phi.copy(),
        "phi_t": (phi_next - wave.phi_prev) / (2 * wave.dt),
        "rho": source.copy(),
    }
    n_stored = ens.size if cfg.store_particles else 0
    if n_stored:
        arrays.update({k: v.copy() for k, v in ens.components().items()})
        arrays["frozen"] = ens.frozen.astype(float)
    meta = {
        "nx": str(cfg.nx), "x_max": repr(cfg.x_max), "sponge_width": str(cfg.sponge_width),
        "epsilon": repr(cfg.epsilon), "phi_amplitude": repr(cfg.phi_amplitude), "phi_width": repr(cfg.phi_width),
        "n_particles": str(n_stored), "dt": repr(wave.dt),
        "t0": repr(cfg.t0), "coupling": cfg.coupling, "frozen_fraction": repr(ens.frozen_fraction),
    }
    return Snapshot(mode="particle3d", time=ens.t, seed=cfg.seed, arrays=arrays, meta=meta)


def step_particle3d(ens: ParticleEnsemble, wave: WaveGrid3D, cfg: SimConfig, levels=None,
                    phi_next: np.ndarray | None = None, source: np.ndarray | None = None):
    """One step; returns the field levels (n, n+1, n+2 shifted) for reuse by the next call."""
    second = cfg.evolve_Phi
    if source is None:
        source = deposit(ens, wave, cfg.workers) if cfg.coupling == "full" else np.zeros_like(wave.phi)
    if phi_next is None:
        phi_next = wave_update3d(wave, source) if cfg.coupling != "free_transport" else np.zeros_like(wave.phi)
    if levels is None:
        levels = [FieldLevel.of(a, wave.dx, second) for a in (wave.phi_prev, wave.phi)]
    levels = list(levels[-2:]) + [FieldLevel.of(phi_next, wave.dx, second)]
    push(ens, wave, levels, wave.dt, cfg.evolve_Phi, cfg.workers)
    wave.phi_prev, wave.phi = wave.phi, phi_next
    check_finite(ens.t, x=ens.x, v=ens.v, F=ens.F, w=ens.w, phi=wave.phi)
    return levels[1:]


def run_particle3d(cfg: SimConfig, sink, rho_list=(), progress=None) -> ParticleRun:
    """Evolve to t_final; snapshots go to ``sink``, hyperboloid crossings to a tally."""
    ens, wave = init_particle3d(cfg)
    tally = CrossingTally(np.asarray(rho_list, dtype=float)) if len(rho_list) else None
    n_steps = cfg.n_steps
    levels = None
    step = 0
    while True:
        source = deposit(ens, wave, cfg.workers) if cfg.coupling == "full" else np.zeros_like(wave.phi)
        phi_next = wave_update3d(wave, source) if cfg.coupling != "free_transport" else np.zeros_like(wave.phi)
        if step % cfg.snapshot_every == 0 or step == n_steps:
            sink(particle_snapshot(ens, wave, cfg, phi_next, source))
        if step == n_steps:
            return ParticleRun(ens, wave, tally, step)
        before = (ens.t, ens.x.copy(), ens.v.copy(), ens.w * ens.F, ens.frozen.copy())
        levels = step_particle3d(ens, wave, cfg, levels, phi_next, source)
        if tally is not None:
            tally.add_step(before, (ens.t, ens.x, ens.v, ens.w * ens.F, ens.frozen))
        step += 1
        ens.t = cfg.step_time(step)
        if progress is not None:
            progress(step, n_steps)
