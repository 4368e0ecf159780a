"""Growth of Phi driven by a manufactured source along free characteristics.

With phi = 0 characteristics are straight lines x(t) = x1 + (v / v0)(t - t1)
and Phi obeys dPhi/dt = h / v0 with Phi = 0 where the line meets H_1.  The
default source saturates the admissible bound

    |h| <= sqrt(eps) / ((1 + u)^(1/2) v0),   u = t - |x|,

so the measured growth is the worst case the bound allows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fits import DecayFit, fit_decay


def saturating_source(eps: float):
    def h(t, x, v):
        u = t - np.linalg.norm(x, axis=-1)
        v0 = np.sqrt(1 + np.sum(v**2, axis=-1))
        return np.sqrt(eps) / (np.sqrt(1 + u) * v0)

    return h


def crossing_times(x1: np.ndarray, v: np.ndarray, t1: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Times (n, k) at which the lines through (t1, x1) with velocity v reach H_rho."""
    c = v / np.sqrt(1 + np.sum(v**2, axis=1))[:, None]
    # t^2 - |y + c t|^2 = rho^2 with y = x1 - c t1, i.e. a t^2 - 2 b t - q = rho^2
    y = x1 - c * t1[:, None]
    a = 1 - np.sum(c**2, axis=1)
    b = np.sum(y * c, axis=1)
    q = np.sum(y**2, axis=1)
    disc = b[:, None] ** 2 + a[:, None] * (q[:, None] + rho[None, :] ** 2)
    return (b[:, None] + np.sqrt(disc)) / a[:, None]


def integrate_phi(x1, v, t1, rho, source, n_gl: int = 8) -> np.ndarray:
    """Phi (n, k) on H_rho[k] for each line, starting from zero on H_1.

    Gauss-Legendre on every interval between consecutive crossing times.
    """
    rho = np.asarray(rho, dtype=float)
    if rho[0] < 1 or np.any(np.diff(rho) <= 0):
        raise ValueError("rho must be increasing and >= 1")
    times = crossing_times(x1, v, t1, np.concatenate([[1.0], rho]))
    nodes, weights = np.polynomial.legendre.leggauss(n_gl)
    v0 = np.sqrt(1 + np.sum(v**2, axis=1))
    c = v / v0[:, None]
    out = np.zeros((x1.shape[0], rho.size))
    acc = np.zeros(x1.shape[0])
    for k in range(rho.size):
        lo, hi = times[:, k], times[:, k + 1]
        half = 0.5 * (hi - lo)
        for s, w in zip(nodes, weights):
            t = 0.5 * (hi + lo) + half * s
            x = x1 + c * (t - t1)[:, None]
            acc = acc + w * half * source(t, x, v) / v0
        out[:, k] = acc
    return out


@dataclass(frozen=True)
class PhiGrowth:
    rho: np.ndarray
    sup_phi: np.ndarray
    eps: float
    fit: DecayFit

    @property
    def bound_constant(self) -> float:
        """Smallest K with sup |Phi| <= K sqrt(eps rho) on the sampled hyperboloids."""
        return float(np.max(self.sup_phi / np.sqrt(self.eps * self.rho)))

    @property
    def tail_slope(self) -> float:
        """Log-log slope between the last two hyperboloids."""
        return float(np.diff(np.log(self.sup_phi[-2:]))[0] / np.diff(np.log(self.rho[-2:]))[0])


def launch_points(kind: str, n: int = 2000, seed: int = 0, sigma_x: float = 0.5, sigma_v: float = 0.5):
    """Initial (x1, v, t1) on H_1 for a rest particle at the origin or a gaussian cloud."""
    if kind == "rest":
        return np.zeros((1, 3)), np.zeros((1, 3)), np.ones(1)
    if kind == "cloud":
        rng = np.random.default_rng(seed)
        x1 = rng.normal(0, sigma_x, (n, 3))
        v = rng.normal(0, sigma_v, (n, 3))
        return x1, v, np.sqrt(1 + np.sum(x1**2, axis=1))
    raise ValueError(f"unknown launch kind {kind!r}")


def phi_growth(eps: float = 1e-2, rho_range=(1.0, 16.0), n_rho: int = 32, launch: str = "rest",
               source=None, **launch_kw) -> PhiGrowth:
    """Fitted growth exponent of sup |Phi| over rho in the range.

    Phi vanishes on H_1 itself, so the fit uses the n_rho hyperboloids
    strictly above the lower end of the range.
    """
    source = saturating_source(eps) if source is None else source
    rho = np.geomspace(*rho_range, n_rho + 1)[1:]
    x1, v, t1 = launch_points(launch, **launch_kw)
    phi = np.abs(integrate_phi(x1, v, t1, rho, source))
    sup = phi.max(axis=0)
    return PhiGrowth(rho, sup, eps, fit_decay(rho, sup))
