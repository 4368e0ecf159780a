"""Composite Gauss-Legendre rules, momentum grids and hyperboloid product grids."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import hyperboloid_measure_weight


def gauss_legendre(a: float, b: float, n: int, panels: int = 1):
    """Nodes and weights of an n-point Gauss-Legendre rule on each of ``panels`` equal panels."""
    if n < 1 or panels < 1:
        raise ValueError("need at least one node and one panel")
    x, w = np.polynomial.legendre.leggauss(n)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


@dataclass(frozen=True)
class MomentumGrid:
    nodes: np.ndarray  # (m, 3)
    weights: np.ndarray  # (m,)

    @property
    def v0(self) -> np.ndarray:
        return np.sqrt(1.0 + np.einsum("mi,mi->m", self.nodes, self.nodes))


def momentum_grid(n: int = 64, v_max: float = 8.0, panels: int = 4, refine: bool = False) -> MomentumGrid:
    """Tensor composite Gauss-Legendre grid on the cube [-v_max, v_max]^3.

    ``n`` is the number of nodes per axis; ``refine`` doubles it.
    """
    if refine:
        n *= 2
    if n % panels:
        panels = 1
    x, w = gauss_legendre(-v_max, v_max, n // panels, panels)
    g = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wt = (w[:, None, None] * w[None, :, None] * w[None, None, :]).ravel()
    return MomentumGrid(g, wt)


def sphere_product_grid(n_theta: int, n_phi: int | None = None):
    """Gauss-Legendre in cos(theta) times uniform phi: unit vectors (k, 3) and weights summing to 4 pi."""
    n_phi = 2 * n_theta if n_phi is None else n_phi
    mu, wmu = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * 2 * np.pi / n_phi
    s = np.sqrt(1 - mu**2)
    dirs = np.stack(
        [s[:, None] * np.cos(phi)[None, :], s[:, None] * np.sin(phi)[None, :], np.repeat(mu[:, None], n_phi, 1)],
        axis=-1,
    ).reshape(-1, 3)
    w = (wmu[:, None] * np.full(n_phi, 2 * np.pi / n_phi)[None, :]).ravel()
    return dirs, w


@dataclass(frozen=True)
class HyperboloidGrid:
    """Nodes on H_rho with weights realising the induced measure (rho / t) r^2 dr dsigma."""

    rho: float
    r_max: float
    t: np.ndarray  # (k,)
    x: np.ndarray  # (k, 3)
    weights: np.ndarray  # (k,)
    r: np.ndarray  # (k,)

    @property
    def size(self) -> int:
        return self.t.size


def hyperboloid_grid(rho: float, r_max: float, n_r: int = 16, r_panels: int = 4, n_theta: int = 8,
                     n_phi: int | None = None) -> HyperboloidGrid:
    if rho < 1.0 or r_max <= 0:
        raise ValueError("need rho >= 1 and r_max > 0")
    r, wr = gauss_legendre(0.0, r_max, n_r, r_panels)
    dirs, wa = sphere_product_grid(n_theta, n_phi)
    radial = wr * hyperboloid_measure_weight(rho, r)
    x = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    w = (radial[:, None] * wa[None, :]).ravel()
    rr = np.repeat(r, dirs.shape[0])
    t = np.sqrt(rho**2 + rr**2)
    return HyperboloidGrid(float(rho), float(r_max), t, x, w, rr)


def hyperboloid_shell_grid(rho: float, u_lo: float, u_hi: float, n_u: int = 16, u_panels: int = 3,
                           n_theta: int = 8, n_phi: int | None = None) -> HyperboloidGrid:
    """Nodes on the part of H_rho with u = t - r in [u_lo, u_hi], parametrised by u.

    On H_rho, r = (rho^2 - u^2) / (2u) and t = (rho^2 + u^2) / (2u), so a
    band of constant u-width stays resolved however far out it sits.
    """
    u_hi = min(u_hi, rho)
    if not 0 < u_lo < u_hi:
        raise ValueError("need 0 < u_lo < min(u_hi, rho)")
    u, wu = gauss_legendre(u_lo, u_hi, n_u, u_panels)
    r = (rho**2 - u**2) / (2 * u)
    dr_du = (rho**2 + u**2) / (2 * u**2)
    dirs, wa = sphere_product_grid(n_theta, n_phi)
    radial = wu * dr_du * hyperboloid_measure_weight(rho, r)
    x = (r[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    w = (radial[:, None] * wa[None, :]).ravel()
    rr = np.repeat(r, dirs.shape[0])
    t = np.repeat((rho**2 + u**2) / (2 * u), dirs.shape[0])
    return HyperboloidGrid(float(rho), float(r.max()), t, x, w, rr)
