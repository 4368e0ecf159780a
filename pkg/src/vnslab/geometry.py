"""Hyperboloidal foliation of the future light cone and kinetic weights.

Points are given as a time array ``t`` of shape (n,), positions ``x`` of
shape (n, 3) and momenta ``v`` of shape (n, 3).  The mass-shell energy
``v0 = sqrt(1 + |v|^2)`` is always recomputed from ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# (i, j) index pairs of the rotation fields x^i d_j - x^j d_i, labels 4, 5, 6
ROTATION_PAIRS = ((0, 1), (0, 2), (1, 2))


class DomainError(ValueError):
    """Raised for points outside the interior of the future light cone."""


def _vec(x) -> np.ndarray:
    return np.atleast_2d(np.asarray(x, dtype=float))


def _scal(t) -> np.ndarray:
    return np.atleast_1d(np.asarray(t, dtype=float))


def v_zero(v) -> np.ndarray:
    v = _vec(v)
    return np.sqrt(1.0 + np.einsum("ni,ni->n", v, v))


def radius(x) -> np.ndarray:
    x = _vec(x)
    return np.sqrt(np.einsum("ni,ni->n", x, x))


def rho_of(t, x) -> np.ndarray:
    """Hyperboloidal time sqrt(t^2 - |x|^2).

    Computed as sqrt((t - r)(t + r)) to avoid cancellation near the cone.
    """
    t = _scal(t)
    r = radius(x)
    if np.any(t <= r):
        raise DomainError("point is not inside the future light cone (t <= |x|)")
    return np.sqrt((t - r) * (t + r))


def v_rho(t, x, v) -> np.ndarray:
    """Normal momentum component (t v0 - v.x) / rho.

    When v.x > 0 the numerator is rewritten as
    (rho^2 v0^2 + r^2 + |v x x|^2) / (t v0 + v.x), a sum of positive terms,
    which keeps the result accurate close to the light cone.
    """
    t, x, v = _scal(t), _vec(x), _vec(v)
    rho = rho_of(t, x)
    v0 = v_zero(v)
    vx = np.einsum("ni,ni->n", v, x)
    r2 = np.einsum("ni,ni->n", x, x)
    cross = np.cross(v, x)
    cross2 = np.einsum("ni,ni->n", cross, cross)
    direct = t * v0 - vx
    stable = (rho**2 * v0**2 + r2 + cross2) / (t * v0 + vx)
    return np.where(vx > 0, stable, direct) / rho


@dataclass(frozen=True)
class FoliationScalars:
    rho: np.ndarray
    u: np.ndarray
    r: np.ndarray
    vrho: np.ndarray


def foliation_scalars(t, x, v) -> FoliationScalars:
    t, x, v = _scal(t), _vec(x), _vec(v)
    r = radius(x)
    return FoliationScalars(rho=rho_of(t, x), u=t - r, r=r, vrho=v_rho(t, x, v))


def vrho_lower_bounds(t, x, v) -> np.ndarray:
    """The three lower bounds 1, u v0 / (2 rho), t / (2 rho v0), stacked as (3, n)."""
    t, x, v = _scal(t), _vec(x), _vec(v)
    rho = rho_of(t, x)
    v0 = v_zero(v)
    u = t - radius(x)
    return np.stack([np.ones_like(t), u * v0 / (2 * rho), t / (2 * rho * v0)])


def hyperboloid_measure_weight(rho, r):
    """Density (rho / t) r^2 of the induced volume form on H_rho in (r, omega)."""
    rho = np.asarray(rho, dtype=float)
    r = np.asarray(r, dtype=float)
    return rho / np.sqrt(rho**2 + r**2) * r**2


def unit_normal(t, x) -> np.ndarray:
    """Future unit normal (t, x) / rho of the hyperboloid through (t, x); shape (n, 4)."""
    t, x = _scal(t), _vec(x)
    rho = rho_of(t, x)
    return np.concatenate([t[:, None], x], axis=1) / rho[:, None]


def minkowski(a, b) -> np.ndarray:
    """eta(a, b) with signature (-, +, +, +)."""
    a, b = _vec(a), _vec(b)
    return -a[:, 0] * b[:, 0] + np.einsum("ni,ni->n", a[:, 1:], b[:, 1:])


@dataclass(frozen=True)
class Weights:
    z_boost: np.ndarray  # (n, 3)
    z_rot: np.ndarray  # (n, 3), pairs in ROTATION_PAIRS order
    z_hat: np.ndarray  # (n, 3)

    def all_z(self) -> np.ndarray:
        """The six weights, boosts first, as (n, 6)."""
        return np.concatenate([self.z_boost, self.z_rot], axis=1)


def weight_values(t, x, v) -> Weights:
    t, x, v = _scal(t), _vec(x), _vec(v)
    v0 = v_zero(v)
    zb = (t[:, None] * v - x * v0[:, None]) / v0[:, None]
    zr = np.stack([(x[:, i] * v[:, j] - x[:, j] * v[:, i]) / v0 for i, j in ROTATION_PAIRS], axis=1)
    rho = rho_of(t, x)
    return Weights(z_boost=zb, z_rot=zr, z_hat=1.0 + zb / np.sqrt(rho)[:, None])


def complete_homogeneous(values, degree: int) -> np.ndarray:
    """Sum over all multi-indices C with |C| = degree of prod values^C, per row of (n, k) values."""
    values = _vec(values)
    n, k = values.shape
    # h_d(a_1..a_k) = sum_j a_k^j h_{d-j}(a_1..a_{k-1})
    h = [np.ones(n)] + [values[:, 0] ** d for d in range(1, degree + 1)]
    for col in range(1, k):
        a = values[:, col]
        h = [sum(a**j * h[d - j] for j in range(d + 1)) for d in range(degree + 1)]
    return h[degree]


def isotropic_directions(rng: np.random.Generator, n: int) -> np.ndarray:
    d = rng.normal(size=(n, 3))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def sample_future_points(rng: np.random.Generator, n: int, rho_range=(1.0, 10.0), delta: float = 1e-3,
                         v_max: float = 50.0):
    """Random phase-space points in {rho in rho_range, u >= delta, |v| <= v_max}.

    rho is uniform, u = t - r is log-uniform in [delta, rho] so both the
    apex region and the neighbourhood of the cone are covered, and |v| is a
    50/50 mixture of uniform-in-ball and log-uniform magnitudes.
    """
    rho = rng.uniform(*rho_range, n)
    u = np.exp(rng.uniform(np.log(delta), np.log(rho)))
    t = 0.5 * (rho**2 / u + u)
    r = 0.5 * (rho**2 / u - u)
    x = isotropic_directions(rng, n) * r[:, None]
    ball = v_max * rng.uniform(0, 1, n) ** (1 / 3)
    logm = np.exp(rng.uniform(np.log(1e-4), np.log(v_max), n))
    speed = np.where(rng.uniform(size=n) < 0.5, ball, logm)
    v = isotropic_directions(rng, n) * speed[:, None]
    return t, x, v


def phase_points(t, x, v) -> np.ndarray:
    """Stack into (n, 7) phase-space coordinates (t, x1..3, v1..3)."""
    return np.concatenate([_scal(t)[:, None], _vec(x), _vec(v)], axis=1)


def split_phase(points: np.ndarray):
    p = _vec(points)
    return p[:, 0], p[:, 1:4], p[:, 4:7]
