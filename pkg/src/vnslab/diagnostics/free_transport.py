"""Exact free-transport solutions in 3D and the diagnostics built on them.

With phi = 0 the solution launched at time ``t_data`` from gaussian data is
f(t, x, v) = f0(x - s v / v0, v) with s = t - t_data.  Momentum integrals
are computed in the variable y = x - s v / v0: with beta = (x - y) / s and
v = gamma beta,

    int g(t, x, v) dv = s^-3 int f0-part(y) ... gamma^5 dy,

because d^3v / d^3beta = gamma^5.  Gauss-Hermite nodes in y follow the
spatial gaussian, so the rule stays accurate however narrow f(t, x, .)
becomes at late times.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.optimize import minimize_scalar

from ..fields import Context, N_MODIFIED, ZeroPhi, bold_lift
from ..geometry import complete_homogeneous, weight_values
from ..jets import Jet, PHASE_VARS
from ..quadrature import hyperboloid_grid
from .fits import DecayFit, fit_decay


@dataclass(frozen=True)
class FreeGaussian:
    epsilon: float = 1.0
    sigma_x: float = 0.5
    sigma_v: float = 0.5
    t_data: float = 0.0

    # -- pointwise ------------------------------------------------------------
    def value(self, t, x, v) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        v0 = np.sqrt(1 + np.sum(v**2, axis=-1))
        y = x - (t - self.t_data)[..., None] * v / v0[..., None]
        q = np.sum(y**2, axis=-1) / self.sigma_x**2 + np.sum(v**2, axis=-1) / self.sigma_v**2
        return self.epsilon * np.exp(-0.5 * q)

    def jet(self, points: np.ndarray, order: int) -> Jet:
        """Phase-space jet of f at (n, 7) points, exact to ``order``."""
        p = np.atleast_2d(points)
        var = [Jet.variable(p[:, k], k, PHASE_VARS, order) for k in range(PHASE_VARS)]
        t, x, v = var[0], var[1:4], var[4:7]
        v0 = (1.0 + v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
        s = t - self.t_data
        q = None
        for i in range(3):
            y = x[i] - s * v[i] / v0
            term = y * y * (1 / self.sigma_x**2) + v[i] * v[i] * (1 / self.sigma_v**2)
            q = term if q is None else q + term
        return (q * -0.5).exp() * self.epsilon

    # -- momentum integrals ---------------------------------------------------
    def momentum_nodes(self, t, x: np.ndarray, n_y: int = 12):
        """Momentum nodes realising int f(t, x, v) g(v) dv = sum_m w g(v_m).

        ``t`` is a scalar or one time per spatial point of ``x`` (k, 3).  Returns
        v (k, m, 3), the f-weighted weights w (k, m) and f at the nodes (k, m),
        where m = n_y^3.  Nodes that would need |beta| >= 1 get zero weight.
        """
        x = np.atleast_2d(x)
        s = np.broadcast_to(np.asarray(t, dtype=float) - self.t_data, x.shape[:1])
        if np.any(s <= 0):
            raise ValueError("momentum nodes need t > t_data")
        xi, wi = np.polynomial.hermite_e.hermegauss(n_y)
        y = np.array(list(product(xi, repeat=3))) * self.sigma_x  # (m, 3)
        # int exp(-|y|^2 / 2 sx^2) g(y) dy = sum wy g(y_m)
        wy = np.prod(np.array(list(product(wi, repeat=3))), axis=1) * self.sigma_x**3
        beta = (x[:, None, :] - y[None, :, :]) / s[:, None, None]
        b2 = np.sum(beta**2, axis=-1)
        ok = b2 < 1.0
        gamma = 1.0 / np.sqrt(np.where(ok, 1.0 - b2, 1.0))
        v = gamma[..., None] * beta
        f_v = self.epsilon * np.exp(-0.5 * np.sum(v**2, axis=-1) / self.sigma_v**2)
        f_y = np.exp(-0.5 * np.sum(y**2, axis=-1) / self.sigma_x**2)[None, :]
        w = np.where(ok, wy[None, :] * gamma**5 / s[:, None] ** 3 * f_v, 0.0)
        return v, w, np.where(ok, f_y * f_v, 0.0)

    def velocity_moment(self, t, x: np.ndarray, weight=None, n_y: int = 12) -> np.ndarray:
        """int f(t, x, v) weight(v) dv at each point of x (k, 3)."""
        v, w, _ = self.momentum_nodes(t, x, n_y)
        if weight is None:
            return w.sum(axis=1)
        return np.sum(w * weight(v), axis=1)

    def mass(self) -> float:
        return self.epsilon * (2 * np.pi) ** 3 * self.sigma_x**3 * self.sigma_v**3


# -- sup_x int f dv and its decay ------------------------------------------------

def sup_velocity_density(sol: FreeGaussian, t: float, n_y: int = 12, r_grid: int = 24) -> tuple[float, float]:
    """(sup over x of int f dv, radius of the maximiser); the data are radial so x = r e_1."""

    def density(r):
        return float(sol.velocity_moment(t, np.array([[r, 0.0, 0.0]]), n_y=n_y)[0])

    s = t - sol.t_data
    radii = np.linspace(0.0, 0.95 * s, r_grid)
    vals = np.array([density(r) for r in radii])
    k = int(np.argmax(vals))
    lo, hi = radii[max(k - 1, 0)], radii[min(k + 1, r_grid - 1)]
    if hi > lo:
        res = minimize_scalar(lambda r: -density(r), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-10 * max(1.0, s)})
        if -res.fun > vals[k]:
            return float(-res.fun), float(res.x)
    return float(vals[k]), float(radii[k])


def free_transport_decay(sol: FreeGaussian | None = None, t_window=(5.0, 40.0), n_times: int = 16,
                         n_y: int = 12) -> tuple[DecayFit, np.ndarray, np.ndarray]:
    """Fit the decay exponent of sup_x int f dv over the time window."""
    sol = FreeGaussian() if sol is None else sol
    times = np.geomspace(*t_window, n_times)
    sup = np.array([sup_velocity_density(sol, t, n_y)[0] for t in times])
    return fit_decay(times, sup), times, sup


# -- L^2 diagnostic ----------------------------------------------------------------

def l2_free(sol: FreeGaussian, rho: float, r1: float = 0.0, r_max: float | None = None, n_r: int = 12,
            r_panels: int = 4, n_theta: int = 6, n_y: int = 10, chunk: int = 64) -> float:
    """int_{H_rho} (t / rho) (int |z / sqrt t|^r1 f dv / v0)^2 dmu for the free solution.

    |z| is the Euclidean norm of the six weights.
    """
    if r_max is None:
        r_max = _support_radius(sol, rho)
    grid = hyperboloid_grid(rho, r_max, n_r, r_panels, n_theta)
    moment = np.empty(grid.size)
    for k0 in range(0, grid.size, chunk):
        sl = slice(k0, k0 + chunk)
        t, x = grid.t[sl], grid.x[sl]
        v, w, _ = sol.momentum_nodes(t, x, n_y)
        k, m, _ = v.shape
        vv = v.reshape(-1, 3)
        tt = np.repeat(t, m)
        g = 1 / np.sqrt(1 + np.sum(vv**2, axis=1))
        if r1:
            z = np.linalg.norm(weight_values(tt, np.repeat(x, m, axis=0), vv).all_z(), axis=1)
            g = g * (z / np.sqrt(tt)) ** r1
        moment[sl] = np.sum(w * g.reshape(k, m), axis=1)
    return float(np.sum(grid.weights * grid.t / rho * moment**2))


def _support_radius(sol: FreeGaussian, rho: float) -> float:
    """Radius on H_rho beyond which f is below e^-18 of its peak (a 6-sigma cut)."""
    reach = 6 * sol.sigma_v / np.sqrt(1 + 36 * sol.sigma_v**2)  # speed of a 6-sigma particle
    # on H_rho a particle from the origin with speed c sits at r with r / t = c
    r_far = rho * reach / np.sqrt(1 - reach**2)
    return float(r_far + 6 * sol.sigma_x)


# -- modified Klainerman-Sobolev check -----------------------------------------------

@dataclass(frozen=True)
class KSReport:
    times: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(self.rhs > 0, self.lhs / self.rhs, 0.0)

    @property
    def constant(self) -> float:
        return float(np.max(self.ratio))

    @property
    def spread(self) -> float:
        """(max - min) / (max + min) of the ratio: the +-variation around the midpoint."""
        r = self.ratio
        return float((r.max() - r.min()) / (r.max() + r.min())) if r.max() > 0 else 0.0


KS_ORDER = 3


def ks_weight(t, x, v) -> np.ndarray:
    """Sum over |beta| <= 3 of |z / (v0 sqrt t)|^beta over the six weights."""
    v0 = np.sqrt(1 + np.sum(v**2, axis=1))
    z = np.abs(weight_values(t, x, v).all_z()) / (v0 * np.sqrt(t))[:, None]
    return sum(complete_homogeneous(z, d) for d in range(KS_ORDER + 1))


def _modified_words_sum(jet: Jet, ctx: Context) -> np.ndarray:
    """Sum over words |alpha| <= 3 in the modified fields of |Y^alpha f| (phi = 0, Phi = 0)."""
    ops = [bold_lift(a) for a in range(N_MODIFIED)]
    total = np.abs(jet.val).copy()
    level = [jet]
    for _ in range(KS_ORDER):
        nxt = []
        for g in level:
            for op in ops:
                h = op.apply(g, ctx)
                total += np.abs(h.val)
                if h.order > 0:
                    nxt.append(h)
        level = nxt
    return total


def ks_rhs(sol: FreeGaussian, rho: float, n_r: int = 8, r_panels: int = 2, n_theta: int = 4, n_y: int = 6,
           chunk: int = 4096) -> float:
    """sum_{|alpha| <= 3} int_{H_rho} chi(W |Y^alpha f|) dmu for the free solution."""
    grid = hyperboloid_grid(rho, _support_radius(sol, rho), n_r, r_panels, n_theta)
    v, w, fv = sol.momentum_nodes(grid.t, grid.x, n_y)
    m = v.shape[1]
    keep = (w > 0).ravel()
    # |Y^alpha f| = f |polynomial|, so dividing the f-weighted weights by f leaves dv
    dv = (w / np.where(fv > 0, fv, 1.0)).ravel()[keep]
    outer = np.repeat(grid.weights, m)[keep]
    t = np.repeat(grid.t, m)[keep]
    x = np.repeat(grid.x, m, axis=0)[keep]
    v = v.reshape(-1, 3)[keep]
    total = 0.0
    for c0 in range(0, t.size, chunk):
        sl = slice(c0, c0 + chunk)
        pts = np.concatenate([t[sl, None], x[sl], v[sl]], axis=1)
        words = _modified_words_sum(sol.jet(pts, KS_ORDER), Context(pts, phi=None, Phi=ZeroPhi()))
        v0 = np.sqrt(1 + np.sum(v[sl] ** 2, axis=1))
        vrho = (t[sl] * v0 - np.einsum("ni,ni->n", v[sl], x[sl])) / rho
        total += float(np.sum(outer[sl] * dv[sl] * ks_weight(t[sl], x[sl], v[sl]) * words * vrho))
    return total


def ks_modified_check(sol: FreeGaussian | None = None, times=(5.0, 10.0, 20.0, 40.0), **quad) -> KSReport:
    """LHS t^3 int |f| dv / v0 at x = 0 against the weighted RHS on H_t, for each t."""
    sol = FreeGaussian() if sol is None else sol
    lhs, rhs = [], []
    for t in times:
        lhs.append(t**3 * float(sol.velocity_moment(t, np.zeros((1, 3)),
                                                    weight=lambda v: 1 / np.sqrt(1 + np.sum(v**2, -1)))[0]))
        rhs.append(ks_rhs(sol, float(t), **quad) if sol.epsilon != 0 else 0.0)
    return KSReport(np.asarray(times, dtype=float), np.array(lhs), np.array(rhs))
