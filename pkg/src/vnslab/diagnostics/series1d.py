"""Hyperboloidal diagnostics for a stored 1D grid run.

The hyperboloid H_rho of the line is {t = sqrt(rho^2 + x^2)} with induced
measure (rho / t) dx.  Values at a node (t_k, x_k) come from the two
snapshots bracketing t_k.  Each snapshot is first moved along free
characteristics, f_s(x - (v / v0)(t_k - t_s), v), and the two results are
blended linearly in t.  Free streaming is therefore reproduced exactly and
only the φ-driven part of the evolution sees the O(dt^2) blending error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.ndimage import map_coordinates

from ..quadrature import gauss_legendre
from ..solver.snapshot import Snapshot


class HorizonError(ValueError):
    """Requested hyperboloid reaches outside the stored time range."""


@dataclass
class GridSeries1D:
    times: np.ndarray
    x: np.ndarray
    v: np.ndarray
    snapshots: list[Snapshot]

    @classmethod
    def from_snapshots(cls, snaps: Sequence[Snapshot]) -> "GridSeries1D":
        if not snaps:
            raise ValueError("empty snapshot series")
        snaps = sorted(snaps, key=lambda s: s.time)
        first = snaps[0]
        if first.mode != "grid1d":
            raise ValueError(f"expected grid1d snapshots, got {first.mode!r}")
        nx, nv = int(first.meta["nx"]), int(first.meta["nv"])
        x_max, v_max = float(first.meta["x_max"]), float(first.meta["v_max"])
        x = np.linspace(-x_max, x_max, nx + 1)
        v = np.linspace(-v_max, v_max, nv + 1)
        return cls(np.array([s.time for s in snaps]), x, v, list(snaps))

    @property
    def dx(self) -> float:
        return self.x[1] - self.x[0]

    @property
    def dv(self) -> float:
        return self.v[1] - self.v[0]

    @property
    def v0(self) -> np.ndarray:
        return np.sqrt(1 + self.v**2)

    @property
    def v_weights(self) -> np.ndarray:
        w = np.full(self.v.size, self.dv)
        w[[0, -1]] *= 0.5
        return w

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def horizon(self, rho: float) -> float:
        """Largest |x| with the node of H_rho still inside the stored times."""
        if rho < self.times[0] or rho > self.t_max:
            raise HorizonError(f"rho={rho} outside stored times [{self.times[0]}, {self.t_max}]")
        return float(np.sqrt(self.t_max**2 - rho**2))

    def _bracket(self, t: np.ndarray):
        if np.any(t < self.times[0] - 1e-12) or np.any(t > self.t_max + 1e-12):
            raise HorizonError("node time outside stored snapshot range")
        idx = np.clip(np.searchsorted(self.times, t, side="right") - 1, 0, len(self.times) - 2)
        return idx

    def _row_coords(self, x):
        return (np.asarray(x) - self.x[0]) / self.dx

    def phase_array(self, name: str, t, x, drift: bool = True, arrays=None) -> np.ndarray:
        """Snapshot array ``name`` (an (x, v) field) at nodes (t_k, x_k) -> (k, nv+1).

        ``arrays(s)`` may supply a mapping of derived arrays for snapshot s.
        """
        get = (lambda s: self.snapshots[s]) if arrays is None else arrays
        t, x = np.atleast_1d(t).astype(float), np.atleast_1d(x).astype(float)
        idx = self._bracket(t)
        speed = self.v / self.v0
        kk = np.broadcast_to(np.arange(self.v.size, dtype=float), (t.size, self.v.size))
        out = np.empty((t.size, self.v.size))
        for s in np.unique(idx):
            sel = idx == s
            ta, tb = self.times[s], self.times[s + 1]
            lam = ((t[sel] - ta) / (tb - ta))[:, None]
            vals = []
            for ts, snap in ((ta, get(s)), (tb, get(s + 1))):
                shift = speed[None, :] * (t[sel] - ts)[:, None] if drift else 0.0
                xi = self._row_coords(x[sel][:, None] - shift)
                vals.append(map_coordinates(snap[name], [xi, kk[sel]], order=3, mode="grid-constant"))
            out[sel] = (1 - lam) * vals[0] + lam * vals[1]
        return out

    def line_array(self, name: str, t, x) -> np.ndarray:
        """Snapshot array ``name`` on the x-line at nodes (t_k, x_k) -> (k,)."""
        t, x = np.atleast_1d(t).astype(float), np.atleast_1d(x).astype(float)
        idx = self._bracket(t)
        out = np.empty(t.size)
        for s in np.unique(idx):
            sel = idx == s
            ta, tb = self.times[s], self.times[s + 1]
            lam = (t[sel] - ta) / (tb - ta)
            xi = self._row_coords(x[sel])
            a = map_coordinates(self.snapshots[s][name], [xi], order=3, mode="grid-constant")
            b = map_coordinates(self.snapshots[s + 1][name], [xi], order=3, mode="grid-constant")
            out[sel] = (1 - lam) * a + lam * b
        return out


@dataclass(frozen=True)
class HyperboloidLine:
    rho: float
    x: np.ndarray
    t: np.ndarray
    weights: np.ndarray  # realise (rho / t) dx
    x_max: float


def hyperboloid_line(rho: float, x_max: float, n: int = 32, panels: int = 8) -> HyperboloidLine:
    x, w = gauss_legendre(-x_max, x_max, n, panels)
    t = np.sqrt(rho**2 + x**2)
    return HyperboloidLine(float(rho), x, t, w * rho / t, float(x_max))


def chi_1d(values: np.ndarray, series: GridSeries1D, line: HyperboloidLine) -> np.ndarray:
    """int g v^rho dv at each node, with v^rho = (t v0 - x v) / rho."""
    vr = (line.t[:, None] * series.v0[None, :] - line.x[:, None] * series.v[None, :]) / line.rho
    return (values * vr) @ series.v_weights


def chi_integral_1d(series: GridSeries1D, rho: float, x_max: float | None = None, n: int = 32,
                    panels: int = 8, name: str = "f") -> float:
    x_max = series.horizon(rho) if x_max is None else x_max
    line = hyperboloid_line(rho, x_max, n, panels)
    f = series.phase_array(name, line.t, line.x)
    return float(line.weights @ chi_1d(f, series, line))


# -- E_0 and E_1 in the analogue --------------------------------------------------

def _weight_hat(t, x, v, v0, rho):
    """The boost weight z = (t v - x v0) / v0 shifted to 1 + z / sqrt(rho)."""
    return 1.0 + (t * v - x * v0) / (v0 * np.sqrt(rho))


def _grad(series: GridSeries1D, snap: Snapshot):
    f = snap["f"]
    return np.gradient(f, series.dx, axis=0, edge_order=2), np.gradient(f, series.dv, axis=1, edge_order=2)


def _operator_arrays(series: GridSeries1D, snap: Snapshot) -> dict[str, np.ndarray]:
    """f, e_0 f, e_1 f, Y_0 f, Y_1 f on the grid of one snapshot.

    e_mu = d_mu - phi_mu v d_v; d_t f is taken from the transport equation;
    Y_0 = t e_0 + x e_1 + Phi_0 X_1 and Y_1 = t e_1 + x e_0 + v0 d_v + Phi_1 X_1
    with X_1 = e_1 + (v / v0) e_0.
    """
    x, v, v0 = series.x[:, None], series.v[None, :], series.v0[None, :]
    t = snap.time
    f = snap["f"]
    phi_t = snap["phi_t"][:, None]
    phi_x = np.gradient(snap["phi"], series.dx, edge_order=2)[:, None]
    fx, fv = _grad(series, snap)
    ft = -(v / v0) * fx + (v * phi_t + v0 * phi_x) * fv + 2 * (phi_t + (v / v0) * phi_x) * f
    e0 = ft - phi_t * v * fv
    e1 = fx - phi_x * v * fv
    X1 = e1 + (v / v0) * e0
    Phi0 = snap.arrays.get("Phi0", np.zeros_like(f))
    Phi1 = snap.arrays.get("Phi1", np.zeros_like(f))
    return {
        "f": f,
        "e0": e0,
        "e1": e1,
        "Y0": t * e0 + x * e1 + Phi0 * X1,
        "Y1": t * e1 + x * e0 + v0 * fv + Phi1 * X1,
    }


# weight powers |C| of E_1 per operator order, and of E_0
_E1_POWERS = {"f": 8, "Y0": 3, "Y1": 3, "e0": 4, "e1": 4}
_E0_POWERS = {"f": 6}


def energy_f_1d(series: GridSeries1D, N: int, rho: float, x_max: float | None = None, n: int = 32,
                panels: int = 8) -> float:
    """E_N[f](rho) for N in {0, 1}: sum over L of int chi(|z^|^C |L f|) dmu."""
    if N not in (0, 1):
        raise ValueError("E_N is implemented for N = 0 and N = 1 only")
    powers = _E0_POWERS if N == 0 else _E1_POWERS
    x_max = series.horizon(rho) if x_max is None else x_max
    line = hyperboloid_line(rho, x_max, n, panels)
    cache: dict[int, dict] = {}

    def ops(s):
        if s not in cache:
            cache[s] = _operator_arrays(series, series.snapshots[s])
        return cache[s]

    zhat = np.abs(_weight_hat(line.t[:, None], line.x[:, None], series.v[None, :], series.v0[None, :], rho))
    total = 0.0
    for name, power in powers.items():
        # every L here commutes with free streaming, so drift-aligned blending applies
        vals = np.abs(series.phase_array(name, line.t, line.x, arrays=ops))
        total += float(line.weights @ chi_1d(zhat**power * vals, series, line))
    return total


# -- energy identity --------------------------------------------------------------

@dataclass(frozen=True)
class EnergyIdentity:
    rho1: float
    rho2: float
    chi1: float
    chi2: float
    source: float
    lateral: float
    x_max: float

    @property
    def lhs(self) -> float:
        return self.chi2 - self.chi1 + self.lateral

    @property
    def residual(self) -> float:
        """|LHS - RHS| relative to the larger side."""
        scale = max(abs(self.lhs), abs(self.source))
        return abs(self.lhs - self.source) / scale if scale > 0 else 0.0


def energy_identity_residual(series: GridSeries1D, rho1: float, rho2: float, n_x: int = 32,
                             x_panels: int = 8, n_s: int = 24, s_panels: int = 4,
                             max_cadence: float | None = None) -> EnergyIdentity:
    """Both sides of the flux identity between H_rho1 and H_rho2.

    int_{H_rho2} chi dmu - int_{H_rho1} chi dmu + lateral = iint phi_t int f dv / v0,

    with all surfaces truncated at |x| <= X for the largest X both
    hyperboloids admit.  ``lateral`` is the flux int J^x dt through x = +-X
    between the two hyperboloids, J^x = int f v dv; it vanishes when f has
    not reached the truncation boundary.
    """
    if not rho1 < rho2:
        raise ValueError("need rho1 < rho2")
    if max_cadence is not None and np.max(np.diff(series.times)) > max_cadence:
        raise ValueError("snapshot cadence too coarse for the energy identity")
    X = series.horizon(rho2)
    chi1 = chi_integral_1d(series, rho1, X, n_x, x_panels)
    chi2 = chi_integral_1d(series, rho2, X, n_x, x_panels)

    # slab in coordinates (s, x): t = sqrt(s^2 + x^2), dt dx = (s / t) ds dx
    s, ws = gauss_legendre(rho1, rho2, n_s, s_panels)
    x, wx = gauss_legendre(-X, X, n_x, x_panels)
    S, Xg = np.meshgrid(s, x, indexing="ij")
    T = np.sqrt(S**2 + Xg**2)
    f = series.phase_array("f", T.ravel(), Xg.ravel())
    density = f @ (series.v_weights / series.v0)
    phi_t = series.line_array("phi_t", T.ravel(), Xg.ravel())
    integrand = (phi_t * density).reshape(S.shape) * S / T
    source = float(ws @ integrand @ wx)

    # lateral flux at x = +-X for t between the two hyperboloids
    t_lo, t_hi = np.sqrt(rho1**2 + X**2), np.sqrt(rho2**2 + X**2)
    tl, wt = gauss_legendre(t_lo, t_hi, n_s, s_panels)
    lateral = 0.0
    for sign in (1.0, -1.0):
        fl = series.phase_array("f", tl, np.full_like(tl, sign * X))
        lateral += sign * float(wt @ (fl @ (series.v_weights * series.v)))
    return EnergyIdentity(rho1, rho2, chi1, chi2, source, lateral, X)


# -- L^2 diagnostic ----------------------------------------------------------------

def l2_1d(series: GridSeries1D, rho: float, order: int = 0, r1: float = 0.0, x_max: float | None = None,
          n: int = 32, panels: int = 8) -> float:
    """sum over |alpha| = order of int_{H_rho} (t / rho)(int |z / sqrt t|^r1 |Y^alpha f| dv / v0)^2 dmu."""
    if order not in (0, 1):
        raise ValueError("the 1D L^2 diagnostic supports order 0 and 1")
    x_max = series.horizon(rho) if x_max is None else x_max
    line = hyperboloid_line(rho, x_max, n, panels)
    cache: dict[int, dict] = {}

    def ops(s):
        if s not in cache:
            cache[s] = _operator_arrays(series, series.snapshots[s])
        return cache[s]

    t, x, v, v0 = line.t[:, None], line.x[:, None], series.v[None, :], series.v0[None, :]
    weight = np.abs((t * v - x * v0) / v0 / np.sqrt(t)) ** r1 / v0
    total = 0.0
    for name in (("f",) if order == 0 else ("Y0", "Y1")):
        vals = np.abs(series.phase_array(name, line.t, line.x, arrays=ops))
        moment = (weight * vals) @ series.v_weights
        total += float(line.weights @ (line.t / rho * moment**2))
    return total
