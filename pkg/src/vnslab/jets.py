"""Truncated Taylor jets of scalar fields.

A :class:`Jet` stores the value and all partial derivatives up to a fixed
order (at most 3) of a scalar function at a batch of points.  Derivative
tensors are stored densely and symmetrically, so ``d2[:, i, j] ==
d2[:, j, i]`` holds by construction.  Jets support the arithmetic needed to
build operator coefficients (sums, products, quotients, square roots,
exponentials) via the Leibniz and Faa di Bruno rules.

Three ways of producing jets are provided:

* :func:`analytic_jet` evaluates hand-coded derivative formulas for the test
  families described by :class:`TestFieldSpec`;
* :func:`fd_jet` estimates the same derivatives by central differences and
  serves as an independent oracle;
* :func:`grid_jet` differentiates a field stored on a uniform grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

MAX_ORDER = 3

SPACETIME_VARS = 4
PHASE_VARS = 7


class JetOrderError(ValueError):
    """Raised when a jet of insufficient order is used."""


class MarginError(ValueError):
    """Raised when a grid jet is requested too close to the grid boundary."""


def _sym3(a2: np.ndarray, b1: np.ndarray) -> np.ndarray:
    """Return a_ij b_k + a_ik b_j + a_jk b_i for batched tensors."""
    t = a2[:, :, :, None] * b1[:, None, None, :]
    return t + t.transpose(0, 1, 3, 2) + t.transpose(0, 3, 1, 2)


class Jet:
    """Value and partial derivatives of a scalar field at ``n`` points.

    ``parts[k]`` has shape ``(n,) + (nvars,) * k``.
    """

    __slots__ = ("parts",)

    def __init__(self, parts: Sequence[np.ndarray]):
        if not 1 <= len(parts) <= MAX_ORDER + 1:
            raise JetOrderError(f"jet order must be in 0..{MAX_ORDER}")
        self.parts = [np.asarray(p, dtype=float) for p in parts]

    # -- construction -----------------------------------------------------
    @classmethod
    def constant(cls, value, n: int, nvars: int, order: int) -> "Jet":
        val = np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy()
        parts = [val] + [np.zeros((n,) + (nvars,) * k) for k in range(1, order + 1)]
        return cls(parts)

    @classmethod
    def variable(cls, values: np.ndarray, index: int, nvars: int, order: int) -> "Jet":
        """Jet of the coordinate function ``y -> y[index]``."""
        values = np.asarray(values, dtype=float)
        n = values.shape[0]
        parts = [values.copy()]
        if order >= 1:
            d1 = np.zeros((n, nvars))
            d1[:, index] = 1.0
            parts.append(d1)
        for k in range(2, order + 1):
            parts.append(np.zeros((n,) + (nvars,) * k))
        return cls(parts)

    # -- basic properties -------------------------------------------------
    @property
    def order(self) -> int:
        return len(self.parts) - 1

    @property
    def n(self) -> int:
        return self.parts[0].shape[0]

    @property
    def nvars(self) -> int:
        if self.order == 0:
            raise JetOrderError("order-0 jet does not record its variable count")
        return self.parts[1].shape[1]

    @property
    def val(self) -> np.ndarray:
        return self.parts[0]

    @property
    def grad(self) -> np.ndarray:
        self._need(1)
        return self.parts[1]

    @property
    def hess(self) -> np.ndarray:
        self._need(2)
        return self.parts[2]

    @property
    def third(self) -> np.ndarray:
        self._need(3)
        return self.parts[3]

    def _need(self, k: int) -> None:
        if self.order < k:
            raise JetOrderError(f"jet of order {self.order} has no order-{k} part")

    def truncate(self, order: int) -> "Jet":
        self._need(order)
        return Jet(self.parts[: order + 1])

    def derivative(self, k: int) -> "Jet":
        """Jet of the partial derivative along variable ``k`` (order drops by one)."""
        self._need(1)
        return Jet([p[:, k] for p in self.parts[1:]])

    def embed(self, index_map: Sequence[int], nvars: int) -> "Jet":
        """Re-express a jet in a larger variable set.

        Variable ``i`` of ``self`` becomes variable ``index_map[i]``; the field
        is taken to be independent of the remaining variables.
        """
        idx = np.asarray(index_map)
        parts = [self.parts[0]]
        n = self.n
        for k in range(1, self.order + 1):
            out = np.zeros((n,) + (nvars,) * k)
            out[(slice(None),) + np.ix_(*([idx] * k))] = self.parts[k]
            parts.append(out)
        return Jet(parts)

    def select(self, mask) -> "Jet":
        return Jet([p[mask] for p in self.parts])

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            return other
        return None

    def __neg__(self) -> "Jet":
        return Jet([-p for p in self.parts])

    def __add__(self, other) -> "Jet":
        o = self._coerce(other)
        if o is None:
            return Jet([self.parts[0] + other] + self.parts[1:])
        k = min(self.order, o.order)
        return Jet([a + b for a, b in zip(self.parts[: k + 1], o.parts[: k + 1])])

    __radd__ = __add__

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        o = self._coerce(other)
        if o is None:
            c = np.asarray(other, dtype=float)
            out = []
            for k, p in enumerate(self.parts):
                out.append(p * c.reshape(c.shape + (1,) * k) if c.ndim else p * c)
            return Jet(out)
        k = min(self.order, o.order)
        f, g = self.parts, o.parts
        out = [f[0] * g[0]]
        if k >= 1:
            out.append(f[1] * g[0][:, None] + f[0][:, None] * g[1])
        if k >= 2:
            cross = f[1][:, :, None] * g[1][:, None, :]
            out.append(
                f[2] * g[0][:, None, None]
                + cross
                + cross.transpose(0, 2, 1)
                + f[0][:, None, None] * g[2]
            )
        if k >= 3:
            out.append(
                f[3] * g[0][:, None, None, None]
                + _sym3(f[2], g[1])
                + _sym3(g[2], f[1])
                + f[0][:, None, None, None] * g[3]
            )
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Jet":
        o = self._coerce(other)
        if o is None:
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * o.reciprocal()

    def __rtruediv__(self, other) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, p: int) -> "Jet":
        if not isinstance(p, int) or p < 0:
            return self.power(float(p))
        out = Jet.constant(1.0, self.n, self.nvars if self.order else 1, self.order)
        for _ in range(p):
            out = out * self
        return out

    # -- composition with scalar functions ---------------------------------
    def compose(self, derivs: Sequence[np.ndarray]) -> "Jet":
        """Compose with a scalar function given its derivatives at ``val``.

        ``derivs[m]`` is F^(m)(val) for m = 0..order.
        """
        f = self.parts
        k = self.order
        out = [np.asarray(derivs[0], dtype=float)]
        if k >= 1:
            out.append(derivs[1][:, None] * f[1])
        if k >= 2:
            out.append(
                derivs[2][:, None, None] * f[1][:, :, None] * f[1][:, None, :]
                + derivs[1][:, None, None] * f[2]
            )
        if k >= 3:
            f1 = f[1]
            out.append(
                derivs[3][:, None, None, None]
                * f1[:, :, None, None]
                * f1[:, None, :, None]
                * f1[:, None, None, :]
                + derivs[2][:, None, None, None] * _sym3(f[2], f1)
                + derivs[1][:, None, None, None] * f[3]
            )
        return Jet(out)

    def reciprocal(self) -> "Jet":
        a = self.val
        return self.compose([1 / a, -1 / a**2, 2 / a**3, -6 / a**4])

    def power(self, p: float) -> "Jet":
        a = self.val
        return self.compose(
            [a**p, p * a ** (p - 1), p * (p - 1) * a ** (p - 2), p * (p - 1) * (p - 2) * a ** (p - 3)]
        )

    def sqrt(self) -> "Jet":
        return self.power(0.5)

    def exp(self) -> "Jet":
        e = np.exp(self.val)
        return self.compose([e, e, e, e])

    def sin(self) -> "Jet":
        s, c = np.sin(self.val), np.cos(self.val)
        return self.compose([s, c, -s, -c])

    def log(self) -> "Jet":
        a = self.val
        return self.compose([np.log(a), 1 / a, -1 / a**2, 2 / a**3])


def sqrt(j: Jet) -> Jet:
    return j.sqrt()


# ---------------------------------------------------------------------------
# Test-field families
# ---------------------------------------------------------------------------

FAMILIES = ("gaussian-bump", "polynomial", "plane-smooth", "spherical-wave")


@dataclass(frozen=True)
class TestFieldSpec:
    """A closed-form scalar field with hand-coded derivatives.

    ``params`` depends on ``family``:

    gaussian-bump
        ``amplitudes`` (K,), ``centers`` (K, d) and ``precisions`` (K, d, d);
        the field is sum_k A_k exp(-1/2 (y-c_k)^T P_k (y-c_k)).
    polynomial
        ``terms``: sequence of (coefficient, exponent tuple of length d).
    plane-smooth
        ``amplitudes`` (K,), ``wavevectors`` (K, d), ``phases`` (K,);
        the field is sum_k A_k sin(k·y + theta_k).
    spherical-wave
        ``amplitude``, ``center``, ``width`` of the gaussian profile g; the
        field is (g(t - r) - g(t + r)) / r on spacetime (d = 4).
    """

    __test__ = False  # not a pytest class

    family: str
    nvars: int
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown test family {self.family!r}")
        if self.family == "spherical-wave" and self.nvars != SPACETIME_VARS:
            raise ValueError("spherical-wave is a spacetime family")

    def scaled(self, factor: float) -> "TestFieldSpec":
        """The same field multiplied by ``factor``."""
        p = dict(self.params)
        if self.family == "polynomial":
            p["terms"] = tuple((c * factor, e) for c, e in p["terms"])
        elif self.family == "spherical-wave":
            p["amplitude"] = p["amplitude"] * factor
        else:
            p["amplitudes"] = np.asarray(p["amplitudes"]) * factor
        return TestFieldSpec(self.family, self.nvars, p)

    def value(self, points: np.ndarray) -> np.ndarray:
        return analytic_jet(self, points, 0).val


def gaussian_bump(center, widths, amplitude: float = 1.0) -> TestFieldSpec:
    """Axis-aligned gaussian; ``np.inf`` widths make the field independent of a variable."""
    c = np.asarray(center, dtype=float)
    w = np.asarray(widths, dtype=float)
    prec = np.diag(np.where(np.isinf(w), 0.0, 1.0 / w**2))
    return TestFieldSpec(
        "gaussian-bump",
        c.size,
        {"amplitudes": np.array([amplitude]), "centers": c[None, :], "precisions": prec[None]},
    )


def random_gaussian(nvars: int, seed: int, n_bumps: int = 2, scale=None, center_scale=None) -> TestFieldSpec:
    """Sum of correlated gaussians with seeded random parameters.

    ``scale`` sets the typical width per variable and ``center_scale`` the
    spread of the centres around the origin.
    """
    rng = np.random.default_rng(seed)
    scale = np.ones(nvars) * 1.5 if scale is None else np.asarray(scale, dtype=float)
    center_scale = np.ones(nvars) * 0.5 if center_scale is None else np.asarray(center_scale, dtype=float)
    amps = rng.uniform(0.5, 1.5, n_bumps) * rng.choice([-1.0, 1.0], n_bumps)
    centers = rng.normal(size=(n_bumps, nvars)) * center_scale
    precs = []
    for _ in range(n_bumps):
        q, _ = np.linalg.qr(rng.normal(size=(nvars, nvars)))
        lam = rng.uniform(0.5, 1.5, nvars)
        m = q @ np.diag(lam) @ q.T
        precs.append(m / np.outer(scale, scale))
    return TestFieldSpec(
        "gaussian-bump", nvars, {"amplitudes": amps, "centers": centers, "precisions": np.array(precs)}
    )


def polynomial(terms, nvars: int) -> TestFieldSpec:
    terms = tuple((float(c), tuple(int(e) for e in exps)) for c, exps in terms)
    for _, e in terms:
        if len(e) != nvars:
            raise ValueError("exponent tuple length must equal nvars")
    return TestFieldSpec("polynomial", nvars, {"terms": terms})


def plane_smooth(wavevectors, phases, amplitudes) -> TestFieldSpec:
    k = np.atleast_2d(np.asarray(wavevectors, dtype=float))
    return TestFieldSpec(
        "plane-smooth",
        k.shape[1],
        {
            "amplitudes": np.atleast_1d(np.asarray(amplitudes, dtype=float)),
            "wavevectors": k,
            "phases": np.atleast_1d(np.asarray(phases, dtype=float)),
        },
    )


def spherical_wave(center: float = 1.0, width: float = 0.25, amplitude: float = 1.0) -> TestFieldSpec:
    return TestFieldSpec(
        "spherical-wave", SPACETIME_VARS, {"amplitude": amplitude, "center": center, "width": width}
    )


def _gaussian_jet(spec: TestFieldSpec, y: np.ndarray, order: int) -> Jet:
    p = spec.params
    n, d = y.shape
    parts = [np.zeros((n,) + (d,) * k) for k in range(order + 1)]
    for a, c, prec in zip(p["amplitudes"], p["centers"], p["precisions"]):
        dy = y - c
        q = dy @ prec  # gradient of the quadratic form, prec symmetric
        g = a * np.exp(-0.5 * np.einsum("ni,ni->n", q, dy))
        parts[0] += g
        if order >= 1:
            parts[1] += -q * g[:, None]
        if order >= 2:
            qq = q[:, :, None] * q[:, None, :]
            parts[2] += (qq - prec[None]) * g[:, None, None]
        if order >= 3:
            qqq = qq[:, :, :, None] * q[:, None, None, :]
            pp = np.broadcast_to(prec, (n, d, d))
            parts[3] += (-qqq + _sym3(pp, q)) * g[:, None, None, None]
    return Jet(parts)


def _falling(e: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= e - j
    return out


def _polynomial_jet(spec: TestFieldSpec, y: np.ndarray, order: int) -> Jet:
    n, d = y.shape
    parts = [np.zeros((n,) + (d,) * k) for k in range(order + 1)]

    def deriv(c, exps, counts):
        coef = c
        val = np.ones(n)
        for var, (e, m) in enumerate(zip(exps, counts)):
            if m > e:
                return None
            coef *= _falling(e, m)
            if e - m:
                val = val * y[:, var] ** (e - m)
        return coef * val

    for c, exps in spec.params["terms"]:
        for k in range(order + 1):
            for idx in combinations_with_replacement(range(d), k):
                counts = [idx.count(v) for v in range(d)]
                val = deriv(c, exps, counts)
                if val is None:
                    continue
                _fill_symmetric(parts[k], idx, val, add=True)
    return Jet(parts)


def _fill_symmetric(arr: np.ndarray, idx: tuple, val: np.ndarray, add: bool = False) -> None:
    if not idx:
        if add:
            arr += val
        else:
            arr[...] = val
        return
    seen = set()
    for perm in _permutations(idx):
        if perm in seen:
            continue
        seen.add(perm)
        key = (slice(None),) + perm
        if add:
            arr[key] += val
        else:
            arr[key] = val


def _permutations(idx: tuple):
    from itertools import permutations

    return permutations(idx)


def _plane_jet(spec: TestFieldSpec, y: np.ndarray, order: int) -> Jet:
    p = spec.params
    n, d = y.shape
    parts = [np.zeros((n,) + (d,) * k) for k in range(order + 1)]
    for a, k, th in zip(p["amplitudes"], p["wavevectors"], p["phases"]):
        arg = y @ k + th
        s, c = np.sin(arg), np.cos(arg)
        derivs = [a * s, a * c, -a * s, -a * c]
        parts[0] += derivs[0]
        if order >= 1:
            parts[1] += derivs[1][:, None] * k
        if order >= 2:
            parts[2] += derivs[2][:, None, None] * np.outer(k, k)
        if order >= 3:
            parts[3] += derivs[3][:, None, None, None] * np.einsum("i,j,l->ijl", k, k, k)
    return Jet(parts)


def _hermite_derivs(z: np.ndarray, nmax: int) -> list[np.ndarray]:
    """Probabilists' Hermite polynomials He_0..He_nmax at ``z``."""
    he = [np.ones_like(z), z.copy()]
    for m in range(1, nmax):
        he.append(z * he[m] - m * he[m - 1])
    return he[: nmax + 1]


class _GaussProfile:
    """g(s) = A exp(-(s-c)^2 / 2w^2) and its derivatives of any order."""

    def __init__(self, amplitude, center, width):
        self.a, self.c, self.w = amplitude, center, width

    def derivs(self, s: np.ndarray, nmax: int) -> list[np.ndarray]:
        z = (s - self.c) / self.w
        e = self.a * np.exp(-0.5 * z**2)
        he = _hermite_derivs(z, nmax)
        return [(-1.0 / self.w) ** m * he[m] * e for m in range(nmax + 1)]


_SERIES_TERMS = 14


def _radial_profile_coefficients(g: _GaussProfile, t: np.ndarray, r: np.ndarray, order: int):
    """Smooth radial coefficients of F(t, r) = (g(t-r) - g(t+r)) / r.

    Returns ``P[m][j]`` for time-derivative count m and j = 0..3, where
    P_0 = F and P_{j+1} = (1/r) dP_j/dr, each differentiated m times in t.
    Small radii use the even Taylor series to avoid cancellation.
    """
    rc = 0.25 * g.w
    small = r < rc
    big = ~small
    out = [[np.zeros_like(t) for _ in range(4)] for _ in range(order + 1)]

    if np.any(big):
        tb, rb = t[big], r[big]
        nmax = order + 3
        dm = g.derivs(tb - rb, nmax)
        dp = g.derivs(tb + rb, nmax)
        for m in range(order + 1):
            # h^{(j)}(r) = (-1)^j g^{(m+j)}(t-r) - g^{(m+j)}(t+r)
            h = [(-1.0) ** j * dm[m + j] - dp[m + j] for j in range(4)]
            fr = []
            for nder in range(4):
                acc = np.zeros_like(tb)
                for k in range(nder + 1):
                    acc += math.comb(nder, k) * h[nder - k] * (-1.0) ** k * math.factorial(k) / rb ** (k + 1)
                fr.append(acc)
            f0, f1, f2, f3 = fr
            p1 = f1 / rb
            p2 = (f2 - p1) / rb**2
            p3 = (f3 - 3 * (f2 - p1) / rb) / rb**3
            for j, val in enumerate((f0, p1, p2, p3)):
                out[m][j][big] = val

    if np.any(small):
        ts, rs = t[small], r[small]
        nmax = 2 * _SERIES_TERMS + 1 + order
        d = g.derivs(ts, nmax)
        r2 = rs**2
        for m in range(order + 1):
            # F = sum_k a_k r^{2k}, a_k = -2 g^{(2k+1+m)} / (2k+1)!
            acc = [np.zeros_like(ts) for _ in range(4)]
            for k in range(_SERIES_TERMS):
                ak = -2.0 * d[2 * k + 1 + m] / math.factorial(2 * k + 1)
                for j in range(4):
                    if k < j:
                        continue
                    coef = 1.0
                    for q in range(j):
                        coef *= 2 * (k - q)
                    acc[j] += coef * ak * r2 ** (k - j)
            for j in range(4):
                out[m][j][small] = acc[j]
    return out


def _spherical_jet(spec: TestFieldSpec, y: np.ndarray, order: int) -> Jet:
    p = spec.params
    g = _GaussProfile(p["amplitude"], p["center"], p["width"])
    t = y[:, 0]
    x = y[:, 1:4]
    r = np.sqrt(np.einsum("ni,ni->n", x, x))
    P = _radial_profile_coefficients(g, t, r, order)
    n = y.shape[0]
    eye = np.eye(3)
    parts = [P[0][0]]
    if order >= 1:
        d1 = np.zeros((n, 4))
        d1[:, 0] = P[1][0]
        d1[:, 1:] = P[0][1][:, None] * x
        parts.append(d1)
    if order >= 2:
        d2 = np.zeros((n, 4, 4))
        d2[:, 0, 0] = P[2][0]
        d2[:, 0, 1:] = P[1][1][:, None] * x
        d2[:, 1:, 0] = d2[:, 0, 1:]
        d2[:, 1:, 1:] = P[0][1][:, None, None] * eye + P[0][2][:, None, None] * x[:, :, None] * x[:, None, :]
        parts.append(d2)
    if order >= 3:
        d3 = np.zeros((n, 4, 4, 4))
        d3[:, 0, 0, 0] = P[3][0]
        v = P[2][1][:, None] * x
        d3[:, 0, 0, 1:] = v
        d3[:, 0, 1:, 0] = v
        d3[:, 1:, 0, 0] = v
        m2 = P[1][1][:, None, None] * eye + P[1][2][:, None, None] * x[:, :, None] * x[:, None, :]
        d3[:, 0, 1:, 1:] = m2
        d3[:, 1:, 0, 1:] = m2
        d3[:, 1:, 1:, 0] = m2
        xxx = x[:, :, None, None] * x[:, None, :, None] * x[:, None, None, :]
        dx = (
            eye[None, :, :, None] * x[:, None, None, :]
            + eye[None, :, None, :] * x[:, None, :, None]
            + eye[None, None, :, :] * x[:, :, None, None]
        )
        d3[:, 1:, 1:, 1:] = P[0][3][:, None, None, None] * xxx + P[0][2][:, None, None, None] * dx
        parts.append(d3)
    return Jet(parts)


_DISPATCH = {
    "gaussian-bump": _gaussian_jet,
    "polynomial": _polynomial_jet,
    "plane-smooth": _plane_jet,
    "spherical-wave": _spherical_jet,
}


def _points(points, nvars: int) -> np.ndarray:
    y = np.atleast_2d(np.asarray(points, dtype=float))
    if y.shape[1] != nvars:
        raise ValueError(f"expected points with {nvars} coordinates, got {y.shape[1]}")
    return y


def analytic_jet(spec: TestFieldSpec, points, order: int) -> Jet:
    """Exact jet of a test field at ``points`` (shape (n, nvars))."""
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"unsupported jet order {order}")
    y = _points(points, spec.nvars)
    return _DISPATCH[spec.family](spec, y, order)


# ---------------------------------------------------------------------------
# Finite-difference oracle
# ---------------------------------------------------------------------------


def default_steps(points: np.ndarray, h: float = 1e-4) -> np.ndarray:
    """Relative steps h * (1 + |y_i|) per point and coordinate."""
    return h * (1.0 + np.abs(points))


def _fd_once(func: Callable[[np.ndarray], np.ndarray], y: np.ndarray, order: int, steps: np.ndarray) -> list:
    n, d = y.shape
    f0 = func(y)
    parts = [f0]

    def shifted(*moves):
        z = y.copy()
        for var, sgn in moves:
            z[:, var] += sgn * steps[:, var]
        return func(z)

    if order >= 1:
        d1 = np.zeros((n, d))
        fp = [shifted((i, 1)) for i in range(d)]
        fm = [shifted((i, -1)) for i in range(d)]
        for i in range(d):
            d1[:, i] = (fp[i] - fm[i]) / (2 * steps[:, i])
        parts.append(d1)
    if order >= 2:
        d2 = np.zeros((n, d, d))
        for i in range(d):
            d2[:, i, i] = (fp[i] - 2 * f0 + fm[i]) / steps[:, i] ** 2
            for j in range(i + 1, d):
                v = (
                    shifted((i, 1), (j, 1))
                    - shifted((i, 1), (j, -1))
                    - shifted((i, -1), (j, 1))
                    + shifted((i, -1), (j, -1))
                ) / (4 * steps[:, i] * steps[:, j])
                d2[:, i, j] = v
                d2[:, j, i] = v
        parts.append(d2)
    if order >= 3:
        d3 = np.zeros((n, d, d, d))
        for idx in combinations_with_replacement(range(d), 3):
            i, j, k = idx
            # central difference in k of the second-derivative stencil in (i, j)
            def second(sk):
                if i == j:
                    return (
                        shifted((i, 1), (k, sk)) - 2 * shifted((k, sk)) + shifted((i, -1), (k, sk))
                    ) / steps[:, i] ** 2
                return (
                    shifted((i, 1), (j, 1), (k, sk))
                    - shifted((i, 1), (j, -1), (k, sk))
                    - shifted((i, -1), (j, 1), (k, sk))
                    + shifted((i, -1), (j, -1), (k, sk))
                ) / (4 * steps[:, i] * steps[:, j])

            v = (second(1) - second(-1)) / (2 * steps[:, k])
            _fill_symmetric(d3, idx, v)
        parts.append(d3)
    return parts


def fd_jet_of(func: Callable[[np.ndarray], np.ndarray], points, order: int, h: float = 1e-4,
              richardson: bool = False) -> Jet:
    """Central-difference jet of an arbitrary vectorised scalar function."""
    if not 0 <= order <= MAX_ORDER:
        raise JetOrderError(f"unsupported jet order {order}")
    if h <= 0:
        raise ValueError("step must be positive")
    y = np.atleast_2d(np.asarray(points, dtype=float))
    steps = default_steps(y, h)
    coarse = _fd_once(func, y, order, steps)
    if not richardson:
        return Jet(coarse)
    fine = _fd_once(func, y, order, steps / 2)
    return Jet([coarse[0]] + [(4 * b - a) / 3 for a, b in zip(coarse[1:], fine[1:])])


def fd_jet(spec: TestFieldSpec, points, order: int, h: float = 1e-4, richardson: bool = False) -> Jet:
    """Finite-difference estimate of :func:`analytic_jet` using only field values."""
    y = _points(points, spec.nvars)
    return fd_jet_of(spec.value, y, order, h=h, richardson=richardson)


# ---------------------------------------------------------------------------
# Stored-grid jets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StoredGrid:
    """Samples of a scalar field on a uniform grid.

    ``values`` has one axis per coordinate, in the same order as ``origin``
    and ``spacing``.
    """

    values: np.ndarray
    origin: tuple
    spacing: tuple

    @property
    def ndim(self) -> int:
        return self.values.ndim

    def node_coordinates(self, axis: int) -> np.ndarray:
        return self.origin[axis] + self.spacing[axis] * np.arange(self.values.shape[axis])

    @classmethod
    def from_function(cls, func, origin, spacing, shape) -> "StoredGrid":
        axes = [o + s * np.arange(m) for o, s, m in zip(origin, spacing, shape)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        return cls(np.asarray(func(pts), dtype=float).reshape(shape), tuple(origin), tuple(spacing))


def _lagrange_weights(s: np.ndarray, nodes: np.ndarray, order: int) -> list[np.ndarray]:
    """Lagrange basis weights and their derivatives at offsets ``s``.

    ``nodes`` are integer stencil offsets; returns arrays of shape
    (n, len(nodes)) for derivative counts 0..order (in units of cells).
    """
    m = len(nodes)
    n = s.shape[0]
    out = [np.zeros((n, m)) for _ in range(order + 1)]
    for a in range(m):
        others = [nodes[b] for b in range(m) if b != a]
        denom = np.prod([nodes[a] - o for o in others])
        # polynomial prod (s - o) expanded via its roots; derivatives by product rule
        diffs = np.stack([s - o for o in others], axis=1)  # (n, m-1)
        out[0][:, a] = np.prod(diffs, axis=1) / denom
        if order >= 1:
            acc = np.zeros(n)
            for b in range(m - 1):
                acc += np.prod(np.delete(diffs, b, axis=1), axis=1)
            out[1][:, a] = acc / denom
        if order >= 2:
            acc = np.zeros(n)
            for b in range(m - 1):
                for c in range(m - 1):
                    if c == b:
                        continue
                    acc += np.prod(np.delete(diffs, [b, c], axis=1), axis=1)
            out[2][:, a] = acc / denom
    return out


GRID_STENCIL = 6  # points per axis: degree-5 local interpolant
GRID_MARGIN = 2


def grid_jet(grid: StoredGrid, points, order: int, stencil: int = GRID_STENCIL, chunk: int | None = None) -> Jet:
    """Jet (order <= 2) of a stored field from a local tensor Lagrange interpolant.

    The interpolant uses ``stencil`` nodes per axis around the point, so the
    value is accurate to O(h^stencil), first derivatives to O(h^(stencil-1))
    and second derivatives to O(h^(stencil-2)).  Points closer than
    ``GRID_MARGIN`` cells to the boundary, or whose stencil would leave the
    grid, raise :class:`MarginError`.
    """
    if order > 2:
        raise JetOrderError("grid jets support order <= 2")
    y = np.atleast_2d(np.asarray(points, dtype=float))
    d = grid.ndim
    if y.shape[1] != d:
        raise ValueError("point dimension does not match grid")
    shape = np.array(grid.values.shape)
    origin = np.asarray(grid.origin, dtype=float)
    spacing = np.asarray(grid.spacing, dtype=float)
    pos = (y - origin) / spacing
    lo_off = (stencil - 1) // 2
    base = np.floor(pos).astype(int)
    start = base - lo_off
    if np.any(pos < GRID_MARGIN) or np.any(pos > shape - 1 - GRID_MARGIN):
        raise MarginError("jet requested within the grid's boundary margin")
    start = np.clip(start, 0, shape - stencil)
    if np.any(pos - start < 0) or np.any(pos - start > stencil - 1):
        raise MarginError("interpolation stencil leaves the grid")

    n = y.shape[0]
    parts = [np.zeros((n,) + (d,) * k) for k in range(order + 1)]
    nodes = np.arange(stencil, dtype=float)
    if chunk is None:
        chunk = max(256, 2_000_000 // stencil**d)
    for c0 in range(0, n, chunk):
        sl = slice(c0, min(n, c0 + chunk))
        w_axes = [_lagrange_weights(pos[sl, a] - start[sl, a], nodes, order) for a in range(d)]
        # gather the local block of values
        idx = [start[sl, a][:, None] + np.arange(stencil)[None, :] for a in range(d)]
        gather = [idx[a][(slice(None),) + tuple(None if b != a else slice(None) for b in range(d))] for a in range(d)]
        block = grid.values[tuple(gather)]  # (m, s, s, ..., s)

        def contract_all(counts):
            out = block
            for a in range(d):
                w = w_axes[a][counts[a]] / spacing[a] ** counts[a]
                out = np.einsum("nk...,nk->n...", out, w)
            return out

        parts[0][sl] = contract_all([0] * d)
        if order >= 1:
            for a in range(d):
                cnt = [0] * d
                cnt[a] = 1
                parts[1][sl, a] = contract_all(cnt)
        if order >= 2:
            for a in range(d):
                for b in range(a, d):
                    cnt = [0] * d
                    cnt[a] += 1
                    cnt[b] += 1
                    v = contract_all(cnt)
                    parts[2][sl, a, b] = v
                    parts[2][sl, b, a] = v
    return Jet(parts)
