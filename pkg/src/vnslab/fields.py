"""First-order differential operators on phase space, applied through jets.

A :class:`FieldOp` is F = c^0 d_t + c^i d_{x^i} + d^i d_{v^i} + m0, with
coefficients produced on demand as jets at the points of an evaluation
:class:`Context`.  The context also carries the scalar potential phi (as a
spacetime jet source) and the modified-field coefficients Phi_a^i.

Field labels follow the ordered algebra used throughout the package:
0 scaling, 1..3 boosts, 4..6 rotations (pairs in ``ROTATION_PAIRS``), and
7..10 translations d_t, d_1, d_2, d_3.  Modified fields exist for labels
0..7, label 7 being the time translation.
"""

from __future__ import annotations

from typing import Callable, Optional, Sequence, Union

import numpy as np

from .geometry import ROTATION_PAIRS
from .jets import PHASE_VARS, SPACETIME_VARS, Jet, JetOrderError, TestFieldSpec, analytic_jet

N_KILLING = 11
N_MODIFIED = 8
SCALING, TIME_TRANSLATION = 0, 7

JetSource = Callable[[np.ndarray, int], Jet]
ScalarFn = Callable[["Context", int], Union[Jet, float]]


def boost_labels():
    return (1, 2, 3)


def rotation_labels():
    return (4, 5, 6)


def translation_labels():
    return (7, 8, 9, 10)


def analytic_source(spec: TestFieldSpec, scale: float = 1.0) -> JetSource:
    """Jet source backed by closed-form derivatives, optionally scaled."""

    def src(points, order):
        j = analytic_jet(spec, points, order)
        return j * scale if scale != 1.0 else j

    return src


class PhiProvider:
    """Source of the coefficients Phi_a^i (a = 0..7, i = 1..3) as phase-space jets."""

    def jets(self, points: np.ndarray, order: int) -> list[list[Jet]]:
        raise NotImplementedError


class ZeroPhi(PhiProvider):
    def jets(self, points, order):
        n = points.shape[0]
        z = Jet.constant(0.0, n, PHASE_VARS, order)
        return [[z] * 3 for _ in range(N_MODIFIED)]


class AnalyticPhi(PhiProvider):
    """Phi_a^i given by closed-form phase-space test fields (index [a][i])."""

    def __init__(self, specs: Sequence[Sequence[TestFieldSpec]]):
        self.specs = specs

    def jets(self, points, order):
        return [[analytic_jet(s, points, order) for s in row] for row in self.specs]


class MissingPhiError(ValueError):
    """Raised when a modified field is evaluated without Phi coefficients."""


class Context:
    """Evaluation points together with the phi and Phi providers.

    ``points`` has shape (n, 7) for phase space or (n, 4) for spacetime.
    ``phi`` is a jet source on spacetime points or ``None`` for phi = 0.
    """

    def __init__(self, points: np.ndarray, phi: Optional[JetSource] = None, Phi: Optional[PhiProvider] = None):
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.nvars = self.points.shape[1]
        if self.nvars not in (SPACETIME_VARS, PHASE_VARS):
            raise ValueError("points must have 4 or 7 coordinates")
        self.phi_source = phi
        self.Phi_source = Phi
        self._cache: dict = {}

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def is_phase(self) -> bool:
        return self.nvars == PHASE_VARS

    def _cached(self, key, make):
        if key not in self._cache:
            self._cache[key] = make()
        return self._cache[key]

    def coord(self, k: int, order: int) -> Jet:
        return self._cached(("coord", k, order), lambda: Jet.variable(self.points[:, k], k, self.nvars, order))

    def t(self, order):
        return self.coord(0, order)

    def x(self, i, order):
        return self.coord(1 + i, order)

    def v(self, i, order):
        self._need_phase()
        return self.coord(4 + i, order)

    def v0(self, order) -> Jet:
        self._need_phase()

        def make():
            acc = 1.0 + self.v(0, order) * self.v(0, order)
            for i in (1, 2):
                acc = acc + self.v(i, order) * self.v(i, order)
            return acc.sqrt()

        return self._cached(("v0", order), make)

    def r(self, order) -> Jet:
        def make():
            acc = self.x(0, order) * self.x(0, order)
            for i in (1, 2):
                acc = acc + self.x(i, order) * self.x(i, order)
            return acc.sqrt()

        return self._cached(("r", order), make)

    def zero(self, order) -> Jet:
        return Jet.constant(0.0, self.n, self.nvars, order)

    def _need_phase(self):
        if not self.is_phase:
            raise JetOrderError("momentum variables requested on a spacetime context")

    def phi(self, order: int) -> Jet:
        """Jet of phi in the context's variables (independent of v)."""

        def make():
            if self.phi_source is None:
                return self.zero(order)
            j = self.phi_source(self.points[:, :SPACETIME_VARS], order)
            if self.is_phase:
                return j.embed(range(SPACETIME_VARS), PHASE_VARS)
            return j

        return self._cached(("phi", order), make)

    def dphi(self, mu: int, order: int) -> Jet:
        """Jet of d_mu phi (mu = 0 for t, 1..3 for x)."""
        return self.phi(order + 1).derivative(mu)

    def Tphi(self, order: int) -> Jet:
        """T(phi) = v0 d_t phi + v^i d_i phi."""
        acc = self.v0(order) * self.dphi(0, order)
        for i in range(3):
            acc = acc + self.v(i, order) * self.dphi(1 + i, order)
        return acc

    def Phi(self, a: int, i: int, order: int) -> Jet:
        if self.Phi_source is None:
            raise MissingPhiError("modified fields need Phi coefficients")
        for higher in range(order + 1, 3):
            # reuse a higher-order evaluation: Phi providers can be expensive
            if ("Phi", higher) in self._cache:
                return self._cache[("Phi", higher)][a][i].truncate(order)
        rows = self._cached(("Phi", order), lambda: self.Phi_source.jets(self.points, order))
        return rows[a][i]


def _as_jet(value, ctx: Context, order: int) -> Jet:
    if isinstance(value, Jet):
        return value.truncate(order) if value.order > order else value
    return Jet.constant(value, ctx.n, ctx.nvars, order)


class FieldOp:
    """A first-order operator defined by a coefficient builder.

    ``build(ctx, order)`` returns ``(coeffs, m0)`` where ``coeffs`` is a list
    of length ``ctx.nvars`` whose entries are jets (or ``None`` for zero) and
    ``m0`` is a jet or ``None``.
    """

    def __init__(self, build, name: str = "F"):
        self._build = build
        self.name = name

    def coefficients(self, ctx: Context, order: int):
        coeffs, m0 = self._build(ctx, order)
        coeffs = list(coeffs) + [None] * (ctx.nvars - len(coeffs))
        if len(coeffs) > ctx.nvars:
            extra = coeffs[ctx.nvars:]
            if any(c is not None for c in extra):
                raise JetOrderError(f"{self.name} has momentum components on a spacetime context")
            coeffs = coeffs[: ctx.nvars]
        return coeffs, m0

    def apply(self, g: Jet, ctx: Context) -> Jet:
        """F g as a jet of order ``g.order - 1``."""
        if g.order < 1:
            raise JetOrderError("applying a first-order operator needs an order >= 1 jet")
        k = g.order - 1
        coeffs, m0 = self.coefficients(ctx, k)
        out = ctx.zero(k)
        for j, c in enumerate(coeffs):
            if c is not None:
                out = out + _as_jet(c, ctx, k) * g.derivative(j)
        if m0 is not None:
            out = out + _as_jet(m0, ctx, k) * g.truncate(k)
        return out

    def __call__(self, g: Jet, ctx: Context) -> Jet:
        return self.apply(g, ctx)

    # -- algebra ------------------------------------------------------------
    def __add__(self, other: "FieldOp") -> "FieldOp":
        return lincomb([(1.0, self), (1.0, other)], name=f"({self.name}+{other.name})")

    def __sub__(self, other: "FieldOp") -> "FieldOp":
        return lincomb([(1.0, self), (-1.0, other)], name=f"({self.name}-{other.name})")

    def __neg__(self) -> "FieldOp":
        return lincomb([(-1.0, self)], name=f"-{self.name}")

    def times(self, fn: Union[ScalarFn, float], name: str = "") -> "FieldOp":
        """Pointwise multiple fn * F."""
        return lincomb([(fn, self)], name=name or f"c*{self.name}")


def _eval_scalar(fn, ctx: Context, order: int) -> Jet:
    if callable(fn):
        return _as_jet(fn(ctx, order), ctx, order)
    return _as_jet(fn, ctx, order)


def lincomb(terms, name: str = "lincomb") -> FieldOp:
    """Operator sum_k fn_k * F_k with scalar functions (or constants) fn_k."""
    terms = list(terms)

    def build(ctx, order):
        coeffs = [None] * ctx.nvars
        m0 = None
        for fn, op in terms:
            s = _eval_scalar(fn, ctx, order)
            cs, m = op.coefficients(ctx, order)
            for j, c in enumerate(cs):
                if c is None:
                    continue
                term = s * _as_jet(c, ctx, order)
                coeffs[j] = term if coeffs[j] is None else coeffs[j] + term
            if m is not None:
                term = s * _as_jet(m, ctx, order)
                m0 = term if m0 is None else m0 + term
        return coeffs, m0

    return FieldOp(build, name)


def multiplication(fn: Union[ScalarFn, float], name: str = "mult") -> FieldOp:
    """The zeroth-order operator f -> fn * f."""
    return FieldOp(lambda ctx, order: ([], _eval_scalar(fn, ctx, order)), name)


# ---------------------------------------------------------------------------
# Coordinate vector fields
# ---------------------------------------------------------------------------


def partial(k: int) -> FieldOp:
    """Coordinate derivative along variable k (0 = t, 1..3 = x, 4..6 = v)."""

    def build(ctx, order):
        coeffs = [None] * max(ctx.nvars, k + 1)
        coeffs[k] = 1.0
        return coeffs, None

    names = ["d_t", "d_x1", "d_x2", "d_x3", "d_v1", "d_v2", "d_v3"]
    return FieldOp(build, names[k])


def _check_label(label: int, upper: int = N_KILLING):
    if not (isinstance(label, (int, np.integer)) and 0 <= label < upper):
        raise ValueError(f"field label must be in 0..{upper - 1}, got {label!r}")


def _killing_coeffs(label: int, ctx: Context, order: int) -> list:
    """Spacetime coefficients (c^0, c^1, c^2, c^3) of the Killing/conformal field."""
    t = ctx.t(order)
    x = [ctx.x(i, order) for i in range(3)]
    c = [None] * 4
    if label == 0:
        c = [t] + x
    elif label in (1, 2, 3):
        i = label - 1
        c[0] = x[i]
        c[1 + i] = t
    elif label in (4, 5, 6):
        i, j = ROTATION_PAIRS[label - 4]
        c[1 + j] = x[i]
        c[1 + i] = -x[j]
    else:
        c[label - 7] = 1.0
    return c


_KILLING_NAMES = ["S", "Z1", "Z2", "Z3", "O12", "O13", "O23", "d_t", "d_1", "d_2", "d_3"]


def killing(label: int) -> FieldOp:
    """Scaling, boost, rotation or translation as a spacetime operator."""
    _check_label(label)
    return FieldOp(lambda ctx, order: (_killing_coeffs(label, ctx, order), None), _KILLING_NAMES[label])


def _lift_coeffs(label: int, ctx: Context, order: int) -> list:
    """Momentum coefficients d^i = v^alpha d_alpha Z^i of the complete lift."""
    d = [None] * 3
    if label in (1, 2, 3):
        d[label - 1] = ctx.v0(order)
    elif label in (4, 5, 6):
        i, j = ROTATION_PAIRS[label - 4]
        d[j] = ctx.v(i, order)
        d[i] = -ctx.v(j, order)
    return d


def complete_lift(label: int) -> FieldOp:
    """Complete lift to phase space; the scaling is returned unlifted."""
    _check_label(label)

    def build(ctx, order):
        return _killing_coeffs(label, ctx, order) + _lift_coeffs(label, ctx, order), None

    return FieldOp(build, "^" + _KILLING_NAMES[label])


def killing_of_phi(label: int, ctx: Context, order: int) -> Jet:
    """Z_label(phi) as a jet of the requested order."""
    return killing(label).apply(ctx.phi(order + 1), ctx)


# ---------------------------------------------------------------------------
# Vertical fields, generalized translations, transport
# ---------------------------------------------------------------------------


def vertical(i: int) -> FieldOp:
    """V_i = d_{v^i}."""
    return FieldOp(lambda ctx, order: ([None] * 4 + [1.0 if k == i else None for k in range(3)], None), f"V{i + 1}")


def euler_vertical() -> FieldOp:
    """W = v^i d_{v^i}."""
    return FieldOp(lambda ctx, order: ([None] * 4 + [ctx.v(k, order) for k in range(3)], None), "W")


def generalized_translation(mu: int) -> FieldOp:
    """e_mu = d_mu - (d_mu phi) W."""
    if mu not in (0, 1, 2, 3):
        raise ValueError("mu must be 0..3")

    def build(ctx, order):
        c = [None] * 4
        c[mu] = 1.0
        dphi = ctx.dphi(mu, order)
        return c + [-(dphi * ctx.v(k, order)) for k in range(3)], None

    return FieldOp(build, f"e{mu}")


def bold_lift(label: int) -> FieldOp:
    """Complete lift with translations replaced by generalized translations: Z^ - Z(phi) W."""
    _check_label(label)

    def build(ctx, order):
        zphi = killing_of_phi(label, ctx, order)
        d = _lift_coeffs(label, ctx, order)
        for k in range(3):
            term = -(zphi * ctx.v(k, order))
            d[k] = term if d[k] is None else d[k] + term
        return _killing_coeffs(label, ctx, order) + d, None

    return FieldOp(build, "Z^" + _KILLING_NAMES[label])


def x_field(i: int) -> FieldOp:
    """X_i = e_i + (v^i / v0) e_0."""
    return lincomb(
        [(1.0, generalized_translation(1 + i)), (lambda ctx, k: ctx.v(i, k) / ctx.v0(k), generalized_translation(0))],
        name=f"X{i + 1}",
    )


def free_transport() -> FieldOp:
    """T = v^alpha d_alpha."""

    def build(ctx, order):
        return [ctx.v0(order)] + [ctx.v(k, order) for k in range(3)], None

    return FieldOp(build, "T")


def transport_operator() -> FieldOp:
    """T_phi = v^alpha e_alpha - (d_i phi) V_i = T - T(phi) W - (d_i phi) V_i."""

    def build(ctx, order):
        tphi = ctx.Tphi(order)
        d = [-(tphi * ctx.v(k, order)) - ctx.dphi(1 + k, order) for k in range(3)]
        return [ctx.v0(order)] + [ctx.v(k, order) for k in range(3)] + d, None

    return FieldOp(build, "T_phi")


def modified_field(a: int) -> FieldOp:
    """Y_a = (generalized complete lift) + Phi_a^j X_j, for a = 0..7."""
    _check_label(a, N_MODIFIED)
    terms = [(1.0, bold_lift(a))]
    for j in range(3):
        terms.append(((lambda jj: (lambda ctx, k: ctx.Phi(a, jj, k)))(j), x_field(j)))
    return lincomb(terms, name=f"Y{a}")


def commutator_apply(A: FieldOp, B: FieldOp, f: Jet, ctx: Context) -> np.ndarray:
    """Values of [A, B] f = A(B f) - B(A f) from an order >= 2 jet of f."""
    if f.order < 2:
        raise JetOrderError("commutators need an order-2 jet of f")
    f2 = f.truncate(2)
    return A.apply(B.apply(f2, ctx), ctx).val - B.apply(A.apply(f2, ctx), ctx).val


# ---------------------------------------------------------------------------
# Weights as jets
# ---------------------------------------------------------------------------


def weight_contraction(label: int, ctx: Context, order: int) -> Jet:
    """Z^alpha v_alpha for a boost or rotation label (metric signature -+++)."""
    c = _killing_coeffs(label, ctx, order)
    acc = ctx.zero(order)
    if c[0] is not None:
        acc = acc - _as_jet(c[0], ctx, order) * ctx.v0(order)
    for i in range(3):
        if c[1 + i] is not None:
            acc = acc + _as_jet(c[1 + i], ctx, order) * ctx.v(i, order)
    return acc


def weight_jet(label: int, ctx: Context, order: int) -> Jet:
    """The weight z = Z^alpha v_alpha / v0 for labels 1..6."""
    if label not in (1, 2, 3, 4, 5, 6):
        raise ValueError("weights exist for boosts and rotations only")
    return weight_contraction(label, ctx, order) / ctx.v0(order)
