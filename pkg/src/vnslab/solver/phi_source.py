"""Source terms h_a^i of the transport equations T_phi(Phi_a^i) = h_a^i.

Commuting T_phi with a generalized lift gives, for every a = 0..7,

    [T_phi, Z^_a - Z_a(phi) W] f = d_i(Z_a phi) V_i f - Z_a(phi) e_0 f / v0 + ...

Eliminating V_i through the modified boosts and writing
(1 + u) e_0 = a_0 S + a_i Z_i + e_0 with a_0 = t / (t + r) and
a_i = -x^i / (t + r) leaves terms of the form (t / v0) (...) X_i f.  The
coefficients Phi cancel them when

    h_a^i = (t / v0) * (d_i(Z_a phi) - x^i Z_a(phi) / ((t + r)(1 + u))).

The closed form is locked by the lambda-scaling check in
:mod:`vnslab.identities`.  The function is linear in phi.
"""

from __future__ import annotations

import numpy as np

from ..fields import N_MODIFIED, Context, killing_of_phi
from ..jets import Jet


def phi_sources(phi_jet: Jet, t, x, v) -> np.ndarray:
    """All h_a^i at once, shape (n, 8, 3), from an order >= 2 spacetime jet of phi."""
    t = np.asarray(t, dtype=float)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    pts = np.concatenate([t[:, None], x], axis=1)
    ctx = Context(pts, phi=lambda p, order: phi_jet.truncate(order))
    v0 = np.sqrt(1.0 + np.einsum("ni,ni->n", v, v))
    r = np.sqrt(np.einsum("ni,ni->n", x, x))
    u = t - r
    denom = (t + r) * (1.0 + u)
    out = np.empty((t.size, N_MODIFIED, 3))
    for a in range(N_MODIFIED):
        z = killing_of_phi(a, ctx, 1)
        grad = z.grad[:, 1:4]
        out[:, a, :] = (t / v0)[:, None] * (grad - x * (z.val / denom)[:, None])
    return out


def phi_source(a: int, i: int, phi_jet: Jet, t, x, v) -> np.ndarray:
    """The single component h_a^i (i = 0..2 for x^1..x^3)."""
    return phi_sources(phi_jet, t, x, v)[:, a, i]


# 1D analogue: labels 0 (scaling t d_t + x d_x) and 1 (boost t d_x + x d_t)

N_MODIFIED_1D = 2


def phi_sources_1d(t, x, v, phi, phi_t, phi_x, phi_tt, phi_tx, phi_xx) -> np.ndarray:
    """h_a for the 1D analogue from pointwise derivatives of phi; shape (..., 2)."""
    v0 = np.sqrt(1.0 + v**2)
    r = np.abs(x)
    u = t - r
    denom = (t + r) * (1.0 + u)
    z0 = t * phi_t + x * phi_x
    dz0 = phi_x + t * phi_tx + x * phi_xx
    z1 = t * phi_x + x * phi_t
    dz1 = t * phi_xx + phi_t + x * phi_tx
    h0 = (t / v0) * (dz0 - x * z0 / denom)
    h1 = (t / v0) * (dz1 - x * z1 / denom)
    return np.stack([h0, h1], axis=-1)
