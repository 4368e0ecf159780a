"""Characteristics of T_phi and the Duhamel integral for Phi.

Along a characteristic parametrised by hyperboloidal time rho,

    dt/drho = v0 / v^rho,  dx/drho = v / v^rho,
    dv/drho = -(T(phi) v + grad phi) / v^rho,  dPhi/drho = h / v^rho,

because d rho / dt = v^rho / v0 along the flow.  Phi vanishes on H_1, so
Phi at a point is obtained by integrating backward to rho = 1.
"""

from __future__ import annotations

import numpy as np

from ..fields import N_MODIFIED, JetSource, PhiProvider
from ..geometry import rho_of, v_rho
from ..jets import Jet, PHASE_VARS
from .phi_source import phi_sources


class CharacteristicError(RuntimeError):
    """Raised when a characteristic leaves the future of H_1 or produces NaNs."""


def _rhs(phi: JetSource, state: np.ndarray) -> np.ndarray:
    t, x, v = state[:, 0], state[:, 1:4], state[:, 4:7]
    jet = phi(np.concatenate([t[:, None], x], axis=1), 2)
    dphi = jet.grad
    v0 = np.sqrt(1.0 + np.einsum("ni,ni->n", v, v))
    tphi = v0 * dphi[:, 0] + np.einsum("ni,ni->n", v, dphi[:, 1:4])
    vr = v_rho(t, x, v)
    out = np.empty_like(state)
    out[:, 0] = v0 / vr
    out[:, 1:4] = v / vr[:, None]
    out[:, 4:7] = -(tphi[:, None] * v + dphi[:, 1:4]) / vr[:, None]
    h = phi_sources(jet, t, x, v).reshape(t.size, -1)
    out[:, 7:] = h / vr[:, None]
    return out


def integrate_phi_coefficients(phi: JetSource, points: np.ndarray, n_steps: int = 64) -> np.ndarray:
    """Phi_a^i at phase-space points, shape (n, 8, 3), with Phi = 0 on H_1.

    Classical RK4 in rho with ``n_steps`` equal steps from each point's own
    rho down to 1.  A constant step count keeps the result a smooth function
    of the end point, so it can be differentiated by finite differences.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    n = pts.shape[0]
    rho_end = rho_of(pts[:, 0], pts[:, 1:4])
    if np.any(rho_end < 1.0):
        raise CharacteristicError("points must lie in the future of H_1")
    state = np.concatenate([pts, np.zeros((n, N_MODIFIED * 3))], axis=1)
    ds = (1.0 - rho_end) / n_steps  # negative: backward in rho
    dsc = ds[:, None]
    for _ in range(n_steps):
        k1 = _rhs(phi, state)
        k2 = _rhs(phi, state + 0.5 * dsc * k1)
        k3 = _rhs(phi, state + 0.5 * dsc * k2)
        k4 = _rhs(phi, state + dsc * k3)
        state = state + dsc * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
    if not np.all(np.isfinite(state)):
        raise CharacteristicError("non-finite values along characteristics")
    # state carries int_{rho_p}^{1} h / v^rho drho = -Phi(p)
    return -state[:, 7:].reshape(n, N_MODIFIED, 3)


class CharacteristicPhi(PhiProvider):
    """Phi coefficients from backward characteristics, with FD gradients for order-1 jets."""

    def __init__(self, phi: JetSource, n_steps: int = 64, h: float = 1e-5):
        self.phi = phi
        self.n_steps = n_steps
        self.h = h

    def jets(self, points, order):
        if order > 1:
            raise ValueError("characteristic Phi provides jets up to order 1")
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        n = pts.shape[0]
        if order == 0:
            vals = integrate_phi_coefficients(self.phi, pts, self.n_steps)
            return [[Jet([vals[:, a, i]]) for i in range(3)] for a in range(N_MODIFIED)]
        steps = self.h * (1.0 + np.abs(pts))
        batch = [pts]
        for k in range(PHASE_VARS):
            for sgn in (1.0, -1.0):
                q = pts.copy()
                q[:, k] += sgn * steps[:, k]
                batch.append(q)
        vals = integrate_phi_coefficients(self.phi, np.concatenate(batch), self.n_steps)
        vals = vals.reshape(1 + 2 * PHASE_VARS, n, N_MODIFIED, 3)
        grad = np.empty((n, N_MODIFIED, 3, PHASE_VARS))
        for k in range(PHASE_VARS):
            grad[..., k] = (vals[1 + 2 * k] - vals[2 + 2 * k]) / (2 * steps[:, k])[:, None, None]
        return [[Jet([vals[0, :, a, i], grad[:, a, i, :]]) for i in range(3)] for a in range(N_MODIFIED)]
