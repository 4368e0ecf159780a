"""Hyperboloid crossings of particle worldlines.

A particle of mass m = w F crossing H_rho contributes m v0 to the flux
int_{H_rho} chi(f) dmu, because the number current int f v / v0 dv has
unit flux per particle and chi weighs it by v0.  The crossing point is
found by linear interpolation of rho^2 = t^2 - |x|^2 between two times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import complete_homogeneous

E0_WEIGHT_DEGREE = 6


def crossing_weights(t, x, v, rho) -> np.ndarray:
    """v0 * sum_{|C|=6} |z^|^C at crossing points; z^ = 1 + z_boost / sqrt(rho)."""
    v0 = np.sqrt(1 + np.einsum("ni,ni->n", v, v))
    z = (t[:, None] * v - x * v0[:, None]) / v0[:, None]
    zhat = np.abs(1 + z / np.sqrt(rho))
    return complete_homogeneous(zhat, E0_WEIGHT_DEGREE)


@dataclass
class CrossingTally:
    rho: np.ndarray
    chi: np.ndarray = field(default=None)
    e0: np.ndarray = field(default=None)
    count: np.ndarray = field(default=None)

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        k = self.rho.size
        self.chi = np.zeros(k) if self.chi is None else self.chi
        self.e0 = np.zeros(k) if self.e0 is None else self.e0
        self.count = np.zeros(k, dtype=np.int64) if self.count is None else self.count

    def add_step(self, before, after) -> None:
        """Accumulate crossings between two states (t, x, v, mass, frozen)."""
        t_a, x_a, v_a, m_a, fr_a = before
        t_b, x_b, v_b, m_b, fr_b = after
        s_a = t_a**2 - np.einsum("ni,ni->n", x_a, x_a)
        s_b = t_b**2 - np.einsum("ni,ni->n", x_b, x_b)
        live = ~(fr_a | fr_b)
        for k, rho in enumerate(self.rho):
            hit = live & (s_a < rho**2) & (s_b >= rho**2)
            if not np.any(hit):
                continue
            lam = (rho**2 - s_a[hit]) / (s_b[hit] - s_a[hit])
            t = t_a + lam * (t_b - t_a)
            x = x_a[hit] + lam[:, None] * (x_b[hit] - x_a[hit])
            v = v_a[hit] + lam[:, None] * (v_b[hit] - v_a[hit])
            m = m_a[hit] + lam * (m_b[hit] - m_a[hit])
            v0 = np.sqrt(1 + np.einsum("ni,ni->n", v, v))
            self.chi[k] += float(np.sum(m * v0))
            self.e0[k] += float(np.sum(m * v0 * crossing_weights(t, x, v, rho)))
            self.count[k] += int(hit.sum())
