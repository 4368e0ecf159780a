"""Pieces shared by the two evolution modes."""

from __future__ import annotations

import numpy as np


class NumericalBlowup(FloatingPointError):
    """A non-finite value appeared in the evolved state."""


def check_finite(time: float, **arrays) -> None:
    for name, a in arrays.items():
        if not np.all(np.isfinite(a)):
            bad = int(np.count_nonzero(~np.isfinite(a)))
            raise NumericalBlowup(f"{bad} non-finite entries in {name} at t={time:.6g}")


def sponge_profile(coord: np.ndarray, inner: float, outer: float, strength: float) -> np.ndarray:
    """Damping rate rising quadratically from 0 at |coord| = inner to ``strength`` at ``outer``."""
    depth = np.clip((np.abs(coord) - inner) / (outer - inner), 0.0, 1.0)
    return strength * depth**2


def trapezoid_weights(n_nodes: int, spacing: float) -> np.ndarray:
    w = np.full(n_nodes, spacing)
    w[[0, -1]] *= 0.5
    return w
