"""Energy fluxes of scalar waves through the hyperboloids H_rho."""

from __future__ import annotations

import numpy as np

from .fields import Context, killing
from .jets import Jet

POINCARE_LABELS = tuple(range(1, 11))  # boosts, rotations, translations


def flux_density(grad: np.ndarray, t: np.ndarray, x: np.ndarray) -> np.ndarray:
    """T[g](d_t, nu_rho) = (t / 2 rho)(g_t^2 + |grad g|^2) + (x . grad g) g_t / rho.

    ``grad`` has shape (n, 4) with the time derivative first.
    """
    rho = np.sqrt((t - np.linalg.norm(x, axis=1)) * (t + np.linalg.norm(x, axis=1)))
    gt = grad[:, 0]
    gx = grad[:, 1:4]
    return (t / (2 * rho)) * (gt**2 + np.einsum("ni,ni->n", gx, gx)) + np.einsum("ni,ni->n", x, gx) * gt / rho


def commuted_gradients(jet: Jet, points: np.ndarray, max_compositions: int):
    """Gradients of Z^alpha g for all words alpha in the Poincare labels with |alpha| <= N.

    The jet must have order N + 1.  Yields (word, grad) pairs; there are
    1 + 10 + 100 words for N = 2.
    """
    if jet.order < max_compositions + 1:
        raise ValueError("jet order too low for the requested number of compositions")
    ctx = Context(points)
    level = [((), jet)]
    for depth in range(max_compositions + 1):
        nxt = []
        for word, g in level:
            yield word, g.grad
            if depth < max_compositions:
                for label in POINCARE_LABELS:
                    nxt.append((word + (label,), killing(label).apply(g, ctx)))
        level = nxt


def commuted_energy_density(jet: Jet, points: np.ndarray, max_compositions: int) -> np.ndarray:
    """Sum over |alpha| <= N of the flux density of Z^alpha g at each point."""
    t, x = points[:, 0], points[:, 1:4]
    acc = np.zeros(points.shape[0])
    for _, grad in commuted_gradients(jet, points, max_compositions):
        acc += flux_density(grad, t, x)
    return acc
