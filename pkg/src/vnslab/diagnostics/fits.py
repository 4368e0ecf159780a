"""Power-law fits: decay exponents and observed convergence orders."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_POINTS = 8


class FitError(ValueError):
    """Too few points or nonpositive values for a log-log fit."""


@dataclass(frozen=True)
class DecayFit:
    slope: float
    half_width: float
    intercept: float
    n_points: int


def fit_decay(x, y, window=None, n_boot: int = 2000, seed: int = 0, min_points: int = MIN_POINTS) -> DecayFit:
    """Least-squares slope of log y against log x with a residual-bootstrap 95% half-width.

    ``window`` = (lo, hi) restricts the fit to lo <= x <= hi.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if window is not None:
        keep = (x >= window[0]) & (x <= window[1])
        x, y = x[keep], y[keep]
    if x.size < min_points:
        raise FitError(f"need at least {min_points} points, got {x.size}")
    if np.any(y <= 0) or np.any(x <= 0):
        raise FitError("log-log fit needs positive values")
    lx, ly = np.log(x), np.log(y)
    A = np.stack([lx, np.ones_like(lx)], axis=1)
    coef, *_ = np.linalg.lstsq(A, ly, rcond=None)
    fitted = A @ coef
    resid = ly - fitted
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, resid.size, size=(n_boot, resid.size))
    boot_y = fitted[None, :] + resid[draws]
    pinv = np.linalg.pinv(A)
    slopes = (boot_y @ pinv.T)[:, 0]
    lo, hi = np.percentile(slopes, [2.5, 97.5])
    return DecayFit(float(coef[0]), float(0.5 * (hi - lo)), float(coef[1]), int(x.size))


def observed_orders(errors) -> list[float]:
    """log2 ratios of successive errors from a refinement sequence with factor 2."""
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise FitError("need at least two error levels to fit an order")
    with np.errstate(divide="ignore"):
        return list(np.log2(e[:-1] / e[1:]))
