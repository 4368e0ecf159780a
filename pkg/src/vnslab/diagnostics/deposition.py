"""Sampling noise of cloud-in-cell deposition on a static ensemble.

The reference is the CIC-filtered density of the continuous data,

    rho_ref(node) = int hat(x - node) int f0(x, v) dv / v0 dx / dx^3,

with the tensor hat function of one cell.  For gaussian data it factorises
into a closed-form spatial part per axis and a radial momentum integral, so
the measured difference is pure sampling error.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import quad
from scipy.special import erf

from ..solver.config import SimConfig
from ..solver.particle3d import WaveGrid3D, deposit, seed_particles
from .fits import DecayFit, fit_decay


def _hat_gaussian(node: np.ndarray, h: float, center: float, sigma: float) -> np.ndarray:
    """int max(0, 1 - |y - node| / h) exp(-(y - c)^2 / 2 sigma^2) dy / h."""

    s2 = np.sqrt(2.0) * sigma

    def gauss_int(lo, hi):  # int exp(-(y-c)^2 / 2 s^2) dy
        return sigma * np.sqrt(np.pi / 2) * (erf((hi - center) / s2) - erf((lo - center) / s2))

    def first_moment(lo, hi):  # int (y - c) exp(...) dy
        return sigma**2 * (np.exp(-((lo - center) ** 2) / (2 * sigma**2)) - np.exp(-((hi - center) ** 2) / (2 * sigma**2)))

    lo, mid, hi = node - h, node, node + h
    # rising piece (y - lo) / h on [lo, mid], falling piece (hi - y) / h on [mid, hi]
    rise = (first_moment(lo, mid) + (center - lo) * gauss_int(lo, mid)) / h
    fall = ((hi - center) * gauss_int(mid, hi) - first_moment(mid, hi)) / h
    return (rise + fall) / h


def momentum_factor(sigma_v: float) -> float:
    """int exp(-|v|^2 / 2 sigma_v^2) / v0 dv over R^3."""
    val, _ = quad(lambda r: 4 * np.pi * r**2 * np.exp(-0.5 * (r / sigma_v) ** 2) / np.sqrt(1 + r**2), 0, np.inf,
                  epsabs=0, epsrel=1e-13)
    return val


def cic_reference(cfg: SimConfig) -> np.ndarray:
    """Exact CIC-filtered int f0 dv / v0 on the wave nodes (data centred at the origin in v)."""
    if cfg.f_center_v != 0:
        raise ValueError("the closed-form reference assumes f_center_v = 0")
    wave = WaveGrid3D.empty(cfg)
    g = _hat_gaussian(wave.nodes, wave.dx, cfg.f_center_x, cfg.f_width_x)
    return cfg.epsilon * momentum_factor(cfg.f_width_v) * np.einsum("i,j,k->ijk", g, g, g)


@dataclass(frozen=True)
class NoiseStudy:
    counts: np.ndarray
    errors: np.ndarray  # relative l2 deviation from the reference
    fit: DecayFit


def deposition_noise(cfg: SimConfig, counts=(2**12, 2**13, 2**14, 2**15, 2**16, 2**17, 2**18, 2**19),
                     workers: int = 1) -> NoiseStudy:
    """Relative l2 deposition error against the closed-form reference for each particle count."""
    ref = cic_reference(cfg)
    wave = WaveGrid3D.empty(cfg)
    errors = []
    for n in counts:
        ens = seed_particles(replace(cfg, n_particles=int(n)))
        rho = deposit(ens, wave, workers)
        errors.append(np.linalg.norm(rho - ref) / np.linalg.norm(ref))
    counts = np.asarray(counts, dtype=float)
    errors = np.asarray(errors)
    return NoiseStudy(counts, errors, fit_decay(counts, errors, min_points=min(8, counts.size)))
