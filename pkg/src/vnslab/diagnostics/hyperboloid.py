"""Truncated quadratures on the hyperboloids H_rho in three dimensions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..quadrature import HyperboloidGrid, hyperboloid_grid
from ..wave_energy import flux_density
from .series1d import HorizonError


@dataclass(frozen=True)
class HyperboloidQuadrature:
    grid: HyperboloidGrid
    r_requested: float

    @property
    def rho(self) -> float:
        return self.grid.rho

    @property
    def r_max(self) -> float:
        return self.grid.r_max

    @property
    def measure(self) -> float:
        return float(self.grid.weights.sum())

    def integrate(self, values: np.ndarray) -> float:
        return float(self.grid.weights @ values)


def horizon_radius(rho: float, t_max: float) -> float:
    if rho > t_max:
        raise HorizonError(f"rho={rho} lies above the last stored time {t_max}")
    return float(np.sqrt(t_max**2 - rho**2))


def build_quadrature(rho: float, n_r: int = 24, n_angles: int = 8, r_max: float = 4.0, t_max: float | None = None,
                     r_panels: int = 4) -> HyperboloidQuadrature:
    """Gauss-Legendre in r times a product rule on the sphere, truncated at r_max.

    With ``t_max`` the truncation must stay below the stored time range,
    otherwise :class:`HorizonError` is raised.
    """
    if t_max is not None and r_max > horizon_radius(rho, t_max) * (1 + 1e-12):
        raise HorizonError(f"r_max={r_max} exceeds the horizon of H_{rho} at t={t_max}")
    return HyperboloidQuadrature(hyperboloid_grid(rho, r_max, n_r, r_panels, n_angles), r_max)


def measure_closed_form(rho: float, r_max: float) -> float:
    """4 pi int_0^R rho r^2 / sqrt(rho^2 + r^2) dr."""
    s = np.sqrt(rho**2 + r_max**2)
    return float(4 * np.pi * rho * 0.5 * (r_max * s - rho**2 * np.arcsinh(r_max / rho)))


# -- coverage of truncated wave energies ---------------------------------------------

def _free_wave_radial(t, r, amplitude, width, t0):
    """phi_t and phi_r of the free wave with phi = A exp(-r^2 / 2 w^2), phi_t = 0 at t0.

    phi = (a(r - tau) + a(r + tau)) / 2r with a(s) = s A exp(-s^2 / 2 w^2), tau = t - t0.
    """
    tau = t - t0

    def a(s):
        return s * amplitude * np.exp(-0.5 * (s / width) ** 2)

    def da(s):
        return amplitude * np.exp(-0.5 * (s / width) ** 2) * (1 - (s / width) ** 2)

    phi = (a(r - tau) + a(r + tau)) / (2 * r)
    phi_t = (da(r + tau) - da(r - tau)) / (2 * r)
    phi_r = (da(r - tau) + da(r + tau)) / (2 * r) - phi / r
    return phi_t, phi_r


def free_wave_energy(rho: float, r_max: float, amplitude: float, width: float, t0: float = 1.0,
                     n_r: int = 64, panels: int = 16) -> float:
    """E_0 of the free gaussian wave through H_rho truncated at r_max (radial quadrature)."""
    grid = hyperboloid_grid(rho, r_max, n_r, panels, 1, 1)  # one direction with weight 4 pi
    r = grid.r
    pt, pr = _free_wave_radial(grid.t, r, amplitude, width, t0)
    grad = np.stack([pt, pr, np.zeros_like(r), np.zeros_like(r)], axis=1)
    x = np.stack([r, np.zeros_like(r), np.zeros_like(r)], axis=1)
    return grid.weights @ flux_density(grad, grid.t, x)


def wave_coverage(rho: float, r_max: float, amplitude: float, width: float, t0: float = 1.0) -> float:
    """Fraction of the free-wave energy flux through H_rho that lies within r_max.

    The outgoing pulse crosses H_rho near r = (rho^2 - u^2) / 2u with u the
    pulse retarded time, so the full integral is carried far enough out to
    capture it.
    """
    if amplitude == 0:
        return 1.0
    u_min = max(1e-2, (t0 - 6 * width) if t0 > 6 * width else 1e-2)
    r_full = max(r_max, (rho**2 - u_min**2) / (2 * u_min) + 6 * width)
    full = free_wave_energy(rho, r_full, amplitude, width, t0, n_r=64, panels=64)
    part = free_wave_energy(rho, r_max, amplitude, width, t0)
    return float(min(1.0, part / full)) if full > 0 else 1.0
