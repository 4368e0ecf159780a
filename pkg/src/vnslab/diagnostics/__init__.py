"""Norms, energies and identity residuals on hyperboloids, plus power-law fits."""

from .fits import DecayFit, FitError, fit_decay, observed_orders
from .free_transport import FreeGaussian, free_transport_decay, ks_modified_check, l2_free
from .hyperboloid import HyperboloidQuadrature, build_quadrature
from .report import NormRow, read_norm_csv, write_norm_csv
from .series1d import GridSeries1D, HorizonError, chi_integral_1d, energy_f_1d, energy_identity_residual, l2_1d
from .series3d import ParticleSeries3D, ResolutionError, crossing_tally, energy_wave_3d, l2_density_3d

__all__ = [
    "DecayFit", "FitError", "FreeGaussian", "GridSeries1D", "HorizonError", "HyperboloidQuadrature", "NormRow",
    "ParticleSeries3D", "ResolutionError", "build_quadrature", "chi_integral_1d", "crossing_tally",
    "energy_f_1d", "energy_identity_residual", "energy_wave_3d", "fit_decay", "free_transport_decay",
    "ks_modified_check", "l2_1d", "l2_density_3d", "l2_free", "observed_orders", "read_norm_csv",
    "write_norm_csv",
]
