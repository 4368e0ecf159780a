"""Numerical laboratory for the Vlasov-Nordstrom system.

Modules: ``geometry`` (hyperboloidal foliation and weights), ``jets`` (exact
derivative jets of test fields), ``fields`` (vector fields acting on jets),
``identities`` (verification suites), ``solver`` (1D grid and 3D particle
evolution), ``diagnostics`` (norms on hyperboloids and fits) and ``cli``.
"""

__version__ = "0.1.0"
