"""Quasi-interpolation with hyperbolic-tangent radial basis functions.

Modules
-------
specfun
    Gamma, polygamma, Bessel functions and alternating-series acceleration.
kernels
    Radial kernel descriptors and evaluation.
gft
    Generalised Fourier transforms and their expansions at the origin.
strangfix
    Moment systems, periodic cancelling factors and Strang-Fix checks.
quasi
    Quasi-Lagrange functions, the lattice quasi-interpolant and error metrics.
experiments, cli
    Experiment registry and the command line front end.
"""
__version__ = "0.1.0"

from .kernels import Family, RadialKernel  # noqa: E402
from .gft import RadialExpansion, classical_gft, kernel_transform  # noqa: E402
from .strangfix import CoeffSeq, quasi_lagrange_coeffs  # noqa: E402
from .quasi import ErrorReport, QuasiInterpolant, QuasiLagrange, error_report  # noqa: E402

__all__ = [
    "__version__",
    "Family",
    "RadialKernel",
    "RadialExpansion",
    "classical_gft",
    "kernel_transform",
    "CoeffSeq",
    "quasi_lagrange_coeffs",
    "QuasiLagrange",
    "QuasiInterpolant",
    "ErrorReport",
    "error_report",
]
