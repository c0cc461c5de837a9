"""Numerical oracles: Gaussian/Wick moments, regularized integrals, Fresnel constants."""

from .quadrature import QuadratureConfig
from .gaussian import gauss_normalized, wick_check, wick_closed_forms, wick_moments
from .regularized import (PlaneFunction, RegIntSpec, c_coefficient, direct_integral,
                          fourier_const_C, gaussian, gaussian_reference, gaussian_times,
                          minimal_depth, reg_integral, reg_integral_parts)
from .fresnel import chirp_transform, fit_constant, gaussian_fourier_check
