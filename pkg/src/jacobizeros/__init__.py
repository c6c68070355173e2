"""Zeros of orthonormal polynomials on the real line from Jacobi coefficients."""

from .coeffs import (
    CoefficientSequence,
    SupportModel,
    beta,
    make_constant,
    make_periodic2,
    make_rank_one,
    make_section4,
    strip,
)
from .polyeval import ScaledPolyValue, eval_p, eval_q, kernel_cd, kernel_direct, leading_coeff
from .tridiag import count_zeros_in, eigenvalues, gauss_quadrature, sturm_count, truncate, zeros
from .theorems import certify_theorem1, certify_theorem2, delta_radius

__version__ = "0.1.0"
