"""Law of the exponential functional I_t = int_0^t exp(-(mu s + sigma W_s)) ds.

Closed-form Laplace transforms in t, numerical inversion, a Monte Carlo
reference and finite-difference residual checks.
"""

__version__ = "0.1.0"

from ._backend import BACKEND
from .errors import (BranchError, EvaluationError, GbmExfunError, NodeFailure, NonConvergence,
                     PoleError)
from .inversion import InversionConfig, InvertedValue, ccdf_at, cdf_at, invert, pdf_at
from .kummer import KummerEval, gamma_ratio, kummer_m, kummer_m_derivative, log_gamma
from .mc import McConfig, McEstimate, empirical_cdf, empirical_pdf, simulate_integrals
from .model import ExponentK, GbmParams, compute_k, derived_a, derived_b
from .pde import ResidualReport, ode_residual, pde_residual
from .transforms import (TransformConfig, TransformValue, ccdf_transform, ccdf_transform_complex,
                         cdf_transform, moment_first, pdf_transform)

__all__ = [
    "BACKEND", "BranchError", "EvaluationError", "GbmExfunError", "NodeFailure", "NonConvergence",
    "PoleError", "InversionConfig", "InvertedValue", "ccdf_at", "cdf_at", "invert", "pdf_at",
    "KummerEval", "gamma_ratio", "kummer_m", "kummer_m_derivative", "log_gamma", "McConfig",
    "McEstimate", "empirical_cdf", "empirical_pdf", "simulate_integrals", "ExponentK", "GbmParams",
    "compute_k", "derived_a", "derived_b", "ResidualReport", "ode_residual", "pde_residual",
    "TransformConfig", "TransformValue", "ccdf_transform", "ccdf_transform_complex",
    "cdf_transform", "moment_first", "pdf_transform",
]
