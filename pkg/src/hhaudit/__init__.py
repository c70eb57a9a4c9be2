"""Numerical audit of Hadamard-type trapezoid-gap bounds for (alpha, m)-log-convex derivatives."""

from .core import (BoundParams, BoundResult, DomainError, EtaCase, EtaValue, Interval, Theorem,
                   Variant, eta, eta_general, power_lemma_holds)
from .funcmodel import (FunctionSpec, SamplingPlan, certify_alpha_log_convex,
                        certify_am_log_convex, certify_m_log_convex, evaluate, exp_affine,
                        exp_quadratic, linear_affine, polynomial, tabulated)
from .kernel import moment_abs_exp, moment_abs_pow, moment_exp, moment_oracle
from .quad import integrate_1d, integrate_2d_unit_square

__version__ = "0.1.0"

__all__ = [
    "BoundParams", "BoundResult", "DomainError", "EtaCase", "EtaValue", "Interval", "Theorem",
    "Variant", "eta", "eta_general", "power_lemma_holds",
    "FunctionSpec", "SamplingPlan", "certify_alpha_log_convex", "certify_am_log_convex",
    "certify_m_log_convex", "evaluate", "exp_affine", "exp_quadratic", "linear_affine",
    "polynomial", "tabulated",
    "moment_abs_exp", "moment_abs_pow", "moment_exp", "moment_oracle",
    "integrate_1d", "integrate_2d_unit_square",
]
