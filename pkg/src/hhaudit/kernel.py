"""Closed-form moments of the |s - t| and c**t kernels over the unit square.

Each moment is a function of a collapsed base ``c > 0``; near ``c = 1`` the
closed forms suffer cancellation and a Taylor series in ``L = ln c`` is used
instead.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError
from .quad import DEFAULT_REL_TOL_2D, integrate_2d_unit_square

# |c - 1| thresholds below which the series branch is taken.
EXP_SERIES_SWITCH = 1e-4
ABS_EXP_SERIES_SWITCH = 5e-2
_SERIES_RTOL = 1e-17


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    SERIES = "Series"
    ORACLE = "Oracle"


class Kind(enum.Enum):
    ABS_POW = "abs_pow"
    EXP = "exp"
    ABS_EXP = "abs_exp"
    # |s - t| * c**s: the s-weighted twin of ABS_EXP, used for the symmetry check.
    ABS_EXP_S = "abs_exp_s"
    # |s - t|**p * c**t: no closed form, oracle only.
    ABS_POW_EXP = "abs_pow_exp"


@dataclass(frozen=True)
class MomentValue:
    value: float
    method: Method
    error_estimate: float = 0.0


def _check_base(c: float) -> float:
    if not (c > 0.0 and math.isfinite(c)):
        raise DomainError(f"kernel base must be a finite positive number, got {c}")
    return math.log(c)


def moment_abs_pow(p: float) -> float:
    """Double integral of |s - t|**p over the unit square: 2 / ((p+1)(p+2))."""
    if not p > 0.0:
        raise DomainError(f"moment_abs_pow needs p > 0, got {p}")
    return 2.0 / ((p + 1.0) * (p + 2.0))


def exp_moment_from_log(L: float) -> MomentValue:
    """(e**L - 1) / L, the double integral of c**t with L = ln c."""
    if abs(math.expm1(L)) <= EXP_SERIES_SWITCH:
        total, term, n = 1.0, 1.0, 1
        while True:
            term *= L / (n + 1)
            total += term
            if abs(term) <= _SERIES_RTOL * abs(total):
                return MomentValue(total, Method.SERIES)
            n += 1
    return MomentValue(math.expm1(L) / L, Method.CLOSED_FORM)


def moment_exp(c: float) -> float:
    return exp_moment_from_log(_check_base(c)).value


def abs_exp_moment_from_log(L: float) -> MomentValue:
    """Double integral of |s - t| * c**t with L = ln c.

    Integrating out s leaves the weight t**2 - t + 1/2, so the moment is
    sum_n L**n / n! * (1/(n+3) - 1/(n+2) + 1/(2(n+1))) and, in closed form,
    (c-1)/(2L) - (c+1)/L**2 + 2(c-1)/L**3.
    """
    cm1 = math.expm1(L)
    if abs(cm1) <= ABS_EXP_SERIES_SWITCH:
        total, power, n = 0.0, 1.0, 0
        while True:
            term = power * (1.0 / (n + 3) - 1.0 / (n + 2) + 0.5 / (n + 1))
            total += term
            if n > 2 and abs(term) <= _SERIES_RTOL * abs(total):
                return MomentValue(total, Method.SERIES)
            n += 1
            power *= L / n
    c = cm1 + 1.0
    value = cm1 / (2.0 * L) - (c + 1.0) / L**2 + 2.0 * cm1 / L**3
    return MomentValue(value, Method.CLOSED_FORM)


def moment_abs_exp(c: float) -> float:
    return abs_exp_moment_from_log(_check_base(c)).value


def _oracle_integrand(kind: Kind, p: float | None, c: float | None):
    if kind is Kind.ABS_POW:
        if p is None or not p > 0.0:
            raise DomainError("abs_pow oracle needs p > 0")
        return lambda s, t: np.abs(s - t) ** p
    if kind is Kind.ABS_POW_EXP and p is not None and not p > 0.0:
        raise DomainError("abs_pow_exp oracle needs p > 0")
    if c is None:
        raise DomainError(f"{kind.value} oracle needs c")
    L = _check_base(c)
    if kind is Kind.EXP:
        return lambda s, t: np.exp(L * t)
    if kind is Kind.ABS_EXP:
        return lambda s, t: np.abs(s - t) * np.exp(L * t)
    if kind is Kind.ABS_EXP_S:
        return lambda s, t: np.abs(s - t) * np.exp(L * s)
    if p is None:
        raise DomainError("abs_pow_exp oracle needs p")
    return lambda s, t: np.abs(s - t) ** p * np.exp(L * t)


def moment_oracle(kind: Kind | str, *, p: float | None = None, c: float | None = None,
                  rel_tol: float = DEFAULT_REL_TOL_2D) -> MomentValue:
    """Evaluate a moment by 2-D adaptive quadrature instead of its closed form."""
    kind = Kind(kind)
    g = _oracle_integrand(kind, p, c)
    r = integrate_2d_unit_square(g, rel_tol)
    return MomentValue(r.value, Method.ORACLE, r.error_estimate)
