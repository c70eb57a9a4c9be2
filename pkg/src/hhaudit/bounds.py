"""Trapezoid-gap bounds for (alpha, m)-log-convex |f'|.

Every bound exists in two variants:

* ``AS_PUBLISHED`` evaluates the closed form exactly as printed;
* ``REDERIVED`` evaluates the last integral expression of the corresponding
  proof through :mod:`hhaudit.kernel`.

Where the two disagree (the eta < 1 branch of T1 and both brackets of T3) the
disagreement is reported, not repaired.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import mpmath

from .core import (BoundParams, BoundResult, DomainError, EtaCase, EtaValue, Theorem, Variant)
from .funcmodel import FunctionSpec
from .kernel import abs_exp_moment_from_log, exp_moment_from_log, moment_abs_pow

THEOREMS: Tuple[Theorem, ...] = tuple(Theorem)
VARIANTS: Tuple[Variant, ...] = (Variant.AS_PUBLISHED, Variant.REDERIVED)

# Which convexity hypothesis each bound rests on: (alpha pinned to 1, m pinned to 1).
HYPOTHESIS = {
    Theorem.T1: "am", Theorem.T1_COR_M: "m", Theorem.T1_COR_ALPHA: "alpha",
    Theorem.T2: "am", Theorem.T2_COR_M22: "m", Theorem.T2_COR_ALPHA: "alpha",
    Theorem.T3: "am", Theorem.T3_COR_M: "m", Theorem.T3_COR_ALPHA: "alpha",
    Theorem.T4: "am", Theorem.T4_COR_SYM: "am",
}


@dataclass(frozen=True)
class BoundRequest:
    spec: FunctionSpec
    params: BoundParams
    theorem: Theorem
    variant: Variant


@dataclass(frozen=True)
class BoundInputs:
    """What every bound needs from f: (b - a), M = |f'(b/m)|**m and eta."""

    width: float
    scale: float
    eta: EtaValue
    log_eta: float

    @classmethod
    def from_eta(cls, width: float, scale: float, eta: float) -> "BoundInputs":
        return cls(width, scale, EtaValue.classify(eta), math.log(eta))

    @classmethod
    def from_spec(cls, spec: FunctionSpec, params: BoundParams) -> "BoundInputs":
        a, b, m = params.interval.a, params.interval.b, params.m
        upper = b / m
        spec.check_in_domain(0.0, upper)
        fa = abs(float(spec.fprime(a)))
        fbm = abs(float(spec.fprime(upper)))
        if not (fa > 0.0 and fbm > 0.0):
            raise DomainError(f"|f'| must be positive at a={a} and b/m={upper}")
        log_eta = math.log(fa) - m * math.log(fbm)
        return cls(b - a, fbm ** m, EtaValue.classify(math.exp(log_eta)), log_eta)


def pin(theorem: Theorem, params: BoundParams) -> BoundParams:
    """Parameters a corollary fixes, applied on top of the requested ones."""
    if theorem in (Theorem.T1_COR_M, Theorem.T3_COR_M):
        return dataclasses.replace(params, alpha=1.0)
    if theorem is Theorem.T2_COR_M22:
        return dataclasses.replace(params, alpha=1.0, p=2.0, q=2.0)
    if theorem in (Theorem.T1_COR_ALPHA, Theorem.T2_COR_ALPHA, Theorem.T3_COR_ALPHA):
        return dataclasses.replace(params, m=1.0)
    if theorem is Theorem.T4_COR_SYM:
        params.require(young=True)
        return dataclasses.replace(params, mu2=params.mu1, tau2=params.tau1)
    return params


# --- printed closed forms (eta < 1) -----------------------------------------------------
# The printed expressions have removable singularities at eta = 1 and lose every digit to
# cancellation in double precision there. They are evaluated verbatim in a private
# 40-digit context (a separate context object, so concurrent use is safe).

_MP = mpmath.MPContext()
_MP.dps = 40


def _t1_printed(theorem: Theorem, alpha: float, L: float) -> float:
    mp = _MP
    alpha, L = mp.mpf(alpha), mp.mpf(L)
    if theorem is Theorem.T1_COR_M:
        eta = mp.exp(L)
        return float((-L**2 - 2 * L + 2 * eta - 2) / L**3)
    eta_a = mp.exp(alpha * L)
    if theorem is Theorem.T1_COR_ALPHA:
        return float((4 * eta_a - 4 * alpha * L - 2 * alpha**2 * L**2 - 4)
                     / (2 * alpha**3 * L**3))
    return float((-alpha**2 * L**2 - 2 * alpha * L + 2 * eta_a - 2) / (alpha**3 * L**3))


def _exp_ratio(log_phi: float) -> float:
    """(phi - 1) / ln(phi) as printed, given ln(phi)."""
    lp = _MP.mpf(log_phi)
    return float((_MP.exp(lp) - 1) / lp)


def t3_printed_brackets(log_phi: float) -> Tuple[float, float]:
    """The two bracketed expressions of the T3 bound, as printed, given ln(phi)."""
    mp = _MP
    lp = mp.mpf(log_phi)
    phi = mp.exp(lp)
    first = (2 * phi - 2) / lp**3 - (phi + 1) / lp**2 - (1 - phi) / (2 * lp)
    second = (phi - 1) / lp**2 - (phi + 1) / (2 * lp)
    return float(first), float(second)


# --- value-level evaluation ------------------------------------------------------------

def _na(theorem, variant, inputs, note):
    return BoundResult(theorem, variant, None, inputs.eta.case if inputs else None, note)


def _thm1(th, var, x: BoundInputs, prm: BoundParams):
    if x.eta.case is EtaCase.EQUAL_ONE:
        return x.width / 3 * x.scale, ""
    if var is Variant.AS_PUBLISHED:
        return x.width / 2 * x.scale * _t1_printed(th, prm.alpha, x.log_eta), ""
    return x.width / 2 * x.scale * 2 * abs_exp_moment_from_log(prm.alpha * x.log_eta).value, ""


def _thm2(th, var, x: BoundInputs, prm: BoundParams):
    prm.require(holder=True)
    p, q, alpha = prm.p, prm.q, prm.alpha
    if var is Variant.AS_PUBLISHED:
        if th is Theorem.T2_COR_M22:
            head = x.width * x.scale * math.sqrt(1 / 6)
            if x.eta.case is EtaCase.EQUAL_ONE:
                return head, ""
            return head * _exp_ratio(2 * x.log_eta) ** 0.5, ""
        head = x.width * x.scale * (2 / ((p + 1) * (p + 2))) ** (1 / p)
        if x.eta.case is EtaCase.EQUAL_ONE:
            return head, ""
        return head * _exp_ratio(alpha * q * x.log_eta) ** (1 / q), ""
    head = x.width * x.scale * moment_abs_pow(p) ** (1 / p)
    if x.eta.case is EtaCase.EQUAL_ONE:
        return head, ""
    return head * exp_moment_from_log(alpha * q * x.log_eta).value ** (1 / q), ""


def _thm3(th, var, x: BoundInputs, prm: BoundParams):
    prm.require(power_mean=True)
    q, alpha = prm.q, prm.alpha
    if x.eta.case is EtaCase.EQUAL_ONE:
        return x.width / 3 * x.scale, ""
    head = x.width / 2 * (1 / 3) ** (1 - 1 / q) * x.scale
    if var is Variant.AS_PUBLISHED:
        # T3CorM writes eta(q, q); alpha is pinned to 1 there so the exponent agrees.
        first, second = t3_printed_brackets(alpha * q * x.log_eta)
        if first < 0 or second < 0:
            return None, f"negative printed bracket ({first:.6g}, {second:.6g})"
        return head * (first ** (1 / q) + second ** (1 / q)), ""
    return head * 2 * abs_exp_moment_from_log(alpha * q * x.log_eta).value ** (1 / q), ""


def _t4_printed(th: Theorem, alpha: float, L: Optional[float], prm: BoundParams) -> float:
    """The bracket of T4 (or its symmetric corollary) as printed; L is None when eta = 1."""
    mp = _MP

    def ratio(tau):
        if L is None:
            return mp.mpf(1)
        lp = mp.mpf(alpha) / tau * mp.mpf(L)
        return (mp.exp(lp) - 1) / lp

    if th is Theorem.T4_COR_SYM:
        mu, tau = mp.mpf(prm.mu1), mp.mpf(prm.tau1)
        return float(4 * mu**3 / ((2 * mu + 1) * (mu + 1)) + 2 * tau * ratio(tau))
    total = mp.mpf(0)
    for mu, tau in ((prm.mu1, prm.tau1), (prm.mu2, prm.tau2)):
        mu, tau = mp.mpf(mu), mp.mpf(tau)
        total += 2 * mu**3 / ((2 * mu + 1) * (mu + 1)) + tau * ratio(tau)
    return float(total)


def _thm4(th, var, x: BoundInputs, prm: BoundParams):
    prm.require(young=True)
    alpha = prm.alpha
    eta_one = x.eta.case is EtaCase.EQUAL_ONE
    if var is Variant.AS_PUBLISHED:
        bracket = _t4_printed(th, alpha, None if eta_one else x.log_eta, prm)
        return x.width / 2 * x.scale * bracket, ""
    total = 0.0
    for mu, tau in ((prm.mu1, prm.tau1), (prm.mu2, prm.tau2)):
        total += mu * moment_abs_pow(1 / mu)
        total += tau if eta_one else tau * exp_moment_from_log(alpha / tau * x.log_eta).value
    return x.width / 2 * x.scale * total, ""


_FAMILY: Dict[Theorem, Callable] = {
    Theorem.T1: _thm1, Theorem.T1_COR_M: _thm1, Theorem.T1_COR_ALPHA: _thm1,
    Theorem.T2: _thm2, Theorem.T2_COR_M22: _thm2, Theorem.T2_COR_ALPHA: _thm2,
    Theorem.T3: _thm3, Theorem.T3_COR_M: _thm3, Theorem.T3_COR_ALPHA: _thm3,
    Theorem.T4: _thm4, Theorem.T4_COR_SYM: _thm4,
}


def bound_value(theorem: Theorem, variant: Variant, inputs: BoundInputs,
                params: BoundParams) -> BoundResult:
    """Evaluate one bound from precomputed inputs; ``params`` must already be pinned."""
    if inputs.eta.case is EtaCase.ABOVE_ONE:
        return _na(theorem, variant, inputs, "eta > 1: outside the stated cases")
    value, note = _FAMILY[theorem](theorem, variant, inputs, params)
    if value is None:
        return _na(theorem, variant, inputs, note)
    return BoundResult(theorem, variant, value, inputs.eta.case, note)


def evaluate(req: BoundRequest) -> BoundResult:
    """Evaluate the requested bound for ``req.spec``.

    Raises DomainError for parameters the theorem does not admit or when f' cannot
    be evaluated on [0, b/m]; eta > 1 gives a not-applicable result instead.
    """
    params = pin(req.theorem, req.params)
    inputs = BoundInputs.from_spec(req.spec, params)
    return bound_value(req.theorem, req.variant, inputs, params)


def _op(theorem: Theorem):
    def op(req: BoundRequest) -> BoundResult:
        return evaluate(dataclasses.replace(req, theorem=theorem))
    op.__name__ = f"bound_{theorem.value}"
    op.__doc__ = f"Evaluate {theorem.value} for ``req`` (``req.theorem`` is overridden)."
    return op


thm1_bound = _op(Theorem.T1)
thm1_cor_m = _op(Theorem.T1_COR_M)
thm1_cor_alpha = _op(Theorem.T1_COR_ALPHA)
thm2_bound = _op(Theorem.T2)
thm2_cor_m22 = _op(Theorem.T2_COR_M22)
thm2_cor_alpha = _op(Theorem.T2_COR_ALPHA)
thm3_bound = _op(Theorem.T3)
thm3_cor_m = _op(Theorem.T3_COR_M)
thm3_cor_alpha = _op(Theorem.T3_COR_ALPHA)
thm4_bound = _op(Theorem.T4)
thm4_cor_sym = _op(Theorem.T4_COR_SYM)


def evaluate_all(spec: FunctionSpec, params: BoundParams) -> List[BoundResult]:
    """Every theorem x variant for one (spec, params) cell, in report column order.

    Per-bound failures become not-applicable entries carrying the error message.
    """
    out = []
    for th in THEOREMS:
        for var in VARIANTS:
            try:
                out.append(evaluate(BoundRequest(spec, params, th, var)))
            except DomainError as exc:
                out.append(BoundResult(th, var, None, None, f"error: {exc}"))
    return out


def lookup(results: List[BoundResult], theorem: Theorem, variant: Variant) -> Optional[BoundResult]:
    for r in results:
        if r.theorem is theorem and r.variant is variant:
            return r
    return None
