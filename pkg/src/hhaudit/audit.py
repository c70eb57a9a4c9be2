"""Ground-truth measurements and the per-cell audit / sweep harness."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import bounds as B
from .core import BoundParams, BoundResult, DomainError, EtaCase, Interval, Theorem, Variant
from .funcmodel import (DEFAULT_PLAN, Certificate, FunctionSpec, SamplingPlan,
                        certify_am_log_convex)
from .quad import DEFAULT_REL_TOL_1D, DEFAULT_REL_TOL_2D, integrate_1d, integrate_2d_unit_square

HH_SLACK = 1e-10
VIOLATION_RTOL = 1e-9


class ConvergenceError(ArithmeticError):
    """Quadrature hit its refinement cap; ``partial`` holds the unconverged value."""

    def __init__(self, what: str, partial: float, error_estimate: float):
        super().__init__(f"{what}: quadrature did not converge "
                         f"(partial {partial!r}, error estimate {error_estimate:.3g})")
        self.partial = partial
        self.error_estimate = error_estimate


def _mean_increment(spec: FunctionSpec, interval: Interval, rel_tol: float):
    """Mean of f - f(a) over [a, b]; shifting by f(a) leaves every gap unchanged."""
    spec.check_in_domain(interval.a, interval.b)
    a = interval.a
    r = integrate_1d(lambda x: spec.increment(a, x), a, interval.b, rel_tol)
    return r.value / interval.width, r


def _signed_gap(spec: FunctionSpec, interval: Interval, rel_tol: float):
    mean, r = _mean_increment(spec, interval, rel_tol)
    return 0.5 * float(spec.increment(interval.a, interval.b)) - mean, r


def trapezoid_gap(spec: FunctionSpec, interval: Interval,
                  rel_tol: float = DEFAULT_REL_TOL_1D) -> float:
    """|(f(a) + f(b))/2 - mean of f over [a, b]|, the left side of every bound."""
    signed, r = _signed_gap(spec, interval, rel_tol)
    gap = abs(signed)
    if not r.converged:
        raise ConvergenceError("trapezoid gap", gap, r.error_estimate / interval.width)
    return gap


@dataclass(frozen=True)
class Lemma1Check:
    lhs: float
    rhs: float
    residual: float
    error_estimate: float


def lemma1_check(spec: FunctionSpec, interval: Interval, rel_tol: float = DEFAULT_REL_TOL_2D,
                 rel_tol_1d: float = DEFAULT_REL_TOL_1D) -> Lemma1Check:
    """Compare both sides of the integration-by-parts identity for the trapezoid gap.

    The left side integrates f directly, the right side integrates
    [f'(ta + (1-t)b) - f'(sa + (1-s)b)] (s - t) over the unit square.
    """
    a, b = interval.a, interval.b
    lhs, r1 = _signed_gap(spec, interval, rel_tol_1d)

    def kernel(s, t):
        return (spec.fprime(t * a + (1 - t) * b) - spec.fprime(s * a + (1 - s) * b)) * (s - t)

    r2 = integrate_2d_unit_square(kernel, rel_tol)
    rhs = 0.5 * (b - a) * r2.value
    err = r1.error_estimate / (b - a) + 0.5 * (b - a) * r2.error_estimate
    if not (r1.converged and r2.converged):
        raise ConvergenceError("gap identity residual", abs(lhs - rhs), err)
    return Lemma1Check(lhs, rhs, abs(lhs - rhs), err)


def lemma1_residual(spec: FunctionSpec, interval: Interval,
                    rel_tol: float = DEFAULT_REL_TOL_2D) -> float:
    return lemma1_check(spec, interval, rel_tol).residual


def hh_sanity(spec: FunctionSpec, interval: Interval) -> bool:
    """Classical Hermite-Hadamard chain f(mid) <= mean f <= (f(a) + f(b))/2.

    Only meaningful for convex f; the caller is responsible for that.
    """
    mean, r = _mean_increment(spec, interval, DEFAULT_REL_TOL_1D)
    if not r.converged:
        raise ConvergenceError("Hermite-Hadamard check", mean, r.error_estimate)
    a = interval.a
    mid = float(spec.increment(a, 0.5 * (a + interval.b)))
    ends = 0.5 * float(spec.increment(a, interval.b))
    return mid <= mean + HH_SLACK and mean <= ends + HH_SLACK


# --- per-cell audit ---------------------------------------------------------------------

@dataclass(frozen=True)
class AuditOptions:
    rel_tol_1d: float = DEFAULT_REL_TOL_1D
    rel_tol_2d: float = DEFAULT_REL_TOL_2D
    sampler: SamplingPlan = DEFAULT_PLAN
    certify: bool = True
    lemma1: bool = True


def hypothesis_key(theorem: Theorem, params: BoundParams) -> Tuple[str, float]:
    """(kind, power): which deformation of log-convexity, applied to |f'|**power."""
    kind = B.HYPOTHESIS[theorem]
    if theorem is Theorem.T2_COR_M22:
        return kind, 2.0
    if theorem.value.startswith(("T2", "T3")) and params.q is not None:
        return kind, float(params.q)
    return kind, 1.0


def _certify(spec: FunctionSpec, params: BoundParams, kind: str, power: float,
             sampler: SamplingPlan) -> Certificate:
    a, m = params.alpha, params.m
    b = params.interval.b
    if kind == "am":
        return certify_am_log_convex(spec, a, m, b / m, sampler, power)
    if kind == "m":
        return certify_am_log_convex(spec, 1.0, m, b / m, sampler, power)
    return certify_am_log_convex(spec, a, 1.0, b, sampler, power)


@dataclass
class BoundAudit:
    result: BoundResult
    tightness: Optional[float]
    violation: bool
    hypothesis: Tuple[str, float]
    certified: Optional[bool]

    @property
    def certified_violation(self) -> bool:
        # A violation only refutes a bound whose hypothesis survived falsification.
        return self.violation and self.certified is not False


@dataclass
class AuditRecord:
    spec: FunctionSpec
    params: BoundParams
    eta: Optional[float]
    eta_case: Optional[EtaCase]
    gap: float
    gap_converged: bool
    lemma1_residual: Optional[float]
    lemma1_converged: bool
    bounds: List[BoundAudit]
    certificates: Dict[Tuple[str, float], Certificate] = field(default_factory=dict)
    errors: List[str] = field(default_factory=list)

    @property
    def family(self) -> str:
        return self.spec.family.value

    @property
    def certifier_status(self) -> str:
        if any(e.startswith("certifier") for e in self.errors):
            return "error"
        if not self.certificates:
            return "skipped"
        failing = sorted({k for (k, _), c in self.certificates.items() if not c.ok})
        if not failing:
            return "ok"
        return "counterexample:" + "+".join(failing)

    @property
    def converged(self) -> bool:
        return self.gap_converged and self.lemma1_converged

    def bound(self, theorem: Theorem, variant: Variant) -> BoundAudit:
        for ba in self.bounds:
            if ba.result.theorem is theorem and ba.result.variant is variant:
                return ba
        raise KeyError((theorem, variant))


def run_audit(spec: FunctionSpec, params: BoundParams,
              options: AuditOptions = AuditOptions()) -> AuditRecord:
    """Certify hypotheses, measure the gap and its identity residual, evaluate all bounds.

    Sub-failures are recorded on the record rather than raised.
    """
    errors: List[str] = []
    gap_ok = True
    try:
        gap = trapezoid_gap(spec, params.interval, options.rel_tol_1d)
    except ConvergenceError as exc:
        gap, gap_ok = exc.partial, False
        errors.append(f"gap: {exc}")

    residual, l1_ok = None, True
    if options.lemma1:
        try:
            residual = lemma1_check(spec, params.interval, options.rel_tol_2d,
                                    options.rel_tol_1d).residual
        except ConvergenceError as exc:
            residual, l1_ok = exc.partial, False
            errors.append(f"lemma1: {exc}")
        except DomainError as exc:
            errors.append(f"lemma1: {exc}")

    try:
        inputs = B.BoundInputs.from_spec(spec, params)
        eta_val, eta_case = inputs.eta.base, inputs.eta.case
    except DomainError as exc:
        eta_val, eta_case = None, None
        errors.append(f"eta: {exc}")

    certificates: Dict[Tuple[str, float], Certificate] = {}
    audits = []
    for res in B.evaluate_all(spec, params):
        try:
            key = hypothesis_key(res.theorem, B.pin(res.theorem, params))
        except DomainError:
            key = hypothesis_key(res.theorem, params)
        certified = None
        if options.certify:
            if key not in certificates:
                try:
                    certificates[key] = _certify(spec, params, key[0], key[1], options.sampler)
                except DomainError as exc:
                    errors.append(f"certifier {key[0]}: {exc}")
                    certificates[key] = None
            cert = certificates[key]
            certified = None if cert is None else cert.ok
        if res.applicable:
            tightness = gap / res.value if res.value > 0 else math.inf
            violation = gap > res.value + VIOLATION_RTOL * max(1.0, res.value)
        else:
            tightness, violation = None, False
        audits.append(BoundAudit(res, tightness, violation, key, certified))
    certificates = {k: c for k, c in certificates.items() if c is not None}
    return AuditRecord(spec, params, eta_val, eta_case, gap, gap_ok, residual, l1_ok,
                       audits, certificates, errors)


# --- sweeps -----------------------------------------------------------------------------

@dataclass(frozen=True)
class FunctionEntry:
    name: str
    spec: FunctionSpec
    assert_valid: bool = False


@dataclass(frozen=True)
class Grid:
    a: Sequence[float]
    b: Sequence[float]
    alpha: Sequence[float]
    m: Sequence[float]
    q: Sequence[float] = (2.0,)
    mu1: Sequence[float] = (0.5,)
    mu2: Optional[Sequence[float]] = None


def conjugate(q: float) -> Optional[float]:
    return None if q == 1.0 else q / (q - 1.0)


@dataclass(frozen=True)
class Cell:
    index: int
    function: FunctionEntry
    params: BoundParams


def cells(functions: Sequence[FunctionEntry], grid: Grid) -> List[Cell]:
    """Cartesian product in a fixed order; cells with a >= b are skipped."""
    out = []
    mu2s = grid.mu2 if grid.mu2 is not None else [None]
    for fn, a, b, alpha, m, q, mu1, mu2 in itertools.product(
            functions, grid.a, grid.b, grid.alpha, grid.m, grid.q, grid.mu1, mu2s):
        if not a < b:
            continue
        mu2 = mu1 if mu2 is None else mu2
        params = BoundParams(Interval(a, b), alpha, m, conjugate(q), q,
                             mu1, 1.0 - mu1, mu2, 1.0 - mu2)
        out.append(Cell(len(out), fn, params))
    return out


@dataclass
class SweepResult:
    records: List[AuditRecord]
    entries: List[FunctionEntry]
    summary: dict
    exit_code: int


def summarize(records: Sequence[AuditRecord], entries: Sequence[FunctionEntry],
              strict_published: bool = False) -> Tuple[dict, int]:
    per = {}
    for th in B.THEOREMS:
        for var in B.VARIANTS:
            ts = []
            stats = {"applicable": 0, "violations": 0, "certified_violations": 0}
            for rec in records:
                ba = rec.bound(th, var)
                if ba.result.applicable:
                    stats["applicable"] += 1
                    ts.append(ba.tightness)
                stats["violations"] += ba.violation
                stats["certified_violations"] += ba.certified_violation
            stats["min_tightness"] = min(ts) if ts else None
            stats["max_tightness"] = max(ts) if ts else None
            per[f"{th.value}/{var.value}"] = stats

    asserted_bad = sum(1 for rec, fn in zip(records, entries)
                       if fn.assert_valid and rec.certifier_status.startswith("counterexample"))
    nonconverged = sum(1 for rec in records if not rec.converged)
    rederived_bad = sum(v["certified_violations"] for k, v in per.items()
                        if k.endswith(Variant.REDERIVED.value))
    published_bad = sum(v["certified_violations"] for k, v in per.items()
                        if k.endswith(Variant.AS_PUBLISHED.value))
    summary = {
        "cells": len(records),
        "nonconverged": nonconverged,
        "rederived_certified_violations": rederived_bad,
        "published_certified_violations": published_bad,
        "asserted_functions_with_counterexample": asserted_bad,
        "bounds": per,
    }
    if nonconverged:
        code = 3
    elif rederived_bad or asserted_bad or (strict_published and published_bad):
        code = 1
    else:
        code = 0
    return summary, code


def sweep(functions: Sequence[FunctionEntry], grid: Grid,
          options: AuditOptions = AuditOptions(), threads: int = 1,
          strict_published: bool = False) -> SweepResult:
    """Audit every grid cell. Results are collected in cell order regardless of threads."""
    todo = cells(functions, grid)
    if threads <= 1:
        records = [run_audit(c.function.spec, c.params, options) for c in todo]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda c: run_audit(c.function.spec, c.params, options), todo))
    entries = [c.function for c in todo]
    summary, code = summarize(records, entries, strict_published)
    return SweepResult(records, entries, summary, code)
