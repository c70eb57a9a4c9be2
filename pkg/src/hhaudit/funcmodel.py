"""Test-function families and sampling-based log-convexity certifiers.

The certifiers only ever *falsify*: they search a deterministic grid plus a
seeded cloud of random triples for a violation of the defining inequality and
report the lexicographically smallest violating (x, y, t).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import special

from .core import DomainError, Interval

DEFAULT_DOMAIN = Interval(0.0, 64.0)
DEFAULT_SEED = 0x5EED
# Relative excess lhs/rhs - 1 above which a sample counts as a counterexample.
CERT_TOL = 1e-10


class Family(enum.Enum):
    EXP_AFFINE = "exp_affine"
    EXP_QUADRATIC = "exp_quadratic"
    LINEAR_AFFINE = "linear_affine"
    POLYNOMIAL = "polynomial"
    TABULATED = "tabulated"


_PARAM_NAMES = {
    Family.EXP_AFFINE: ("A", "lam", "C"),
    Family.EXP_QUADRATIC: ("beta", "gamma", "delta", "C"),
    Family.LINEAR_AFFINE: ("slope", "intercept"),
}
_PARAM_DEFAULTS = {
    Family.EXP_AFFINE: {"A": 1.0, "lam": 1.0, "C": 0.0},
    Family.EXP_QUADRATIC: {"beta": 1.0, "gamma": 0.0, "delta": 0.0, "C": 1.0},
    Family.LINEAR_AFFINE: {"slope": 1.0, "intercept": 1.0},
}


@dataclass(frozen=True)
class FunctionSpec:
    """A differentiable f on ``domain`` with closed-form f' (except tabulated data).

    Build instances with the family constructors below rather than directly.
    """

    family: Family
    params: Tuple[Tuple[str, float], ...]
    domain: Interval = DEFAULT_DOMAIN
    nodes: Optional[Tuple[float, ...]] = None
    values: Optional[Tuple[float, ...]] = None
    _slopes: Optional[Tuple[float, ...]] = field(default=None, repr=False, compare=False)

    @property
    def approximate_derivative(self) -> bool:
        return self.family is Family.TABULATED

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    def describe(self) -> str:
        if self.family is Family.TABULATED:
            return f"n={len(self.nodes)}"
        return ";".join(f"{k}={v!r}" for k, v in self.params)

    def f(self, x):
        return _F[self.family](self, np.asarray(x, dtype=float))

    def fprime(self, x):
        return _FPRIME[self.family](self, np.asarray(x, dtype=float))

    def increment(self, x0: float, x):
        """f(x) - f(x0), evaluated without forming f itself where that would cancel.

        Trapezoid gaps do not see additive constants, and f can be huge next to
        them (exp_affine with small lam is f ~ A/lam).
        """
        return _INC[self.family](self, float(x0), np.asarray(x, dtype=float))

    def check_in_domain(self, lo: float, hi: float) -> None:
        if not self.domain.contains(lo, hi):
            raise DomainError(
                f"[{lo}, {hi}] is outside the domain [{self.domain.a}, {self.domain.b}] "
                f"of {self.family.value}")


def _p(spec, name):
    return dict(spec.params)[name]


def _exp_affine_f(spec, x):
    A, lam, C = _p(spec, "A"), _p(spec, "lam"), _p(spec, "C")
    if lam == 0.0:
        return A * x + C
    return (A / lam) * np.exp(lam * x) + C


def _exp_affine_fp(spec, x):
    A, lam = _p(spec, "A"), _p(spec, "lam")
    return A * np.exp(lam * x)


def _exp_quadratic_fp(spec, x):
    beta, gamma, delta = _p(spec, "beta"), _p(spec, "gamma"), _p(spec, "delta")
    return np.exp(beta * x * x + gamma * x + delta)


def _exp_quadratic_f(spec, x):
    # f(0) = C plus the integral of f' from 0, by completing the square.
    return _p(spec, "C") + _exp_quadratic_inc(spec, 0.0, x)


def _exp_affine_inc(spec, x0, x):
    A, lam = _p(spec, "A"), _p(spec, "lam")
    if lam == 0.0:
        return A * (x - x0)
    return A * math.exp(lam * x0) * np.expm1(lam * (x - x0)) / lam


def _exp_quadratic_inc(spec, x0, x):
    beta, gamma, delta = _p(spec, "beta"), _p(spec, "gamma"), _p(spec, "delta")
    if beta == 0.0:
        if gamma == 0.0:
            return math.exp(delta) * (x - x0)
        return math.exp(delta + gamma * x0) * np.expm1(gamma * (x - x0)) / gamma
    # With u = r (x + h) the exponent of f' is k + sign(beta) u^2, so scaling the
    # special functions by f' itself keeps every factor finite.
    h = gamma / (2.0 * beta)
    r = math.sqrt(abs(beta))
    u, v = r * (x + h), r * (x0 + h)
    fx, fx0 = _exp_quadratic_fp(spec, x), float(_exp_quadratic_fp(spec, np.asarray(x0)))
    if beta > 0.0:
        return (fx * special.dawsn(u) - fx0 * special.dawsn(v)) / r
    half = math.sqrt(math.pi) / (2.0 * r)
    with np.errstate(over="ignore", invalid="ignore"):
        pos = half * (fx0 * special.erfcx(v) - fx * special.erfcx(u))
        neg = half * (fx * special.erfcx(-u) - fx0 * special.erfcx(-v))
        k = delta - gamma * gamma / (4.0 * beta)
        mixed = half * math.exp(k) * (special.erf(u) - special.erf(v))
    return np.where((u >= 0) & (v >= 0), pos, np.where((u <= 0) & (v <= 0), neg, mixed))


def _direct_inc(spec, x0, x):
    return spec.f(x) - float(spec.f(x0))


def _linear_f(spec, x):
    return _p(spec, "slope") * x + _p(spec, "intercept")


def _linear_fp(spec, x):
    return np.full_like(x, _p(spec, "slope"))


def _poly_coeffs(spec):
    return np.array([v for _, v in spec.params])


def _poly_f(spec, x):
    return np.polynomial.polynomial.polyval(x, _poly_coeffs(spec))


def _poly_fp(spec, x):
    return np.polynomial.polynomial.polyval(x, np.polynomial.polynomial.polyder(_poly_coeffs(spec)))


def _tab_f(spec, x):
    return np.interp(x, spec.nodes, spec.values)


def _tab_fp(spec, x):
    return np.interp(x, spec.nodes, spec._slopes)


_F = {
    Family.EXP_AFFINE: _exp_affine_f,
    Family.EXP_QUADRATIC: _exp_quadratic_f,
    Family.LINEAR_AFFINE: _linear_f,
    Family.POLYNOMIAL: _poly_f,
    Family.TABULATED: _tab_f,
}
_FPRIME = {
    Family.EXP_AFFINE: _exp_affine_fp,
    Family.EXP_QUADRATIC: _exp_quadratic_fp,
    Family.LINEAR_AFFINE: _linear_fp,
    Family.POLYNOMIAL: _poly_fp,
    Family.TABULATED: _tab_fp,
}


_INC = {
    Family.EXP_AFFINE: _exp_affine_inc,
    Family.EXP_QUADRATIC: _exp_quadratic_inc,
    Family.LINEAR_AFFINE: lambda spec, x0, x: _p(spec, "slope") * (x - x0),
    Family.POLYNOMIAL: _direct_inc,
    Family.TABULATED: _direct_inc,
}


def _require_positive_f(spec: FunctionSpec, points) -> FunctionSpec:
    fx = spec.f(np.asarray(points, dtype=float))
    if not np.all(fx > 0.0):
        raise DomainError(f"{spec.family.value} with {spec.describe()} is not positive on "
                          f"[{spec.domain.a}, {spec.domain.b}]")
    return spec


def exp_affine(A: float = 1.0, lam: float = 1.0, C: float = 0.0,
               domain: Interval = DEFAULT_DOMAIN) -> FunctionSpec:
    """f' = A exp(lam x). f is increasing, so positivity is checked at the left end."""
    if not A > 0.0:
        raise DomainError(f"exp_affine needs A > 0, got {A}")
    spec = FunctionSpec(Family.EXP_AFFINE, (("A", A), ("lam", lam), ("C", C)), domain)
    return _require_positive_f(spec, [domain.a])


def exp_quadratic(beta: float = 1.0, gamma: float = 0.0, delta: float = 0.0, C: float = 1.0,
                  domain: Interval = DEFAULT_DOMAIN, *,
                  allow_nonconvex: bool = False) -> FunctionSpec:
    """f' = exp(beta x^2 + gamma x + delta), f(0) = C.

    ``beta < 0`` makes log f' concave and is rejected unless ``allow_nonconvex``
    is set (useful for exercising the certifiers).
    """
    if beta < 0.0 and not allow_nonconvex:
        raise DomainError(f"exp_quadratic needs beta >= 0, got {beta}")
    spec = FunctionSpec(Family.EXP_QUADRATIC,
                        (("beta", beta), ("gamma", gamma), ("delta", delta), ("C", C)), domain)
    return _require_positive_f(spec, [domain.a])


def linear_affine(slope: float = 1.0, intercept: float = 1.0,
                  domain: Interval = DEFAULT_DOMAIN) -> FunctionSpec:
    if slope == 0.0:
        raise DomainError("linear_affine needs a nonzero slope")
    spec = FunctionSpec(Family.LINEAR_AFFINE, (("slope", slope), ("intercept", intercept)), domain)
    return _require_positive_f(spec, [domain.a, domain.b])


def polynomial(coeffs: Sequence[float], domain: Interval = DEFAULT_DOMAIN) -> FunctionSpec:
    """sum_k coeffs[k] x**k. Positivity is not enforced; intended for identity checks."""
    if len(coeffs) == 0:
        raise DomainError("polynomial needs at least one coefficient")
    params = tuple((f"c{k}", float(c)) for k, c in enumerate(coeffs))
    return FunctionSpec(Family.POLYNOMIAL, params, domain)


def tabulated(nodes: Sequence[float], values: Sequence[float]) -> FunctionSpec:
    """Piecewise-linear f through the samples; f' is interpolated from
    second-order finite differences at the nodes and is only approximate."""
    x = np.asarray(nodes, dtype=float)
    y = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.shape != y.shape or x.size < 3:
        raise DomainError("tabulated needs matching 1-D node and value lists of length >= 3")
    if not np.all(np.diff(x) > 0):
        raise DomainError("tabulated nodes must be strictly increasing")
    if not np.all(y > 0):
        raise DomainError("tabulated values must be positive")
    slopes = np.gradient(y, x, edge_order=2)
    return FunctionSpec(Family.TABULATED, (), Interval(float(x[0]), float(x[-1])),
                        tuple(x.tolist()), tuple(y.tolist()), tuple(slopes.tolist()))


def from_name(name: str, params: Mapping[str, float],
              domain: Optional[Interval] = None) -> FunctionSpec:
    """Build a family member from its name and a parameter mapping (config/CLI path)."""
    try:
        family = Family(name)
    except ValueError:
        raise DomainError(f"unknown function family {name!r}; expected one of "
                          f"{[f.value for f in Family]}") from None
    kwargs = {} if domain is None else {"domain": domain}
    if family is Family.POLYNOMIAL:
        keys = sorted(params, key=lambda k: int(k[1:]) if k[:1] == "c" and k[1:].isdigit() else -1)
        if any(not (k[:1] == "c" and k[1:].isdigit()) for k in keys):
            raise DomainError("polynomial parameters are named c0, c1, ...")
        degree = max(int(k[1:]) for k in keys) if keys else -1
        coeffs = [params.get(f"c{k}", 0.0) for k in range(degree + 1)]
        return polynomial(coeffs, **kwargs)
    if family is Family.TABULATED:
        raise DomainError("tabulated functions are built from node/value lists, not parameters")
    unknown = set(params) - set(_PARAM_NAMES[family])
    if unknown:
        raise DomainError(f"unknown parameters {sorted(unknown)} for {name}; "
                          f"expected {list(_PARAM_NAMES[family])}")
    merged = {**_PARAM_DEFAULTS[family], **params}
    ctor = {Family.EXP_AFFINE: exp_affine, Family.EXP_QUADRATIC: exp_quadratic,
            Family.LINEAR_AFFINE: linear_affine}[family]
    return ctor(**merged, **kwargs)


def evaluate(spec: FunctionSpec, x: float) -> Tuple[float, float]:
    """Return (f(x), f'(x)). Exact for analytic families, approximate for tabulated."""
    if not spec.domain.a <= x <= spec.domain.b:
        raise DomainError(f"x={x} outside [{spec.domain.a}, {spec.domain.b}]")
    return float(spec.f(x)), float(spec.fprime(x))


# --- certifiers -------------------------------------------------------------------------

class CertStatus(enum.Enum):
    NO_COUNTEREXAMPLE = "NoCounterexampleFound"
    COUNTEREXAMPLE = "Counterexample"


@dataclass(frozen=True)
class SamplingPlan:
    grid_points: int = 41
    t_points: int = 21
    random_samples: int = 10_000
    seed: int = DEFAULT_SEED

    def triples(self, upper: float) -> np.ndarray:
        xs = np.linspace(0.0, upper, self.grid_points)
        ts = np.linspace(0.0, 1.0, self.t_points)
        X, Y, T = np.meshgrid(xs, xs, ts, indexing="ij")
        grid = np.column_stack([X.ravel(), Y.ravel(), T.ravel()])
        rng = np.random.default_rng(self.seed)
        rand = rng.random((self.random_samples, 3)) * np.array([upper, upper, 1.0])
        return np.concatenate([grid, rand])


DEFAULT_PLAN = SamplingPlan()


@dataclass(frozen=True)
class Certificate:
    status: CertStatus
    witness: Optional[Tuple[float, float, float]]
    samples_checked: int
    max_violation: float

    @property
    def ok(self) -> bool:
        return self.status is CertStatus.NO_COUNTEREXAMPLE


def definitional_excess(g, x, y, t, alpha: float, m: float):
    """Relative excess g(tx + m(1-t)y) / (g(x)^(t^a) g(y)^(m(1-t^a))) - 1.

    Computed in log space; positive values violate (alpha, m)-log-convexity of g.
    """
    ta = t ** alpha
    z = t * x + m * (1.0 - t) * y
    lhs = np.log(g(z))
    rhs = ta * np.log(g(x)) + m * (1.0 - ta) * np.log(g(y))
    return np.expm1(lhs - rhs)


def _check_unit(name, v):
    if not 0.0 < v <= 1.0:
        raise DomainError(f"{name} must lie in (0, 1], got {v}")


def certify_am_log_convex(spec: FunctionSpec, alpha: float, m: float, upper: float,
                          sampler: SamplingPlan = DEFAULT_PLAN, power: float = 1.0) -> Certificate:
    """Search for a violation of (alpha, m)-log-convexity of |f'|**power on [0, upper]."""
    _check_unit("alpha", alpha)
    _check_unit("m", m)
    if not upper > 0.0:
        raise DomainError(f"upper must be positive, got {upper}")
    spec.check_in_domain(0.0, upper)

    def g(x):
        return np.abs(spec.fprime(x)) ** power

    pts = sampler.triples(upper)
    x, y, t = pts[:, 0], pts[:, 1], pts[:, 2]
    if np.any(g(np.concatenate([x, y])) <= 0.0):
        raise DomainError("|f'| vanishes on the sampled range; log-convexity is undefined")
    with np.errstate(over="ignore"):
        excess = definitional_excess(g, x, y, t, alpha, m)
    worst = float(np.max(excess))
    bad = excess > CERT_TOL
    if not bad.any():
        return Certificate(CertStatus.NO_COUNTEREXAMPLE, None, len(pts), max(worst, 0.0))
    cand = pts[bad]
    first = np.lexsort((cand[:, 2], cand[:, 1], cand[:, 0]))[0]
    witness = tuple(float(v) for v in cand[first])
    return Certificate(CertStatus.COUNTEREXAMPLE, witness, len(pts), worst)


def certify_m_log_convex(spec: FunctionSpec, m: float, upper: float,
                         sampler: SamplingPlan = DEFAULT_PLAN, power: float = 1.0) -> Certificate:
    return certify_am_log_convex(spec, 1.0, m, upper, sampler, power)


def certify_alpha_log_convex(spec: FunctionSpec, alpha: float, upper: float,
                             sampler: SamplingPlan = DEFAULT_PLAN,
                             power: float = 1.0) -> Certificate:
    return certify_am_log_convex(spec, alpha, 1.0, upper, sampler, power)
