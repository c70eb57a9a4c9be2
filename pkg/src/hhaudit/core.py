"""Value types shared across the package and the endpoint-ratio algebra."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

# |eta - 1| at or below this counts as the equality case.
ETA_ONE_TOL = 1e-9
# Conjugacy and Young-weight sums are checked to this absolute tolerance.
PARAM_SUM_TOL = 1e-12
POWER_LEMMA_SLACK = 1e-15


class DomainError(ValueError):
    """An argument lies outside the domain where the operation is defined."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError(f"interval endpoints must be finite, got [{self.a}, {self.b}]")
        if not (0.0 <= self.a < self.b):
            raise DomainError(f"interval requires 0 <= a < b, got [{self.a}, {self.b}]")

    @property
    def width(self) -> float:
        return self.b - self.a

    def contains(self, lo: float, hi: float) -> bool:
        return self.a <= lo and hi <= self.b


class EtaCase(enum.Enum):
    EQUAL_ONE = "EqualOne"
    BELOW_ONE = "BelowOne"
    ABOVE_ONE = "AboveOne"


@dataclass(frozen=True)
class EtaValue:
    base: float
    case: EtaCase

    @classmethod
    def classify(cls, base: float) -> "EtaValue":
        if not (base > 0.0 and math.isfinite(base)):
            raise DomainError(f"eta must be a finite positive number, got {base}")
        if abs(base - 1.0) <= ETA_ONE_TOL:
            case = EtaCase.EQUAL_ONE
        elif base < 1.0:
            case = EtaCase.BELOW_ONE
        else:
            case = EtaCase.ABOVE_ONE
        return cls(base, case)


class Theorem(enum.Enum):
    T1 = "T1"
    T1_COR_M = "T1CorM"
    T1_COR_ALPHA = "T1CorAlpha"
    T2 = "T2"
    T2_COR_M22 = "T2CorM22"
    T2_COR_ALPHA = "T2CorAlpha"
    T3 = "T3"
    T3_COR_M = "T3CorM"
    T3_COR_ALPHA = "T3CorAlpha"
    T4 = "T4"
    T4_COR_SYM = "T4CorSym"


class Variant(enum.Enum):
    AS_PUBLISHED = "AsPublished"
    REDERIVED = "Rederived"


@dataclass(frozen=True)
class BoundResult:
    """One evaluated bound. ``value`` is None when the bound is not applicable;
    ``note`` then says why (eta above one, a negative printed bracket, bad params)."""

    theorem: Theorem
    variant: Variant
    value: Optional[float]
    eta_case: Optional[EtaCase]
    note: str = ""

    @property
    def applicable(self) -> bool:
        return self.value is not None


def _in_unit(x: float) -> bool:
    return 0.0 < x <= 1.0


@dataclass(frozen=True)
class BoundParams:
    """Parameter tuple for the bound evaluators.

    Only the constraints listed for each parameter are enforced here; whether a
    particular theorem has the parameters it needs is checked by ``require``.
    """

    interval: Interval
    alpha: float
    m: float
    p: Optional[float] = None
    q: Optional[float] = None
    mu1: Optional[float] = None
    tau1: Optional[float] = None
    mu2: Optional[float] = None
    tau2: Optional[float] = None

    def __post_init__(self):
        if not _in_unit(self.alpha):
            raise DomainError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not _in_unit(self.m):
            raise DomainError(f"m must lie in (0, 1], got {self.m}")
        if self.p is not None and not self.p > 1.0:
            raise DomainError(f"p must exceed 1, got {self.p}")
        if self.q is not None and not self.q >= 1.0:
            raise DomainError(f"q must be at least 1, got {self.q}")
        if self.p is not None and self.q is not None:
            if not self.q > 1.0:
                raise DomainError("p and q must both exceed 1")
            if abs(1.0 / self.p + 1.0 / self.q - 1.0) > PARAM_SUM_TOL:
                raise DomainError(f"p={self.p}, q={self.q} are not conjugate exponents")
        young = (self.mu1, self.tau1, self.mu2, self.tau2)
        if any(w is not None for w in young):
            if any(w is None for w in young):
                raise DomainError("Young weights mu1, tau1, mu2, tau2 must be given together")
            if not all(w > 0.0 for w in young):
                raise DomainError(f"Young weights must be positive, got {young}")
            if abs(self.mu1 + self.tau1 - 1.0) > PARAM_SUM_TOL:
                raise DomainError(f"mu1 + tau1 must equal 1, got {self.mu1 + self.tau1}")
            if abs(self.mu2 + self.tau2 - 1.0) > PARAM_SUM_TOL:
                raise DomainError(f"mu2 + tau2 must equal 1, got {self.mu2 + self.tau2}")

    @property
    def has_young(self) -> bool:
        return self.mu1 is not None

    def require(self, *, holder: bool = False, power_mean: bool = False, young: bool = False):
        if holder and (self.p is None or self.q is None):
            raise DomainError("Hölder bound needs conjugate p, q > 1")
        if power_mean and self.q is None:
            raise DomainError("power-mean bound needs q >= 1")
        if young and not self.has_young:
            raise DomainError("Young-inequality bound needs mu1, tau1, mu2, tau2")


def eta_general(fprime_at_a_abs: float, fprime_at_bm_abs: float, m: float,
                u: float, v: float) -> float:
    """|f'(a)|^u / |f'(b/m)|^(m v).

    Evaluated through logarithms so large derivative magnitudes do not overflow.
    """
    if not (fprime_at_a_abs > 0.0 and fprime_at_bm_abs > 0.0):
        raise DomainError("derivative magnitudes must be strictly positive")
    if not _in_unit(m):
        raise DomainError(f"m must lie in (0, 1], got {m}")
    return math.exp(u * math.log(fprime_at_a_abs) - m * v * math.log(fprime_at_bm_abs))


def eta(fprime_at_a_abs: float, fprime_at_bm_abs: float, m: float) -> EtaValue:
    return EtaValue.classify(eta_general(fprime_at_a_abs, fprime_at_bm_abs, m, 1.0, 1.0))


def power_lemma_holds(k: float, m: float, n: float) -> bool:
    """Check k**(m**n) <= k**(m*n) for k, m, n in (0, 1]."""
    for name, x in (("k", k), ("m", m), ("n", n)):
        if not _in_unit(x):
            raise DomainError(f"{name} must lie in (0, 1], got {x}")
    return k ** (m ** n) <= k ** (m * n) + POWER_LEMMA_SLACK
