"""Adaptive Gauss-Kronrod quadrature used as ground truth by the audit.

Integrands are numpy-vectorised callables. Panels are refined one at a time
(largest error first) and summed in left-to-right order with ``math.fsum``, so
a result depends only on the integrand and the tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import DomainError

MAX_DEPTH = 40
MAX_PANELS = 4000
DEFAULT_REL_TOL_1D = 1e-10
DEFAULT_REL_TOL_2D = 1e-9
_EPS = np.finfo(float).eps

# Kronrod 15-point abscissae on [0, 1) of the symmetric rule, embedded 7-point Gauss.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
KRONROD_WEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod abscissae.
GAUSS_WEIGHTS[[1, 3, 5]] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[[9, 11, 13]] = _WG[2::-1]


class IntegrandError(ArithmeticError):
    """The integrand returned a non-finite value."""

    def __init__(self, abscissa, value):
        super().__init__(f"non-finite integrand value {value!r} at {abscissa!r}")
        self.abscissa = abscissa
        self.value = value


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool


def _call(g: Callable, x: np.ndarray) -> np.ndarray:
    y = np.broadcast_to(np.asarray(g(x), dtype=float), x.shape)
    bad = ~np.isfinite(y)
    if bad.any():
        i = int(np.argmax(bad))
        raise IntegrandError(float(x.flat[i]), float(y.flat[i]))
    return y


def _panels(g, lo: np.ndarray, hi: np.ndarray):
    """Apply the 7/15 pair on each [lo_i, hi_i]; returns (kronrod, error) arrays."""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    y = _call(g, x)
    k = half * (y @ KRONROD_WEIGHTS)
    gs = half * (y @ GAUSS_WEIGHTS)
    resabs = np.abs(half) * (np.abs(y) @ KRONROD_WEIGHTS)
    err = np.maximum(np.abs(k - gs), 50.0 * _EPS * resabs)
    return k, err


def _adapt(g, a: float, b: float, rel_tol: float, abs_tol: float) -> QuadratureResult:
    k, e = _panels(g, np.array([a]), np.array([b]))
    # Each panel: [lo, hi, value, error, depth].
    panels = [[a, b, float(k[0]), float(e[0]), 0]]
    evaluations = 15
    while True:
        value = math.fsum(p[2] for p in panels)
        error = math.fsum(p[3] for p in panels)
        if error <= max(rel_tol * abs(value), abs_tol):
            return QuadratureResult(value, error, evaluations, True)
        worst = None
        for idx, p in enumerate(panels):
            if p[4] < MAX_DEPTH and (worst is None or p[3] > panels[worst][3]):
                worst = idx
        if worst is None or len(panels) >= MAX_PANELS:
            return QuadratureResult(value, error, evaluations, False)
        lo, hi, _, _, depth = panels[worst]
        mid = 0.5 * (lo + hi)
        k, e = _panels(g, np.array([lo, mid]), np.array([mid, hi]))
        evaluations += 30
        panels[worst:worst + 1] = [
            [lo, mid, float(k[0]), float(e[0]), depth + 1],
            [mid, hi, float(k[1]), float(e[1]), depth + 1],
        ]


def integrate_1d(g: Callable, a: float, b: float, rel_tol: float = DEFAULT_REL_TOL_1D,
                 abs_tol: float = 0.0) -> QuadratureResult:
    """Integrate ``g`` over [a, b].

    Stops when the summed panel error estimate is below
    ``max(rel_tol * |value|, abs_tol)``. If the depth or panel cap is reached first
    the partial result comes back with ``converged=False``.
    """
    if not a < b:
        raise DomainError(f"integrate_1d requires a < b, got a={a}, b={b}")
    if not rel_tol >= 1e-13:
        raise DomainError(f"rel_tol must be at least 1e-13, got {rel_tol}")
    return _adapt(g, float(a), float(b), rel_tol, abs_tol)


def _triangle(g, rel_tol: float, lower: bool) -> QuadratureResult:
    """Integrate over {t < s} (``lower=False``) or {t > s} of the unit square."""
    inner_tol = max(rel_tol * 0.1, 1e-13)
    stats = {"evals": 0, "err": 0.0, "ok": True}

    def outer(s_nodes):
        out = np.empty_like(s_nodes)
        for i, s in np.ndenumerate(s_nodes):
            lo, hi = (s, 1.0) if lower else (0.0, s)
            r = _adapt(lambda t, s=s: g(np.full_like(t, s), t), lo, hi, inner_tol, 1e-300)
            out[i] = r.value
            stats["evals"] += r.evaluations
            stats["err"] = max(stats["err"], r.error_estimate)
            stats["ok"] = stats["ok"] and r.converged
        return out

    r = _adapt(outer, 0.0, 1.0, rel_tol * 0.5, 0.0)
    # sup of inner absolute errors times the unit outer length bounds their contribution.
    return QuadratureResult(r.value, r.error_estimate + stats["err"], stats["evals"],
                            r.converged and stats["ok"])


def integrate_2d_unit_square(g: Callable, rel_tol: float = DEFAULT_REL_TOL_2D,
                             abs_tol: float = 0.0) -> QuadratureResult:
    """Integrate ``g(s, t)`` over [0, 1]^2.

    The square is always split along the diagonal s = t, so kernels containing
    |s - t| are smooth on every panel.
    """
    if not rel_tol >= 1e-12:
        raise DomainError(f"rel_tol must be at least 1e-12, got {rel_tol}")
    upper = _triangle(g, rel_tol, lower=False)
    lower = _triangle(g, rel_tol, lower=True)
    value = upper.value + lower.value
    error = upper.error_estimate + lower.error_estimate
    # Each half meeting its own tolerance is not enough when the halves cancel.
    converged = (upper.converged and lower.converged
                 and error <= max(rel_tol * abs(value), abs_tol))
    return QuadratureResult(value, error, upper.evaluations + lower.evaluations, converged)
