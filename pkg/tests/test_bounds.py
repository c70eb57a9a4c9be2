import dataclasses
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conftest import E, params
from hhaudit import bounds as B
from hhaudit.audit import trapezoid_gap
from hhaudit.core import BoundParams, DomainError, EtaCase, Interval, Theorem, Variant
from hhaudit.funcmodel import SamplingPlan, certify_am_log_convex, exp_affine, exp_quadratic, linear_affine

AP, RD = Variant.AS_PUBLISHED, Variant.REDERIVED
MOM_ABS_EXP_INV_E = 0.21242195589995    # 50-digit quadrature of (t^2 - t + 1/2) e^{-t}
MOM_EXP_E_M2 = (1 - math.exp(-2)) / 2


def val(spec, prm, th, var):
    return B.evaluate(B.BoundRequest(spec, prm, th, var))


def test_thm1_examples(expx, lin31):
    r = B.thm1_bound(B.BoundRequest(lin31, params(0, 2), Theorem.T1, AP))
    assert r.eta_case is EtaCase.EQUAL_ONE and r.value == pytest.approx(2.0, rel=1e-15)
    assert val(expx, params(), Theorem.T1, RD).value == pytest.approx(E * MOM_ABS_EXP_INV_E, rel=1e-12)
    assert val(expx, params(), Theorem.T1, RD).value == pytest.approx(0.5774, abs=1e-4)
    printed = 0.5 * E * (-1 + 2 + 2 / E - 2) / (-1)
    assert val(expx, params(), Theorem.T1, AP).value == pytest.approx(printed, rel=1e-14)
    assert printed == pytest.approx(0.3592, abs=1e-4)


@pytest.mark.parametrize("th", [Theorem.T1_COR_M, Theorem.T1_COR_ALPHA])
def test_thm1_corollary_examples(th, expx, lin31):
    assert val(lin31, params(0, 2), th, AP).value == pytest.approx(2.0, rel=1e-15)
    assert val(expx, params(), th, AP).value == pytest.approx(0.3592, abs=1e-4)
    assert val(expx, params(), th, RD).value == pytest.approx(0.5774, abs=1e-4)


def test_thm2_examples(expx, lin31):
    expected = E * math.sqrt(1 / 6) * math.sqrt(MOM_EXP_E_M2)
    for th in (Theorem.T2, Theorem.T2_COR_M22, Theorem.T2_COR_ALPHA):
        for var in (AP, RD):
            assert val(expx, params(), th, var).value == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.7297, abs=1e-4)
    for q in (1.5, 2.0, 4.0):
        p = q / (q - 1)
        got = val(lin31, params(0, 2, p=p, q=q), Theorem.T2, AP).value
        assert got == pytest.approx(2 * 3 * (2 / ((p + 1) * (p + 2))) ** (1 / p), rel=1e-14)
    assert val(lin31, params(0, 2), Theorem.T2_COR_M22, AP).value == pytest.approx(6 * math.sqrt(1 / 6))


def test_thm2_degenerate_holder(expx):
    with pytest.raises(DomainError):
        params(p=math.inf, q=1.0)
    with pytest.raises(DomainError):
        val(expx, params(p=None, q=1.0), Theorem.T2, RD)
    with pytest.raises(DomainError):
        params(m=0.0)


def test_thm3_examples(expx, lin31):
    for q in (1.0, 2.0, 4.0):
        p = None if q == 1 else q / (q - 1)
        for var in (AP, RD):
            assert val(lin31, params(0, 2, p=p, q=q), Theorem.T3, var).value == pytest.approx(2.0)
    q1 = val(expx, params(p=None, q=1.0), Theorem.T3, RD).value
    assert q1 == pytest.approx(val(expx, params(), Theorem.T1, RD).value, rel=1e-15)
    with mpmath.workdps(30):
        m2 = float(mpmath.quad(lambda t: (t * t - t + 0.5) * mpmath.exp(-2 * t), [0, 1]))
    q2 = 0.5 * math.sqrt(1 / 3) * E * 2 * math.sqrt(m2)
    assert val(expx, params(), Theorem.T3, RD).value == pytest.approx(q2, rel=1e-12)


def test_thm3_printed_brackets_and_negative_flag():
    first, second = B.t3_printed_brackets(math.log(0.5))
    assert first == pytest.approx(0.2414010, abs=1e-7)
    assert abs(second - 0.2414010) / 0.2414010 > 0.10
    # The printed second bracket is about -L/12, so it turns negative for phi > 1;
    # phi = eta^(alpha q) never exceeds 1 on applicable cells, hence the direct check.
    assert B.t3_printed_brackets(0.5)[1] < 0


def test_thm4_examples(expx, lin31):
    for th in (Theorem.T4, Theorem.T4_COR_SYM):
        for var in (AP, RD):
            assert val(lin31, params(0, 2), th, var).value == pytest.approx(1 * 3 * 7 / 6, rel=1e-14)
            got = val(expx, params(), th, var).value
            assert got == pytest.approx(E / 2 * (1 / 6 + MOM_EXP_E_M2), rel=1e-13)
    assert got == pytest.approx(0.8141, abs=1e-4)
    with pytest.raises(DomainError):
        BoundParams(Interval(0, 1), 1, 1, 2, 2, 0.5, 0.4, 0.5, 0.5)
    with pytest.raises(DomainError):
        val(expx, BoundParams(Interval(0, 1), 1, 1, 2, 2), Theorem.T4, RD)


def test_eta_above_one_not_applicable():
    dec = exp_affine(1.0, -1.0, 5.0)
    for r in B.evaluate_all(dec, params()):
        assert r.value is None and r.eta_case is EtaCase.ABOVE_ONE and not r.applicable


def test_domain_must_contain_b_over_m(expx):
    narrow = exp_affine(domain=Interval(0.0, 1.5))
    with pytest.raises(DomainError):
        val(narrow, params(m=0.5), Theorem.T1, RD)
    results = B.evaluate_all(narrow, params(m=0.5))
    for r in results:
        if B.pin(r.theorem, params(m=0.5)).m == 1.0:
            assert r.applicable
        else:
            assert r.value is None and r.note.startswith("error:")


COHERENCE = [
    (Theorem.T1_COR_M, Theorem.T1, dict(alpha=1.0)),
    (Theorem.T1_COR_ALPHA, Theorem.T1, dict(m=1.0)),
    (Theorem.T2_COR_M22, Theorem.T2, dict(alpha=1.0, p=2.0, q=2.0)),
    (Theorem.T2_COR_ALPHA, Theorem.T2, dict(m=1.0)),
    (Theorem.T3_COR_M, Theorem.T3, dict(alpha=1.0)),
    (Theorem.T3_COR_ALPHA, Theorem.T3, dict(m=1.0)),
    (Theorem.T4_COR_SYM, Theorem.T4, None),
]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(COHERENCE), st.sampled_from([AP, RD]),
       st.floats(0.1, 1.0), st.floats(0.1, 1.0), st.sampled_from([1.5, 2.0, 4.0]),
       st.floats(0.05, 0.95), st.floats(0.01, 3.0))
def test_specialization_coherence(case, var, alpha, m, q, mu, lam):
    cor, parent, pinned = case
    spec = exp_affine(1.0, lam, 0.0)
    prm = params(alpha=alpha, m=m, p=q / (q - 1), q=q, mu=mu)
    if pinned is None:
        pinned = dict(mu2=prm.mu1, tau2=prm.tau1)
    a = val(spec, prm, cor, var)
    b = val(spec, dataclasses.replace(prm, **pinned), parent, var)
    assert a.value == b.value


@pytest.mark.parametrize("th", list(Theorem))
def test_rederived_continuous_at_eta_one(th):
    prm = B.pin(th, params(alpha=0.7, m=0.8, p=3.0, q=1.5, mu=0.3))
    near = B.bound_value(th, RD, B.BoundInputs.from_eta(1.3, 2.0, 1 - 1e-6), prm).value
    at = B.bound_value(th, RD, B.BoundInputs.from_eta(1.3, 2.0, 1.0), prm).value
    assert near == pytest.approx(at, rel=1e-5)


def test_thm1_printed_limit_is_half():
    prm = params()
    for L in (-1e-3, -1e-6, -1e-9):
        x = B.BoundInputs(1.0, 1.0, B.EtaValue.classify(0.5), L)
        assert B.bound_value(Theorem.T1, AP, x, prm).value == pytest.approx(1 / 6, rel=1e-3)


@given(st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_thm4_variants_agree_at_eta_one(mu1, mu2):
    prm = params(mu=mu1, mu2=mu2)
    x = B.BoundInputs.from_eta(1.0, 1.0, 1.0)
    a = B.bound_value(Theorem.T4, AP, x, prm).value
    b = B.bound_value(Theorem.T4, RD, x, prm).value
    assert abs(a - b) <= 1e-12


@pytest.mark.parametrize("th", list(Theorem))
@pytest.mark.parametrize("var", [AP, RD])
def test_bounds_scale_with_width(th, var):
    # exp(lam x) on [0, b] and exp(lam x / 2) on [0, 2b] share f' at both ends.
    prm = params(0, 1, alpha=0.5, m=1.0, p=3.0, q=1.5)
    prm2 = dataclasses.replace(prm, interval=Interval(0, 2))
    one = val(exp_affine(1.0, 1.0, 0.0), prm, th, var).value
    two = val(exp_affine(1.0, 0.5, 0.0), prm2, th, var).value
    assert two == pytest.approx(2 * one, rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["exp", "quad", "lin"]), st.floats(0.0, 2.0), st.sampled_from([0.25, 0.5, 1.0]),
       st.sampled_from([1.0, 2.0, 4.0]), st.floats(0.0, 0.8), st.floats(0.1, 1.0))
def test_rederived_sound_on_certified_inputs(kind, shape, m, q, a, width):
    if kind == "exp":
        spec = exp_affine(min(1.0, 0.2 + shape), shape, 1.0)
    elif kind == "quad":
        spec = exp_quadratic(shape, -0.5, -1.0, 1.0)
    else:
        spec = linear_affine(0.5 + shape / 4, 1.0)
    prm = params(a, a + width, alpha=1.0, m=m, p=None if q == 1 else q / (q - 1), q=q)
    plan = SamplingPlan(grid_points=21, t_points=11, random_samples=1000)
    gap = trapezoid_gap(spec, prm.interval)
    for r in B.evaluate_all(spec, prm):
        if r.variant is not RD or not r.applicable:
            continue
        power = 2.0 if r.theorem is Theorem.T2_COR_M22 else (q if r.theorem.value[:2] in ("T2", "T3") else 1.0)
        p2 = B.pin(r.theorem, prm)
        if not certify_am_log_convex(spec, p2.alpha, p2.m, p2.interval.b / p2.m, plan, power).ok:
            continue
        assert gap <= r.value * (1 + 1e-9)
