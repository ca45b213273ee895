from __future__ import annotations

import pytest

from numerics.classify import GrowthWitness
from numerics.exprcore import parse
from numerics.hypotheses import check_hypotheses
from tests.conftest import make_spec


def test_bounded_exponential_config_is_clean(bounded_exp):
    report = check_hypotheses(bounded_exp.spec, bounded_exp.witness)
    assert report.ok, report.violations
    assert {"(P1)", "(C1)", "(c21)", "(c22)", "(c31)", "(c32)"} <= set(report.checked)


def test_planted_upper_growth_violation():
    spec = make_spec(p1="exp(-t)", p2="exp(-t)", f1="t^2")
    witness = GrowthWitness(h1=parse("t"), phibar1=parse("t"))
    report = check_hypotheses(spec, witness)
    hits = [v for v in report.violations if v.hypothesis == "(c21)"]
    assert hits
    assert hits[0].lhs > hits[0].rhs


def test_exact_product_identity_is_not_flagged(quartic_pair):
    # √(t·w) = √t·√w e t·w = t·w: igualdade dentro da folga relativa
    report = check_hypotheses(quartic_pair.spec, quartic_pair.witness)
    flagged = {v.hypothesis for v in report.violations}
    assert "(c21)" not in flagged
    assert "(c22)" not in flagged
    # p1(0) = 0 não é estritamente positivo
    assert [v.t for v in report.violations if v.hypothesis == "(P1)"] == [0.0]


def test_negative_weight_at_origin():
    report = check_hypotheses(make_spec(p1="t-5", p2="1"))
    p1 = [v for v in report.violations if v.hypothesis == "(P1)"]
    assert p1 and p1[0].t == 0.0 and p1[0].lhs == -5.0


def test_decreasing_nonlinearity():
    report = check_hypotheses(make_spec(f1="1/(1+t)"))
    assert any(v.hypothesis == "(C1)" for v in report.violations)


def test_lower_growth_violation():
    spec = make_spec(p1="exp(-t)", p2="exp(-t)")
    witness = GrowthWitness(phiunder1=parse("2*t"))
    report = check_hypotheses(spec, witness)
    assert any(v.hypothesis == "(c31)" for v in report.violations)


def test_linear_nonlinearity_beats_constant_witness():
    spec = make_spec(p1="exp(-t)", p2="exp(-t)", f1="t")
    witness = GrowthWitness(h1=parse("1"), phibar1=parse("1"))
    report = check_hypotheses(spec, witness)
    hits = [v for v in report.violations if v.hypothesis == "(c21)"]
    assert hits
    assert hits[0].t * hits[0].w > 1.0
    assert hits[0].lhs == pytest.approx(hits[0].t * hits[0].w)
    assert hits[0].rhs == 1.0
