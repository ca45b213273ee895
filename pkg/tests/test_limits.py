from __future__ import annotations

import math

import pytest

from numerics.limits import LimitEstimate, limit_estimate


def test_inverse_square_tail_is_finite():
    est = limit_estimate(lambda r: 1.0 - 1.0 / r, r0=1.0, r_budget=1024.0)
    assert est.verdict == "Finite"
    assert est.best_value == pytest.approx(1.0, abs=1e-12)
    assert est.extrapolation_error == pytest.approx(0.0, abs=1e-12)
    assert est.radii[-1] == 1024.0


def test_logarithm_is_divergent():
    est = limit_estimate(math.log, r0=1.0, r_budget=1024.0)
    assert est.verdict == "Divergent"


def test_borderline_decay_is_inconclusive():
    # ∫₁^r t^{-1.01} dt
    est = limit_estimate(lambda r: (1.0 - r**-0.01) / 0.01, r0=1.0, r_budget=1000.0)
    assert est.verdict == "Inconclusive"


def test_small_budget_is_inconclusive():
    est = limit_estimate(lambda r: 1.0 - 1.0 / r, r0=1.0, r_budget=4.0)
    assert est.verdict == "Inconclusive"
    assert len(est.evidence) == 3


def test_constant_is_finite_with_exact_limit():
    est = limit_estimate(lambda r: 2.5)
    assert est.verdict == "Finite"
    assert est.best_value == 2.5


def test_overflow_is_divergent():
    est = limit_estimate(lambda r: math.inf if r > 100 else r)
    assert est.verdict == "Divergent"


def test_invalid_start_radius():
    with pytest.raises(ValueError):
        limit_estimate(lambda r: r, r0=0.0)


def test_summary_text():
    est = LimitEstimate(value_at_rmax=0.9, verdict="Finite", extrapolated_limit=1.0, extrapolation_error=0.01)
    assert est.summary().startswith("Finite")
    assert est.best_value == 1.0
