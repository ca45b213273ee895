from __future__ import annotations

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from core.errors import ExprEvalError, HypothesisViolation
from core.logging import get_logger, log_call
from numerics.classify import GrowthWitness, effective_witness, growth_constants, kth_root
from numerics.exprcore import Expr, evaluate, evaluate_array
from numerics.iteration import ProblemSpec

logger = get_logger("hypotheses")

# folga relativa para casos de igualdade (ex.: √(tw) = √t·√w)
_REL_TOL = 1e-12


class Violation(BaseModel):
    hypothesis: str
    message: str
    t: Optional[float] = None
    w: Optional[float] = None
    lhs: Optional[float] = None
    rhs: Optional[float] = None


class HypothesisReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)
    checked: List[str] = Field(default_factory=list)
    samples: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations


def _radii(r_max: float, budget: int) -> np.ndarray:
    return np.unique(np.concatenate([np.linspace(0.0, r_max, budget), np.geomspace(min(1e-3, r_max), r_max, budget)]))


def _arguments(budget: int) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-6, 1e6, budget)])


def _safe(expr: Expr, values: np.ndarray, n: int, label: str, report: HypothesisReport, hyp: str):
    try:
        return evaluate_array(expr, values, n)
    except ExprEvalError as e:
        report.violations.append(Violation(hypothesis=hyp, message=f"{label}: {e}"))
        return None


def _check_positive(expr: Expr, radii: np.ndarray, n: int, label: str, strict: bool, hyp: str,
                    report: HypothesisReport) -> None:
    values = _safe(expr, radii, n, label, report, hyp)
    if values is None:
        return
    bad = ~(values > 0) if strict else ~(values >= 0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        rel = "> 0" if strict else "≥ 0"
        report.violations.append(Violation(
            hypothesis=hyp, message=f"{label} deve ser {rel}; {label}({radii[idx]:.6g}) = {values[idx]:.6g}",
            t=float(radii[idx]), lhs=float(values[idx]),
        ))


def _check_nondecreasing(expr: Expr, args: np.ndarray, n: int, label: str, hyp: str,
                         report: HypothesisReport) -> None:
    values = _safe(expr, args, n, label, report, hyp)
    if values is None:
        return
    with np.errstate(invalid="ignore"):
        drops = values[1:] < values[:-1] - _REL_TOL * np.abs(values[:-1])
    if np.any(drops):
        idx = int(np.argmax(drops))
        report.violations.append(Violation(
            hypothesis=hyp, message=f"{label} decresce entre {args[idx]:.6g} e {args[idx + 1]:.6g}",
            t=float(args[idx + 1]), lhs=float(values[idx + 1]), rhs=float(values[idx]),
        ))


def _check_upper(f: Expr, h: Expr, phi: Expr, c: float, t_min: float, label: str, n: int,
                 side: int, report: HypothesisReport) -> None:
    """f(t·w) ≤ c·h(t)·φ(w) para t ≥ t_min, w ≥ 1."""
    size = 64
    ts = t_min * np.geomspace(1.0, 1e4, size)
    ws = np.geomspace(1.0, 1e4, size)
    tt, ww = np.meshgrid(ts, ws, indexing="ij")
    try:
        lhs = evaluate_array(f, tt * ww, n)
        rhs = c * evaluate_array(h, tt, n) * evaluate_array(phi, ww, n)
    except ExprEvalError as e:
        report.violations.append(Violation(hypothesis=label, message=str(e)))
        return
    bad = lhs > rhs + _REL_TOL * np.abs(rhs)
    report.checked.append(label)
    if np.any(bad):
        i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
        report.violations.append(Violation(
            hypothesis=label,
            message=f"f{side}(t·w) > c̄{side}·h{side}(t)·φ̄{side}(w) em t={ts[i]:.6g}, w={ws[j]:.6g}",
            t=float(ts[i]), w=float(ws[j]), lhs=float(lhs[i, j]), rhs=float(rhs[i, j]),
        ))


def _check_lower(f: Expr, phi: Expr, c: float, m_low: float, label: str, n: int, side: int,
                 report: HypothesisReport) -> None:
    """f(m·w) ≥ c·φ(w) para w ≥ 1."""
    ws = np.geomspace(1.0, 1e6, 256)
    try:
        lhs = evaluate_array(f, m_low * ws, n)
        rhs = c * evaluate_array(phi, ws, n)
    except ExprEvalError as e:
        report.violations.append(Violation(hypothesis=label, message=str(e)))
        return
    bad = lhs < rhs - _REL_TOL * np.abs(rhs)
    report.checked.append(label)
    if np.any(bad):
        j = int(np.argmax(bad))
        report.violations.append(Violation(
            hypothesis=label,
            message=f"f{side}(m{side}·w) < c̲{side}·φ̲{side}(w) em w={ws[j]:.6g}",
            w=float(ws[j]), lhs=float(lhs[j]), rhs=float(rhs[j]),
        ))


@log_call("check_hypotheses")
def check_hypotheses(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness] = None,
    sample_budget: int = 512,
    r_max: float = 10.0,
) -> HypothesisReport:
    """Amostra (P1), (C1), (C2) e (C3); violações são conteúdo do relatório."""
    report = HypothesisReport(samples=sample_budget)
    n = spec.n
    radii = _radii(r_max, sample_budget)
    args = _arguments(sample_budget)

    report.checked.append("(P1)")
    for label, expr in (("p1", spec.p1), ("p2", spec.p2)):
        _check_positive(expr, radii, n, label, True, "(P1)", report)
    for label, expr in (("a1", spec.a1), ("a2", spec.a2)):
        _check_positive(expr, radii, n, label, False, "(P1)", report)

    report.checked.append("(C1)")
    for label, expr in (("f1", spec.f1), ("f2", spec.f2)):
        _check_positive(expr, args[:1], n, label, False, "(C1)", report)
        _check_positive(expr, args[1:], n, label, True, "(C1)", report)
        _check_nondecreasing(expr, args, n, label, "(C1)", report)

    try:
        consts = growth_constants(spec)
    except HypothesisViolation as e:
        report.violations.append(Violation(hypothesis=e.hypothesis, message=str(e)))
        return report

    w, _ = effective_witness(spec, witness, consts)
    for label, expr in (("h1", w.h1), ("h2", w.h2)):
        if expr is not None:
            _check_positive(expr, args, n, label, False, "(C2)", report)
            _check_nondecreasing(expr, args, n, label, "(C2)", report)
    for label, expr in (("phibar1", w.phibar1), ("phibar2", w.phibar2),
                        ("phiunder1", w.phiunder1), ("phiunder2", w.phiunder2)):
        if expr is not None:
            _check_positive(expr, args, n, label, False, "(C2)" if "bar" in label else "(C3)", report)

    if w.has_c21:
        t1 = consts.m1_cap * kth_root(evaluate(spec.f2, spec.central_a, n), spec.k2)
        _check_upper(spec.f1, w.h1, w.phibar1, w.cbar1, t1, "(c21)", n, 1, report)
    if w.has_c22:
        t2 = consts.m2_cap * kth_root(evaluate(spec.f1, spec.central_b, n), spec.k1)
        _check_upper(spec.f2, w.h2, w.phibar2, w.cbar2, t2, "(c22)", n, 2, report)
    if w.has_c31:
        _check_lower(spec.f1, w.phiunder1, w.cunder1, consts.m1_low, "(c31)", n, 1, report)
    if w.has_c32:
        _check_lower(spec.f2, w.phiunder2, w.cunder2, consts.m2_low, "(c32)", n, 2, report)

    for v in report.violations:
        logger.info("violação %s: %s", v.hypothesis, v.message)
    return report
