from __future__ import annotations

import os
from typing import List, Optional

import numpy as np

from commands.artifacts import columns_to_rows, ensure_dir, write_csv
from commands.problem_file import LoadedConfig
from commands.result import EXIT_FAULT, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_VIOLATION, CommandResult
from commands.solve import solve_profile
from core.config import NumericsConfig
from core.errors import HessianError
from numerics.classify import (
    INCONCLUSIVE,
    NOT_MET,
    SANDWICH_SIDES,
    ClassificationReport,
    classify,
    sandwich_check,
    sandwich_envelopes,
)
from numerics.iteration import SolutionProfile
from numerics.limits import LimitEstimate

_ESTIMATE_LABELS = (
    ("H12(inf)", "h_12_inf"),
    ("H21(inf)", "h_21_inf"),
    ("Pbar12(inf)", "p_bar_12"),
    ("Pbar21(inf)", "p_bar_21"),
    ("Punder12(inf)", "p_under_12"),
    ("Punder21(inf)", "p_under_21"),
)


def _estimate_row(name: str, est: Optional[LimitEstimate]) -> list:
    if est is None:
        return [name, "estimate", "n/a", None, None, None]
    return [name, "estimate", est.verdict, est.value_at_rmax, est.extrapolated_limit, est.extrapolation_error]


def write_report(path: str, report: ClassificationReport) -> str:
    """report.csv: seis estimativas, constantes e o veredito."""
    rows: List[list] = [_estimate_row(name, getattr(report, attr)) for name, attr in _ESTIMATE_LABELS]
    c = report.constants
    for name, value in (("M1", c.m1_cap), ("M2", c.m2_cap), ("m1", c.m1_low), ("m2", c.m2_low)):
        rows.append([name, "constant", "", value, None, None])
    rows.append(_estimate_row("M1plus", c.m1_plus))
    rows.append(_estimate_row("M2plus", c.m2_plus))
    rows.append(["verdict", "verdict", report.verdict, None, None, None])
    rows.append(["remark_variant_used", "flags", ",".join(report.remark_variant_used) or "none", None, None, None])
    return write_csv(path, ["name", "kind", "verdict", "value_at_rmax", "extrapolated_limit", "extrapolation_error"], rows)


def _format_report(report: ClassificationReport) -> List[str]:
    lines = [f"Veredito: {report.verdict}"]
    if report.blocking:
        lines.append(f"- motivo/estimativa bloqueante: {report.blocking}")
    for name, attr in _ESTIMATE_LABELS:
        est: Optional[LimitEstimate] = getattr(report, attr)
        lines.append(f"- {name}: {est.summary() if est else 'n/a'}")
    c = report.constants
    lines.append(f"- M1={c.m1_cap:.6g} M2={c.m2_cap:.6g} m1={c.m1_low:.6g} m2={c.m2_low:.6g}")
    if report.remark_variant_used:
        lines.append(f"- variantes/defaults aplicados: {', '.join(report.remark_variant_used)}")
    for note in report.notes:
        lines.append(f"- nota: {note}")
    return lines


def _sandwich(cfg: LoadedConfig, numerics: NumericsConfig, report: ClassificationReport, out_dir: str):
    """Resolve o sistema, grava sandwich.csv e confere os envelopes."""
    profile = solve_profile(cfg, numerics)
    if not isinstance(profile, SolutionProfile):
        return None, [f"- sanduíche não verificado: {profile.message}"], None
    tops = (2.0 * float(np.max(profile.u1)), 2.0 * float(np.max(profile.u2)))
    env = sandwich_envelopes(cfg.spec, report, profile.grid, cfg.witness, tops)
    path = write_csv(
        os.path.join(out_dir, "sandwich.csv"),
        ["r", "lower1", "upper1", "lower2", "upper2"],
        columns_to_rows([profile.grid, env.lower1, env.upper1, env.lower2, env.upper2], len(profile.grid)),
    )
    check = sandwich_check(cfg.spec, report, profile, cfg.witness)
    status = "ok" if check.passed else "FALHOU"
    lines = [
        f"- sanduíche ({', '.join(check.checked)}): {status}; maior violação {check.worst_violation:.3e} "
        f"(tolerância {check.tolerance:.3e})"
    ]
    if not check.passed:
        lines.append(f"  em r={check.worst_radius:.6g} ({check.worst_bound})")
    return check, lines, path


def run_classify(cfg: LoadedConfig, numerics: NumericsConfig) -> CommandResult:
    out_dir = ensure_dir(numerics.out_dir)
    try:
        report = classify(
            cfg.spec,
            cfg.witness,
            r_budget=numerics.limit_budget,
            grid_n=numerics.classify_grid_n,
            r0=numerics.limit_r0,
            finite_ratio=numerics.finite_ratio,
        )
    except HessianError as e:
        return CommandResult(status=EXIT_FAULT, text=f"Falha na classificação. Detalhe técnico: {e}")

    artifacts = [write_report(os.path.join(out_dir, "report.csv"), report)]
    lines = _format_report(report)

    if report.verdict == INCONCLUSIVE:
        status = EXIT_INCONCLUSIVE
    elif report.verdict == NOT_MET:
        status = EXIT_VIOLATION
    else:
        status = EXIT_OK

    if report.verdict in SANDWICH_SIDES:
        try:
            result = _sandwich(cfg, numerics, report, out_dir)
        except HessianError as e:
            lines.append(f"- sanduíche não verificado: {e}")
        else:
            check, extra, path = result
            lines += extra
            if path:
                artifacts.append(path)
            if check is not None and not check.passed:
                status = EXIT_FAULT

    lines.append(f"- artefatos: {', '.join(artifacts)}")
    return CommandResult(status=status, text="\n".join(lines), artifacts=artifacts)
