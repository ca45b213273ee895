from __future__ import annotations

import os

from commands.artifacts import ensure_dir, write_csv
from commands.problem_file import LoadedConfig
from commands.result import EXIT_FAULT, EXIT_OK, EXIT_VIOLATION, CommandResult
from core.config import NumericsConfig
from core.errors import HessianError
from numerics.hypotheses import check_hypotheses


def run_hypotheses(cfg: LoadedConfig, numerics: NumericsConfig) -> CommandResult:
    out_dir = ensure_dir(numerics.out_dir)
    try:
        report = check_hypotheses(cfg.spec, cfg.witness, r_max=numerics.rmax)
    except HessianError as e:
        return CommandResult(status=EXIT_FAULT, text=f"Falha ao verificar hipóteses. Detalhe técnico: {e}")

    path = write_csv(
        os.path.join(out_dir, "violations.csv"),
        ["hypothesis", "message", "t", "w", "lhs", "rhs"],
        [[v.hypothesis, v.message, v.t, v.w, v.lhs, v.rhs] for v in report.violations],
    )
    lines = [f"Hipóteses verificadas: {', '.join(report.checked)} ({report.samples} amostras por eixo)"]
    if report.ok:
        lines.append("- nenhuma violação encontrada")
    for v in report.violations:
        lines.append(f"- {v.hypothesis}: {v.message}")
    lines.append(f"- artefatos: {path}")
    return CommandResult(
        status=EXIT_OK if report.ok else EXIT_VIOLATION,
        text="\n".join(lines),
        artifacts=[path],
    )
