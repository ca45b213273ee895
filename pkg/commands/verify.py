from __future__ import annotations

import os
from typing import List

import numpy as np

from commands.artifacts import columns_to_rows, ensure_dir, write_csv, write_line_plot
from commands.problem_file import LoadedConfig
from commands.result import EXIT_FAULT, EXIT_OK, CommandResult
from core.config import NumericsConfig
from core.errors import ExprError, HessianError
from core.logging import get_logger
from numerics.exprcore import evaluate, evaluate_array, parse
from numerics.hessian import pde_residual, profile_from_expr, profile_from_values
from numerics.kernels import uniform_grid

logger = get_logger("verify")


def _profiles(cfg: LoadedConfig, grid: np.ndarray, u1_src: str, u2_src: str, finite_differences: bool):
    n = cfg.spec.n
    exprs = []
    for name, src in (("u1", u1_src), ("u2", u2_src)):
        try:
            exprs.append(parse(src))
        except ExprError as e:
            raise HessianError(f"--{name} {src!r}: {e}") from e
    if finite_differences:
        return tuple(profile_from_values(grid, evaluate_array(e, grid, n)) for e in exprs), exprs
    return tuple(profile_from_expr(e, grid, n) for e in exprs), exprs


def run_verify(
    cfg: LoadedConfig,
    numerics: NumericsConfig,
    u1: str,
    u2: str,
    finite_differences: bool = False,
) -> CommandResult:
    """Resíduo do sistema para um par candidato em forma fechada."""
    out_dir = ensure_dir(numerics.out_dir)
    grid = uniform_grid(numerics.rmax, numerics.grid_n)
    try:
        (prof1, prof2), exprs = _profiles(cfg, grid, u1, u2, finite_differences)
        res1, res2 = pde_residual(cfg.spec, prof1, prof2)
    except HessianError as e:
        return CommandResult(status=EXIT_FAULT, text=f"Falha na verificação. Detalhe técnico: {e}")

    artifacts: List[str] = [
        write_csv(
            os.path.join(out_dir, "residual.csv"),
            ["r", "res1", "res2"],
            columns_to_rows([grid, res1, res2], len(grid)),
        ),
        write_line_plot(
            os.path.join(out_dir, "residual.svg"),
            grid,
            {"|res1|": np.abs(res1), "|res2|": np.abs(res2)},
            title="Resíduo do sistema",
            ylabel="|resíduo|",
        ),
    ]

    sup1 = float(np.max(np.abs(res1)))
    sup2 = float(np.max(np.abs(res2)))
    mode = "diferenças finitas" if finite_differences else "derivadas analíticas"
    lines = [
        f"Resíduo ({mode}, [0, {numerics.rmax:g}], grid_n={numerics.grid_n})",
        f"- sup|res1| = {sup1:.3e}",
        f"- sup|res2| = {sup2:.3e}",
    ]
    center = (evaluate(exprs[0], 0.0, cfg.spec.n), evaluate(exprs[1], 0.0, cfg.spec.n))
    if not (np.isclose(center[0], cfg.spec.central_a) and np.isclose(center[1], cfg.spec.central_b)):
        # o resíduo não enxerga os valores centrais
        lines.append(
            f"- aviso: (u1(0), u2(0)) = ({center[0]:.6g}, {center[1]:.6g}) difere de "
            f"(a, b) = ({cfg.spec.central_a:g}, {cfg.spec.central_b:g})"
        )
        logger.warning("valores centrais do candidato diferem de (a, b)")
    lines.append(f"- artefatos: {', '.join(artifacts)}")
    return CommandResult(status=EXIT_OK, text="\n".join(lines), artifacts=artifacts)
