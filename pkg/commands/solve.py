from __future__ import annotations

import os
from typing import List, Union

from commands.artifacts import columns_to_rows, ensure_dir, write_csv, write_line_plot
from commands.problem_file import LoadedConfig
from commands.result import EXIT_FAULT, EXIT_OK, EXIT_VIOLATION, CommandResult
from core.config import NumericsConfig
from core.errors import HessianError, NonConvergenceError
from numerics.iteration import DivergenceReport, SolutionProfile, fixed_point_residual, solve


def write_solution(out_dir: str, profile: SolutionProfile, name: str = "solution") -> List[str]:
    """solution.csv (r,u1,u2,du1,du2) e solution.svg."""
    csv_path = write_csv(
        os.path.join(out_dir, f"{name}.csv"),
        ["r", "u1", "u2", "du1", "du2"],
        columns_to_rows([profile.grid, profile.u1, profile.u2, profile.du1, profile.du2], len(profile.grid)),
    )
    svg_path = write_line_plot(
        os.path.join(out_dir, f"{name}.svg"),
        profile.grid,
        {"u1": profile.u1, "u2": profile.u2},
        title="Perfis radiais",
    )
    return [csv_path, svg_path]


def solve_profile(cfg: LoadedConfig, numerics: NumericsConfig, extrapolate: bool = False) -> Union[SolutionProfile, DivergenceReport]:
    return solve(
        cfg.spec,
        r_max=numerics.rmax,
        grid_n=numerics.grid_n,
        tol=numerics.tol,
        max_iter=numerics.max_iter,
        refine_cap=numerics.refine_cap,
        extrapolate=extrapolate,
        overflow_guard=numerics.overflow_guard,
    )


def run_solve(cfg: LoadedConfig, numerics: NumericsConfig, extrapolate: bool = False) -> CommandResult:
    out_dir = ensure_dir(numerics.out_dir)
    try:
        result = solve_profile(cfg, numerics, extrapolate)
    except NonConvergenceError as e:
        artifacts: List[str] = []
        if isinstance(e.partial, SolutionProfile):
            artifacts = write_solution(out_dir, e.partial)
        return CommandResult(
            status=EXIT_FAULT,
            text=f"Orçamento esgotado: {e}\nArtefatos parciais: {', '.join(artifacts) or 'nenhum'}",
            artifacts=artifacts,
        )
    except HessianError as e:
        return CommandResult(status=EXIT_FAULT, text=f"Falha ao resolver o sistema. Detalhe técnico: {e}")

    if isinstance(result, DivergenceReport):
        path = write_csv(
            os.path.join(out_dir, "divergence.csv"),
            ["radius", "iteration", "component", "grid_n", "rmax"],
            [[result.radius, str(result.iteration), result.component, str(result.grid_n), result.r_max]],
        )
        return CommandResult(
            status=EXIT_VIOLATION,
            text=(
                f"Explosão suspeita dentro de [0, {result.r_max:g}]: r≈{result.radius:.6g} "
                f"({result.component}, iteração {result.iteration}, grid_n={result.grid_n})"
            ),
            artifacts=[path],
        )

    artifacts = write_solution(out_dir, result)
    res1, res2 = fixed_point_residual(cfg.spec, result)
    lines = [
        "Solução radial",
        f"- iterações: {result.iterations_used} (nível de refinamento {result.refinement_level}, "
        f"grid_n={len(result.grid) - 1})",
        f"- Δ sup última iteração: {result.sup_norm_delta:.3e}",
    ]
    if result.resolution_delta is not None:
        lines.append(f"- Δ entre resoluções: {result.resolution_delta:.3e}")
    if result.extrapolated:
        lines.append("- extrapolação de Richardson aplicada")
    lines += [
        f"- u1({result.grid[-1]:g}) = {result.u1[-1]:.9g}, u2({result.grid[-1]:g}) = {result.u2[-1]:.9g}",
        f"- resíduo de ponto fixo relativo: {res1:.3e} / {res2:.3e}",
        f"- artefatos: {', '.join(artifacts)}",
    ]
    return CommandResult(status=EXIT_OK, text="\n".join(lines), artifacts=artifacts)
