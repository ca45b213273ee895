"""
Aproximações sucessivas monótonas para o sistema radial.

u₁^m(r) = a + ∫₀^r W₁[f₁(u₂^{m−1})]^{1/k₁}
u₂^m(r) = b + ∫₀^r W₂[f₂(u₁^m)]^{1/k₂}      (ordem Gauss–Seidel)

onde W_i[φ](t) = G⁻(t)·∫₀ᵗ G⁺φ é o núcleo fundido de kernels.py.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Tuple, Union

import numpy as np

from core.errors import BlowUpSuspected, NonConvergenceError, SpecError
from core.logging import get_logger, log_call
from numerics.exprcore import Expr, evaluate_array, unparse
from numerics.kernels import (
    KernelTable,
    build_kernel_table,
    cumulative_integral,
    fused_weight_array,
    richardson,
    uniform_grid,
)

logger = get_logger("iteration")


# ---------------------------
# tipos
# ---------------------------
@dataclass(frozen=True)
class ProblemSpec:
    n: int
    k1: int
    k2: int
    a1: Expr
    a2: Expr
    p1: Expr
    p2: Expr
    f1: Expr
    f2: Expr
    central_a: float
    central_b: float

    def __post_init__(self) -> None:
        if self.n < 3:
            raise SpecError(f"dimensão N={self.n} deve ser ≥ 3")
        for name, k in (("k1", self.k1), ("k2", self.k2)):
            if not 1 <= k <= self.n:
                raise SpecError(f"{name}={k} fora de 1..{self.n}")
        if not (self.central_a > 0 and self.central_b > 0):
            raise SpecError("valores centrais a e b devem ser positivos")

    def describe(self) -> str:
        return (
            f"N={self.n} k1={self.k1} k2={self.k2} a={self.central_a:g} b={self.central_b:g} "
            f"f1={unparse(self.f1)} f2={unparse(self.f2)}"
        )


@dataclass(frozen=True)
class IterateState:
    spec: ProblemSpec
    table: KernelTable
    m: int
    u1: np.ndarray
    u2: np.ndarray
    du1: np.ndarray
    du2: np.ndarray
    overflow_guard: float = 1e150

    @property
    def grid(self) -> np.ndarray:
        return self.table.grid


@dataclass(frozen=True)
class SolutionProfile:
    grid: np.ndarray
    u1: np.ndarray
    u2: np.ndarray
    du1: np.ndarray
    du2: np.ndarray
    iterations_used: int
    sup_norm_delta: float
    refinement_level: int
    resolution_delta: Optional[float] = None
    extrapolated: bool = False


@dataclass(frozen=True)
class DivergenceReport:
    """Explosão suspeita dentro de [0, r_max]: resultado de projeto, não falha."""
    radius: float
    iteration: int
    component: str
    grid_n: int
    r_max: float
    message: str = ""


# ---------------------------
# aplicação do mapa integral
# ---------------------------
def integral_map(
    table: KernelTable, phi: np.ndarray, which: int, central: float
) -> Tuple[np.ndarray, np.ndarray]:
    """(u, u′) para u(r) = central + ∫₀^r W[φ]^{1/k}, com u′ tirado do integrando."""
    k = table.side(which).k
    w = np.maximum(fused_weight_array(table, phi, which), 0.0)
    du = w if k == 1 else np.power(w, 1.0 / k)
    u = central + cumulative_integral(table.grid, du)
    u[0] = central
    return u, du


def _guard(values: np.ndarray, grid: np.ndarray, limit: float, iteration: int, component: str) -> None:
    bad = ~np.isfinite(values) | (values > limit)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise BlowUpSuspected(float(grid[idx]), iteration, component)


def init_state(
    spec: ProblemSpec, grid, table: Optional[KernelTable] = None, overflow_guard: float = 1e150
) -> IterateState:
    table = table if table is not None else build_kernel_table(spec, grid)
    size = len(table.grid)
    return IterateState(
        spec=spec,
        table=table,
        m=0,
        u1=np.full(size, float(spec.central_a)),
        u2=np.full(size, float(spec.central_b)),
        du1=np.zeros(size),
        du2=np.zeros(size),
        overflow_guard=overflow_guard,
    )


def step(state: IterateState) -> IterateState:
    spec, table = state.spec, state.table
    m = state.m + 1
    phi1 = evaluate_array(spec.f1, state.u2, spec.n)
    u1, du1 = integral_map(table, phi1, 1, spec.central_a)
    _guard(u1, table.grid, state.overflow_guard, m, "u1")
    phi2 = evaluate_array(spec.f2, u1, spec.n)
    u2, du2 = integral_map(table, phi2, 2, spec.central_b)
    _guard(u2, table.grid, state.overflow_guard, m, "u2")
    return replace(state, m=m, u1=u1, u2=u2, du1=du1, du2=du2)


def _sup(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if len(a) else 0.0


def _to_profile(state: IterateState, delta: float, level: int) -> SolutionProfile:
    return SolutionProfile(
        grid=state.grid, u1=state.u1, u2=state.u2, du1=state.du1, du2=state.du2,
        iterations_used=state.m, sup_norm_delta=delta, refinement_level=level,
    )


def _iterate(
    state: IterateState,
    tol: float,
    max_iter: int,
    level: int,
    monitor: Optional[Callable[[IterateState], None]],
) -> SolutionProfile:
    delta = float("inf")
    while state.m < max_iter:
        new = step(state)
        delta = max(_sup(new.u1, state.u1), _sup(new.u2, state.u2))
        state = new
        if monitor is not None:
            monitor(state)
        if delta < tol:
            return _to_profile(state, delta, level)
    partial = _to_profile(state, delta, level)
    raise NonConvergenceError(
        f"sem convergência após {max_iter} iterações (Δ={delta:.3e}, grid_n={len(state.grid) - 1})",
        partial=partial,
    )


# ---------------------------
# solve
# ---------------------------
@log_call("solve")
def solve(
    spec: ProblemSpec,
    r_max: float,
    grid_n: int = 256,
    tol: float = 1e-8,
    max_iter: int = 200,
    refine_cap: int = 6,
    extrapolate: bool = False,
    overflow_guard: float = 1e150,
    monitor: Optional[Callable[[IterateState], None]] = None,
) -> Union[SolutionProfile, DivergenceReport]:
    """
    Itera até Δ < tol em cada resolução e dobra grid_n até a diferença entre
    resoluções (nos nós da grade grossa) ficar < tol ou atingir refine_cap.
    """
    if tol <= 0:
        raise ValueError("tol deve ser positivo")
    if grid_n < 2:
        raise ValueError("grid_n deve ser ≥ 2")

    previous: Optional[SolutionProfile] = None
    n = grid_n
    level = 0
    while True:
        grid = uniform_grid(r_max, n)
        try:
            state = init_state(spec, grid, overflow_guard=overflow_guard)
            profile = _iterate(state, tol, max_iter, level, monitor)
        except BlowUpSuspected as e:
            logger.warning("explosão suspeita: %s", e)
            return DivergenceReport(
                radius=e.radius, iteration=e.iteration, component=e.component,
                grid_n=n, r_max=float(r_max), message=str(e),
            )
        logger.info(
            "nível %d: grid_n=%d iterações=%d Δ=%.3e", level, n, profile.iterations_used, profile.sup_norm_delta
        )

        if previous is not None:
            res = max(_sup(profile.u1[::2], previous.u1), _sup(profile.u2[::2], previous.u2))
            profile = replace(profile, resolution_delta=res)
            if res < tol:
                break
        if level >= refine_cap:
            if previous is not None or not extrapolate:
                logger.warning("limite de refinamento atingido (nível %d, grid_n=%d)", level, n)
                break
        previous = profile
        n *= 2
        level += 1

    if extrapolate and previous is not None:
        return SolutionProfile(
            grid=previous.grid,
            u1=richardson(previous.u1, profile.u1),
            u2=richardson(previous.u2, profile.u2),
            du1=richardson(previous.du1, profile.du1),
            du2=richardson(previous.du2, profile.du2),
            iterations_used=profile.iterations_used,
            sup_norm_delta=profile.sup_norm_delta,
            refinement_level=profile.refinement_level,
            resolution_delta=profile.resolution_delta,
            extrapolated=True,
        )
    return profile


# ---------------------------
# resíduo de ponto fixo
# ---------------------------
def fixed_point_residual(spec: ProblemSpec, profile: SolutionProfile) -> Tuple[float, float]:
    """Resíduo relativo sup|T(u) − u| / max(1, sup|u|) de cada equação integral."""
    table = build_kernel_table(spec, profile.grid)
    mapped1, _ = integral_map(table, evaluate_array(spec.f1, profile.u2, spec.n), 1, spec.central_a)
    mapped2, _ = integral_map(table, evaluate_array(spec.f2, profile.u1, spec.n), 2, spec.central_b)
    r1 = _sup(mapped1, profile.u1) / max(1.0, float(np.max(np.abs(profile.u1))))
    r2 = _sup(mapped2, profile.u2) / max(1.0, float(np.max(np.abs(profile.u2))))
    return r1, r2
