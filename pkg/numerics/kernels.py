"""
Constantes C₀, C₀₀, tabelas de núcleos G± e a quadratura cumulativa.

Convenção de lados: o lado 1 é a equação de u₁ (k₁, a₁, p₁, C₀, núcleos G₂±)
e o lado 2 é a equação de u₂ (k₂, a₂, p₂, C₀₀, núcleos G₁±).
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial
from typing import TYPE_CHECKING, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from core.errors import ExprEvalError, GridError, SpecError
from core.logging import get_logger, log_call
from numerics.exprcore import evaluate_array
from numerics.limits import LimitEstimate, limit_estimate

if TYPE_CHECKING:  # pragma: no cover
    from numerics.iteration import ProblemSpec

logger = get_logger("kernels")

# faixa máxima de E dentro de um bloco de reescala do núcleo fundido
_EXP_BLOCK = 300.0


# ---------------------------
# constantes
# ---------------------------
@dataclass(frozen=True)
class HessianConstants:
    n: int
    k1: int
    k2: int
    c0: float
    c00: float

    @staticmethod
    def binom(k: int, n: int) -> int:
        """C_{n−1}^{k−1} = (n−1)!/[(k−1)!(n−k)!]."""
        return comb(n - 1, k - 1)


def constants(n: int, k1: int, k2: int) -> HessianConstants:
    for k in (k1, k2):
        if not 1 <= k <= n:
            raise SpecError(f"ordem k={k} fora de 1..{n}")
    c0 = factorial(n - 1) / (factorial(k1) * factorial(n - k1))
    c00 = factorial(n - 1) / (factorial(k2) * factorial(n - k2))
    return HessianConstants(n, k1, k2, c0, c00)


# ---------------------------
# quadratura
# ---------------------------
def cumulative_integral(grid, samples) -> np.ndarray:
    """Trapézio composto cumulativo, saída[0] = 0."""
    grid = np.asarray(grid, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if len(grid) != len(samples):
        raise GridError("grade e amostras com tamanhos diferentes")
    if np.any(np.diff(grid) <= 0):
        raise GridError("grade não monótona")
    if len(grid) == 1:
        return np.zeros(1)
    return cumulative_trapezoid(samples, grid, initial=0.0)


def richardson(coarse: np.ndarray, fine: np.ndarray) -> np.ndarray:
    """Extrapolação de Richardson para erro O(h²): valores nos nós da grade grossa."""
    fine_on_coarse = np.asarray(fine)[::2]
    if len(fine_on_coarse) != len(coarse):
        raise GridError("a grade fina deve ser a grossa dobrada")
    return (4.0 * fine_on_coarse - np.asarray(coarse)) / 3.0


def uniform_grid(r_max: float, grid_n: int) -> np.ndarray:
    if grid_n < 1 or r_max <= 0:
        raise GridError("grade uniforme exige grid_n ≥ 1 e r_max > 0")
    return np.linspace(0.0, r_max, grid_n + 1)


# ---------------------------
# tabela de núcleos
# ---------------------------
@dataclass(frozen=True)
class KernelSide:
    """Dados de um lado: ordem k, constante C, expoente E e peso p."""
    k: int
    c: float
    e: np.ndarray
    p: np.ndarray


@dataclass(frozen=True)
class KernelTable:
    grid: np.ndarray
    n: int
    hc: HessianConstants
    e1: np.ndarray
    e2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    g1minus: np.ndarray
    g1plus: np.ndarray
    g2minus: np.ndarray
    g2plus: np.ndarray
    g1plus_cumulative: np.ndarray
    g2plus_cumulative: np.ndarray
    # G⁻ em ξ=0 é singular e fica registrado como inf
    gminus_singular_at_origin: bool = True

    def side(self, which: int) -> KernelSide:
        if which == 1:
            return KernelSide(self.hc.k1, self.hc.c0, self.e1, self.p1)
        if which == 2:
            return KernelSide(self.hc.k2, self.hc.c00, self.e2, self.p2)
        raise ValueError("lado deve ser 1 ou 2")


def _sample(expr, grid: np.ndarray, n: int, label: str) -> np.ndarray:
    try:
        values = evaluate_array(expr, grid, n)
    except ExprEvalError as e:
        raise ExprEvalError(f"{label}: {e}") from e
    if not np.all(np.isfinite(values)):
        idx = int(np.argmax(~np.isfinite(values)))
        raise ExprEvalError(f"{label} não finito em r={grid[idx]!r}")
    return values


def _kernels(grid: np.ndarray, n: int, k: int, c: float, e: np.ndarray, p: np.ndarray):
    with np.errstate(divide="ignore", over="ignore", under="ignore", invalid="ignore"):
        gminus = np.where(grid > 0, np.power(np.where(grid > 0, grid, 1.0), k - n) * np.exp(-e) / c, np.inf)
        gplus = np.power(grid, n - 1) * np.exp(e) * p
    return gminus, gplus


@log_call("build_kernel_table")
def build_kernel_table(spec: "ProblemSpec", grid) -> KernelTable:
    """Amostra E₁, E₂, G₁±, G₂± numa grade radial."""
    grid = np.asarray(grid, dtype=float)
    if grid[0] != 0.0 or np.any(np.diff(grid) <= 0):
        raise GridError("a grade deve começar em 0 e ser estritamente crescente")
    n = spec.n
    hc = constants(n, spec.k1, spec.k2)

    a1 = _sample(spec.a1, grid, n, "a1")
    a2 = _sample(spec.a2, grid, n, "a2")
    p1 = _sample(spec.p1, grid, n, "p1")
    p2 = _sample(spec.p2, grid, n, "p2")

    e1 = cumulative_integral(grid, np.power(grid, spec.k1 - 1) * a1 / hc.c0)
    e2 = cumulative_integral(grid, np.power(grid, spec.k2 - 1) * a2 / hc.c00)
    if np.any(np.diff(e1) < 0) or np.any(np.diff(e2) < 0):
        raise SpecError("a1/a2 negativos na grade: E deve ser não decrescente (P1)")

    g2minus, g2plus = _kernels(grid, n, spec.k1, hc.c0, e1, p1)
    g1minus, g1plus = _kernels(grid, n, spec.k2, hc.c00, e2, p2)
    with np.errstate(over="ignore", invalid="ignore"):
        g1c = cumulative_integral(grid, g1plus)
        g2c = cumulative_integral(grid, g2plus)
    return KernelTable(
        grid=grid, n=n, hc=hc, e1=e1, e2=e2, p1=p1, p2=p2,
        g1minus=g1minus, g1plus=g1plus, g2minus=g2minus, g2plus=g2plus,
        g1plus_cumulative=g1c, g2plus_cumulative=g2c,
    )


# ---------------------------
# núcleo fundido
# ---------------------------
def _block_ends(e: np.ndarray) -> np.ndarray:
    ends = []
    start = 0
    last = len(e) - 1
    while start < last:
        end = int(np.searchsorted(e, e[start] + _EXP_BLOCK, side="right")) - 1
        end = min(max(end, start + 1), last)
        ends.append(end)
        start = end
    return np.array(ends, dtype=int)


def fused_weight_array(table: KernelTable, phi, which: int) -> np.ndarray:
    """
    W(t) = (1/C)·∫₀ᵗ (s/t)^{N−k} s^{k−1} e^{E(s)−E(t)} p(s) φ(s) ds em todos os nós.

    Igual a G⁻(t)·∫₀ᵗ G⁺φ, mas a exponencial só aparece como diferença de E
    dentro de blocos com variação de E ≤ 300. W(0) = 0.
    """
    grid = table.grid
    side = table.side(which)
    n, k = table.n, side.k
    phi = np.broadcast_to(np.asarray(phi, dtype=float), grid.shape)
    g = np.power(grid, k - 1) * side.p * phi
    out = np.zeros_like(grid)
    if len(grid) == 1:
        return out

    e = side.e
    carry = 0.0
    start = 0
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        for end in _block_ends(e):
            sl = slice(start, end + 1)
            r = grid[sl]
            ref_e = e[end]
            # integrando reescalado por r_end^{N−k}·e^{E_end}
            r_ref = grid[end]
            scaled = np.power(r / r_ref, n - k) * np.exp(e[sl] - ref_e) * g[sl]
            carry_scaled = carry * np.power(grid[start] / r_ref, n - k) * np.exp(e[start] - ref_e) if start > 0 else 0.0
            cum = carry_scaled + cumulative_trapezoid(scaled, r, initial=0.0)
            # o nó inicial já foi escrito pelo bloco anterior
            first = 0 if start == 0 else 1
            rr = r[first:]
            pos = rr > 0
            factor = np.zeros_like(rr)
            factor[pos] = np.power(r_ref / rr[pos], n - k) * np.exp(ref_e - e[sl][first:][pos])
            out[start + first:end + 1] = cum[first:] * factor / side.c
            carry = cum[-1]
            start = end
    return out


def fused_weight(table: KernelTable, inner_samples, t: float, which: int = 1) -> float:
    """Valor do núcleo fundido no raio `t` (que deve ser um nó da grade)."""
    idx = int(np.searchsorted(table.grid, t))
    if idx >= len(table.grid) or table.grid[idx] != t:
        raise GridError(f"t={t!r} não é nó da grade")
    return float(fused_weight_array(table, inner_samples, which)[idx])


# ---------------------------
# supremos M⁺
# ---------------------------
def m_plus_profile(table: KernelTable, which: int) -> np.ndarray:
    """∫₀ᵗ (G⁻(z)∫₀^z G⁺)^{1/k} dz acumulado; M₁⁺ usa o lado 2, M₂⁺ o lado 1."""
    side = 2 if which == 1 else 1
    w = fused_weight_array(table, 1.0, side)
    k = table.side(side).k
    return cumulative_integral(table.grid, w if k == 1 else np.power(w, 1.0 / k))


def m_plus(
    table: KernelTable,
    which: int,
    r_max: Optional[float] = None,
    r0: float = 1.0,
    finite_ratio: float = 0.5,
) -> LimitEstimate:
    """Supremo M₁⁺ (which=1) ou M₂⁺ (which=2) sobre [0, r_max] com veredito de limite."""
    cum = m_plus_profile(table, which)
    grid = table.grid
    top = grid[-1] if r_max is None else min(float(r_max), grid[-1])
    return limit_estimate(lambda r: float(np.interp(r, grid, cum)), r0, top, finite_ratio=finite_ratio)
