from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import TYPE_CHECKING, Tuple

import numpy as np

from core.errors import GridError, SpecError
from core.logging import get_logger, log_call
from numerics.exprcore import Expr, evaluate_array, evaluate_jet

if TYPE_CHECKING:  # pragma: no cover
    from numerics.iteration import ProblemSpec

logger = get_logger("hessian")


# ---------------------------
# perfis radiais
# ---------------------------
@dataclass(frozen=True)
class RadialProfile:
    """ξ, ξ′, ξ″ amostrados numa grade radial r₀=0 < r₁ < … < r_n."""
    grid: np.ndarray
    xi: np.ndarray
    dxi: np.ndarray
    ddxi: np.ndarray

    def __post_init__(self) -> None:
        sizes = {len(self.grid), len(self.xi), len(self.dxi), len(self.ddxi)}
        if len(sizes) != 1:
            raise GridError("grid, xi, dxi e ddxi precisam ter o mesmo tamanho")
        validate_grid(self.grid)
        if self.dxi[0] != 0.0:
            raise GridError(f"ξ′(0) deve ser 0 (recebido {self.dxi[0]!r})")


def validate_grid(grid: np.ndarray) -> None:
    if len(grid) == 0 or grid[0] != 0.0:
        raise GridError("a grade radial deve começar em r=0")
    if np.any(np.diff(grid) <= 0):
        raise GridError("a grade radial deve ser estritamente crescente")


def profile_from_values(grid, xi) -> RadialProfile:
    """Derivadas por diferenças finitas de 2a ordem (centrais no interior, laterais nas bordas)."""
    grid = np.asarray(grid, dtype=float)
    xi = np.asarray(xi, dtype=float)
    validate_grid(grid)
    if len(grid) < 3:
        raise GridError("diferenças finitas de 2a ordem exigem ao menos 3 nós")
    dxi = np.gradient(xi, grid, edge_order=2)
    ddxi = np.gradient(dxi, grid, edge_order=2)
    dxi[0] = 0.0
    return RadialProfile(grid, xi, dxi, ddxi)


def profile_from_expr(expr: Expr, grid, n: int) -> RadialProfile:
    """Derivadas exatas (até arredondamento) via jatos de Taylor."""
    grid = np.asarray(grid, dtype=float)
    validate_grid(grid)
    jet = evaluate_jet(expr, grid, n)
    dxi = np.array(jet.d1, dtype=float)
    if abs(dxi[0]) > 1e-12 * max(1.0, float(np.max(np.abs(dxi)))):
        raise GridError(f"perfil radial exige ξ′(0)=0; a expressão dá {dxi[0]!r}")
    dxi[0] = 0.0
    return RadialProfile(grid, np.array(jet.v, dtype=float), dxi, np.array(jet.d2, dtype=float))


# ---------------------------
# autovalores e S_k
# ---------------------------
def _check_orders(k: int, n: int) -> None:
    if n < 1 or not 1 <= k <= n:
        raise SpecError(f"combinação inválida k={k}, N={n}")


def eigenvalues_radial(p: RadialProfile, i: int, n: int) -> np.ndarray:
    """λ(D²u) em r_i: (ξ″, ξ′/r, …, ξ′/r) para r>0 e (ξ″(0), …) em r=0."""
    r = p.grid[i]
    if r == 0.0:
        return np.full(n, p.ddxi[i])
    lam = np.full(n, p.dxi[i] / r)
    lam[0] = p.ddxi[i]
    return lam


def s_k_array(dxi, ddxi, r, k: int, n: int) -> np.ndarray:
    _check_orders(k, n)
    dxi, ddxi, r = np.broadcast_arrays(
        np.asarray(dxi, dtype=float), np.asarray(ddxi, dtype=float), np.asarray(r, dtype=float)
    )
    binom = comb(n - 1, k - 1)
    at_origin = r == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(at_origin, 0.0, dxi / np.where(at_origin, 1.0, r))
    out = binom * ddxi * ratio ** (k - 1) + binom * ((n - k) / k) * ratio ** k
    return np.where(at_origin, comb(n, k) * ddxi ** k, out)


def s_k(dxi: float, ddxi: float, r: float, k: int, n: int) -> float:
    """S_k(λ(D²u)) radial; em r=0 usa C_N^k (ξ″(0))^k."""
    if r < 0:
        raise GridError("raio negativo")
    return float(s_k_array(dxi, ddxi, r, k, n))


def principal_minor_sum(eigenvalues: np.ndarray, k: int) -> float:
    """Soma dos menores principais k×k de diag(eigenvalues) (força bruta)."""
    return float(sum(np.prod([eigenvalues[j] for j in idx]) for idx in combinations(range(len(eigenvalues)), k)))


# ---------------------------
# resíduo do sistema
# ---------------------------
@log_call("pde_residual")
def pde_residual(spec: "ProblemSpec", u1: RadialProfile, u2: RadialProfile) -> Tuple[np.ndarray, np.ndarray]:
    """
    residual_1 = S_{k1}(u1) + a1|u1′|^{k1} − p1 f1(u2)
    residual_2 = S_{k2}(u2) + a2|u2′|^{k2} − p2 f2(u1)
    """
    if len(u1.grid) != len(u2.grid) or not np.array_equal(u1.grid, u2.grid):
        raise GridError("u1 e u2 precisam compartilhar a grade")
    r = u1.grid
    n = spec.n

    for name, prof in (("u1", u1), ("u2", u2)):
        if np.any(prof.dxi < 0):
            idx = int(np.argmax(prof.dxi < 0))
            logger.warning("%s tem derivada negativa em r=%.6g (sistema radial supõe u′ ≥ 0)", name, r[idx])

    res1 = (
        s_k_array(u1.dxi, u1.ddxi, r, spec.k1, n)
        + evaluate_array(spec.a1, r, n) * np.abs(u1.dxi) ** spec.k1
        - evaluate_array(spec.p1, r, n) * evaluate_array(spec.f1, u2.xi, n)
    )
    res2 = (
        s_k_array(u2.dxi, u2.ddxi, r, spec.k2, n)
        + evaluate_array(spec.a2, r, n) * np.abs(u2.dxi) ** spec.k2
        - evaluate_array(spec.p2, r, n) * evaluate_array(spec.f2, u1.xi, n)
    )
    return res1, res2
