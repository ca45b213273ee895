"""
Classificação limitada/explosiva das soluções radiais.

Calcula M₁, M₂, m₁, m₂, M⁺, as transformadas H₁₂/H₂₁ (e inversas), as quatro
integrais P̄/P̲ com seus limites no infinito e aplica a tabela de decisão dos
dois teoremas de existência. Também verifica os envelopes (sanduíche) sobre
um perfil resolvido.

Índices: "12" refere-se à equação de u₁ (lado 1 dos núcleos), "21" à de u₂.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field
from scipy.integrate import quad
from scipy.optimize import brentq

from core.errors import (
    HessianError,
    HypothesisViolation,
    SingularEndpointError,
    UnboundedPreimageError,
)
from core.logging import get_logger, log_call
from numerics.exprcore import Expr, evaluate, evaluate_array
from numerics.iteration import IterateState, ProblemSpec, SolutionProfile
from numerics.kernels import (
    KernelTable,
    build_kernel_table,
    cumulative_integral,
    fused_weight_array,
    m_plus,
    m_plus_profile,
    uniform_grid,
)
from numerics.limits import LimitEstimate, limit_estimate

logger = get_logger("classify")

Pair = Literal["12", "21"]
Variant = Literal["standard", "mplus"]
PKind = Literal["bar12", "under12", "bar21", "under21"]

VERDICTS = (
    "Thm1-case1 bounded/bounded",
    "Thm1-case2 large/large",
    "Thm1-case3 bounded/large",
    "Thm1-case4 large/bounded",
    "Thm2-i bounded-with-sandwich",
    "Thm2-ii large/bounded",
    "Thm2-iii bounded/large",
    "Hypotheses-not-met",
    "Inconclusive",
)
THM1_CASE1, THM1_CASE2, THM1_CASE3, THM1_CASE4, THM2_I, THM2_II, THM2_III, NOT_MET, INCONCLUSIVE = VERDICTS

# lados com envelope superior / inferior por veredito
SANDWICH_SIDES: Dict[str, Tuple[Tuple[int, ...], Tuple[int, ...]]] = {
    THM1_CASE1: ((1, 2), ()),
    THM1_CASE2: ((1, 2), (1, 2)),
    THM1_CASE3: ((1, 2), (2,)),
    THM1_CASE4: ((1, 2), (1,)),
    THM2_I: ((1, 2), (1, 2)),
    THM2_II: ((1,), (1,)),
    THM2_III: ((2,), (2,)),
}

ESTIMATE_ORDER = ("h12", "h21", "pbar12", "pbar21", "punder12", "punder21")


# ---------------------------
# testemunhas e constantes
# ---------------------------
@dataclass(frozen=True)
class GrowthWitness:
    """Dados de crescimento: h, φ̄, c̄ (majoração) e φ̲, c̲ (minoração)."""
    h1: Optional[Expr] = None
    h2: Optional[Expr] = None
    phibar1: Optional[Expr] = None
    phibar2: Optional[Expr] = None
    phiunder1: Optional[Expr] = None
    phiunder2: Optional[Expr] = None
    cbar1: float = 1.0
    cbar2: float = 1.0
    cunder1: float = 1.0
    cunder2: float = 1.0
    # None: afirmada quando as componentes necessárias existem
    c21: Optional[bool] = None
    c22: Optional[bool] = None
    c31: Optional[bool] = None
    c32: Optional[bool] = None
    # expoente do denominador alternativo de H₂₁ (impresso como 1/k₁)
    h21_exponent: Optional[float] = None

    def __post_init__(self) -> None:
        for name in ("cbar1", "cbar2", "cunder1", "cunder2"):
            if not getattr(self, name) > 0:
                raise HypothesisViolation("(C2)/(C3)", f"{name} deve ser positivo")

    @property
    def has_c21(self) -> bool:
        return self.c21 is not False and self.h1 is not None and self.phibar1 is not None

    @property
    def has_c22(self) -> bool:
        return self.c22 is not False and self.h2 is not None and self.phibar2 is not None

    @property
    def has_c31(self) -> bool:
        return self.c31 is not False and self.phiunder1 is not None

    @property
    def has_c32(self) -> bool:
        return self.c32 is not False and self.phiunder2 is not None


class DerivedConstants(BaseModel):
    m1_cap: float
    m2_cap: float
    m1_low: float
    m2_low: float
    m1_plus: Optional[LimitEstimate] = None
    m2_plus: Optional[LimitEstimate] = None

    def cap(self, pair: Pair) -> float:
        return self.m1_cap if pair == "12" else self.m2_cap

    def plus(self, pair: Pair) -> Optional[LimitEstimate]:
        return self.m1_plus if pair == "12" else self.m2_plus


def kth_root(value: float, k: int) -> float:
    return value if k == 1 else value ** (1.0 / k)


def _root_array(values: np.ndarray, k: int) -> np.ndarray:
    return values if k == 1 else np.power(values, 1.0 / k)


def growth_constants(spec: ProblemSpec) -> DerivedConstants:
    """Só M₁, M₂, m₁, m₂ (sem os supremos M⁺)."""
    a, b, n = spec.central_a, spec.central_b, spec.n
    f2a = kth_root(evaluate(spec.f2, a, n), spec.k2)
    f1b = kth_root(evaluate(spec.f1, b, n), spec.k1)

    if b > f2a:
        if f2a <= 0:
            raise HypothesisViolation("(C1)", f"f2(a)=0 com a={a!r}; M1 exigiria divisão por zero")
        m1_cap = b / f2a
    else:
        m1_cap = 1.0
    if a > f1b:
        if f1b <= 0:
            raise HypothesisViolation("(C1)", f"f1(b)=0 com b={b!r}; M2 exigiria divisão por zero")
        m2_cap = a / f1b
    else:
        m2_cap = 1.0
    return DerivedConstants(m1_cap=m1_cap, m2_cap=m2_cap, m1_low=min(b, f2a), m2_low=min(a, f1b))


@log_call("derive_constants")
def derive_constants(
    spec: ProblemSpec,
    r_max: float = 1024.0,
    grid_n: int = 16384,
    table: Optional[KernelTable] = None,
    r0: float = 1.0,
    finite_ratio: float = 0.5,
) -> DerivedConstants:
    """M₁, M₂ (majoração), m₁, m₂ (minoração) e os supremos M₁⁺, M₂⁺."""
    base = growth_constants(spec)
    if table is None:
        table = build_kernel_table(spec, uniform_grid(r_max, grid_n))
    return base.model_copy(update={
        "m1_plus": m_plus(table, 1, r_max, r0=r0, finite_ratio=finite_ratio),
        "m2_plus": m_plus(table, 2, r_max, r0=r0, finite_ratio=finite_ratio),
    })


def effective_witness(
    spec: ProblemSpec, witness: Optional[GrowthWitness], constants: DerivedConstants
) -> Tuple[GrowthWitness, List[str]]:
    """Preenche φ̲ = f, c̲ = 1 quando m ≥ 1 e não há testemunha de minoração."""
    w = witness or GrowthWitness()
    flags: List[str] = []
    if constants.m1_low >= 1 and not w.has_c31:
        w = replace(w, phiunder1=spec.f1, cunder1=1.0, c31=True)
        flags.append("d")
    if constants.m2_low >= 1 and not w.has_c32:
        w = replace(w, phiunder2=spec.f2, cunder2=1.0, c32=True)
        flags.append("e")
    if flags == ["d", "e"]:
        flags = ["f"]
    if flags:
        logger.info("defaults de minoração aplicados: %s", ",".join(flags))
    return w, flags


def _mplus_usable(estimate: Optional[LimitEstimate]) -> bool:
    return estimate is not None and estimate.verdict == "Finite" and estimate.best_value > 0


def choose_variants(
    witness: GrowthWitness, constants: DerivedConstants
) -> Tuple[Optional[Variant], Optional[Variant], List[str], List[str]]:
    """Variante de H por lado: padrão com testemunha (C2), alternativa com M⁺ finito."""
    flags: List[str] = []
    notes: List[str] = []
    out: List[Optional[Variant]] = []
    for pair, has, flag in (("12", witness.has_c21, "a"), ("21", witness.has_c22, "b")):
        usable = _mplus_usable(constants.plus(pair))  # type: ignore[arg-type]
        if has:
            out.append("standard")
            if usable:
                notes.append(f"H{pair}: variante com M⁺ finito disponível como alternativa")
        elif usable:
            out.append("mplus")
            flags.append(flag)
        else:
            out.append(None)
    if flags == ["a", "b"]:
        flags = ["c"]
    return out[0], out[1], flags, notes


# ---------------------------
# transformadas H
# ---------------------------
def _pair(which: Union[str, Tuple[int, int]]) -> Pair:
    if which in ("12", (1, 2)):
        return "12"
    if which in ("21", (2, 1)):
        return "21"
    raise ValueError(f"par inválido: {which!r}")


def h_lower(spec: ProblemSpec, which) -> float:
    return spec.central_a if _pair(which) == "12" else spec.central_b


def _h_denominator(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    constants: DerivedConstants,
    pair: Pair,
    variant: Variant,
    exponent_override: Optional[float],
) -> Callable[[np.ndarray], np.ndarray]:
    n = spec.n
    if pair == "12":
        k_out, k_in, f_in, outer = spec.k1, spec.k2, spec.f2, witness.h1 if witness else None
        mplus_outer, cap = spec.f1, constants.m1_cap
    else:
        k_out, k_in, f_in, outer = spec.k2, spec.k1, spec.f1, witness.h2 if witness else None
        mplus_outer, cap = spec.f2, constants.m2_cap

    if variant == "standard":
        if outer is None:
            raise HypothesisViolation("(C2)", f"H{pair} padrão exige h{pair[0]}")
        scale = cap
        exponent = 1.0 / k_out
    else:
        plus = constants.plus(pair)
        if not _mplus_usable(plus):
            raise HypothesisViolation("(C2)", f"H{pair} alternativo exige M{pair[0]}⁺ finito e positivo")
        outer = mplus_outer
        scale = cap * (1.0 + plus.best_value)  # type: ignore[union-attr]
        # o denominador alternativo de H₂₁ é usado como impresso: expoente 1/k₁
        exponent = 1.0 / spec.k1
    if exponent_override is not None:
        exponent = float(exponent_override)

    def denominator(t: np.ndarray) -> np.ndarray:
        inner = scale * _root_array(evaluate_array(f_in, t, n), k_in)
        value = evaluate_array(outer, inner, n)
        return value if exponent == 1.0 else np.power(value, exponent)

    return denominator


def h_transform(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    constants: DerivedConstants,
    which,
    r: float,
    variant: Variant = "standard",
    exponent_override: Optional[float] = None,
) -> float:
    """H₁₂(r) = ∫ₐ^r dt / h₁^{1/k₁}(M₁ f₂^{1/k₂}(t)) e análogos."""
    pair = _pair(which)
    lower = h_lower(spec, pair)
    if r < lower:
        raise ValueError(f"H{pair} definido para r ≥ {lower!r}")
    den = _h_denominator(spec, witness, constants, pair, variant, exponent_override)
    d0 = float(den(np.asarray(lower)))
    if not d0 > 0 or not np.isfinite(d0):
        raise SingularEndpointError(f"denominador de H{pair} nulo ou inválido no limite inferior {lower!r}")
    if r == lower:
        return 0.0
    value, _ = quad(lambda t: 1.0 / float(den(np.asarray(t))), lower, r, limit=500, epsabs=1e-14, epsrel=1e-13)
    return float(value)


def h_inverse(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    constants: DerivedConstants,
    which,
    x: float,
    variant: Variant = "standard",
    exponent_override: Optional[float] = None,
    h_infinity: Optional[LimitEstimate] = None,
) -> float:
    """r com H(r) = x, por duplicação do intervalo e refinamento de Brent."""
    pair = _pair(which)
    lower = h_lower(spec, pair)
    if x < 0:
        raise ValueError("H⁻¹ definido apenas para x ≥ 0")
    if x == 0:
        return lower
    if h_infinity is not None and h_infinity.verdict == "Finite" and x >= h_infinity.best_value:
        raise UnboundedPreimageError(f"x={x!r} ≥ H{pair}(∞)≈{h_infinity.best_value!r}")

    def gap(r: float) -> float:
        return h_transform(spec, witness, constants, pair, r, variant, exponent_override) - x

    width = 1.0
    while gap(lower + width) < 0:
        width *= 2.0
        if width > 2.0**64:
            raise UnboundedPreimageError(f"x={x!r} além do alcance de H{pair}")
    return float(brentq(gap, lower + width / 2.0 if width > 1.0 else lower, lower + width, xtol=1e-13, rtol=1e-15))


@dataclass(frozen=True)
class HTable:
    """H tabelado numa grade de u para avaliação e inversão vetorizadas."""
    u: np.ndarray
    h: np.ndarray
    integrand: np.ndarray

    def __call__(self, values) -> np.ndarray:
        return np.interp(values, self.u, self.h)

    def inverse(self, targets) -> np.ndarray:
        """Inversa por interpolação; alvos acima do topo da tabela viram +inf."""
        targets = np.asarray(targets, dtype=float)
        out = np.interp(targets, self.h, self.u)
        return np.where(targets > self.h[-1], np.inf, out)

    def coarse(self) -> "HTable":
        u, integrand = self.u[::2], self.integrand[::2]
        return HTable(u, cumulative_integral(u, integrand), integrand)


def h_table(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    constants: DerivedConstants,
    which,
    top: float,
    variant: Variant = "standard",
    exponent_override: Optional[float] = None,
    size: int = 16385,
) -> HTable:
    pair = _pair(which)
    lower = h_lower(spec, pair)
    den = _h_denominator(spec, witness, constants, pair, variant, exponent_override)
    u = np.linspace(lower, max(top, lower + 1.0), size)
    with np.errstate(divide="ignore"):
        integrand = 1.0 / den(u)
    if not np.isfinite(integrand[0]):
        raise SingularEndpointError(f"denominador de H{pair} nulo no limite inferior {lower!r}")
    return HTable(u, cumulative_integral(u, integrand), integrand)


# ---------------------------
# integrais P
# ---------------------------
def _p_parts(
    spec: ProblemSpec, witness: Optional[GrowthWitness], kind: PKind, variant: Variant
) -> Tuple[int, Optional[Expr]]:
    side = 1 if kind.endswith("12") else 2
    if kind.startswith("bar") and variant == "mplus":
        return side, None
    w = witness or GrowthWitness()
    phi = {
        "bar12": w.phibar1,
        "under12": w.phiunder1,
        "bar21": w.phibar2,
        "under21": w.phiunder2,
    }[kind]
    if phi is None:
        label = "(C2)" if kind.startswith("bar") else "(C3)"
        raise HypothesisViolation(label, f"testemunha ausente para P {kind}")
    return side, phi


def p_integral_profile(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    kind: PKind,
    table: KernelTable,
    variant: Variant = "standard",
) -> np.ndarray:
    """
    P(r) em todos os nós: ∫₀^r W_i[φ(1 + ∫₀ᵗ W_j[1]^{1/k_j})]^{1/k_i}.

    Na variante com M⁺ finito, P̄ usa φ̄ ≡ 1.
    """
    side, phi_expr = _p_parts(spec, witness, kind, variant)
    k = table.side(side).k
    if phi_expr is None:
        phi = np.ones_like(table.grid)
    else:
        inner = 1.0 + m_plus_profile(table, side)
        phi = evaluate_array(phi_expr, inner, spec.n)
    w = np.maximum(fused_weight_array(table, phi, side), 0.0)
    return cumulative_integral(table.grid, _root_array(w, k))


@log_call("p_integral")
def p_integral(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness],
    which: PKind,
    r: float,
    table: Optional[KernelTable] = None,
    grid_n: int = 4096,
    variant: Variant = "standard",
) -> float:
    if r == 0:
        return 0.0
    if table is None:
        table = build_kernel_table(spec, uniform_grid(r, grid_n))
    if r > table.grid[-1]:
        raise ValueError("r além da grade da tabela de núcleos")
    values = p_integral_profile(spec, witness, which, table, variant)
    return float(np.interp(r, table.grid, values))


# ---------------------------
# tabela de decisão
# ---------------------------
class ClassificationReport(BaseModel):
    constants: DerivedConstants
    p_bar_12: Optional[LimitEstimate] = None
    p_bar_21: Optional[LimitEstimate] = None
    p_under_12: Optional[LimitEstimate] = None
    p_under_21: Optional[LimitEstimate] = None
    h_12_inf: Optional[LimitEstimate] = None
    h_21_inf: Optional[LimitEstimate] = None
    verdict: str
    blocking: Optional[str] = None
    remark_variant_used: List[str] = Field(default_factory=list)
    h_variant_12: Optional[str] = None
    h_variant_21: Optional[str] = None
    notes: List[str] = Field(default_factory=list)

    def estimates(self) -> Dict[str, Optional[LimitEstimate]]:
        return {
            "h12": self.h_12_inf,
            "h21": self.h_21_inf,
            "pbar12": self.p_bar_12,
            "pbar21": self.p_bar_21,
            "punder12": self.p_under_12,
            "punder21": self.p_under_21,
        }


def _is(est: Optional[LimitEstimate], verdict: str) -> bool:
    return est is not None and est.verdict == verdict


def _strictly_below(p: Optional[LimitEstimate], h: Optional[LimitEstimate]) -> bool:
    """p(∞) < h(∞) < ∞ com folga maior que as barras de erro combinadas."""
    if not (_is(p, "Finite") and _is(h, "Finite")):
        return False
    err = (p.extrapolation_error or 0.0) + (h.extrapolation_error or 0.0)  # type: ignore[union-attr]
    return p.best_value + err < h.best_value  # type: ignore[union-attr]


def decide(
    estimates: Dict[str, Optional[LimitEstimate]], available: Dict[str, bool]
) -> Tuple[str, Optional[str]]:
    """
    Veredito a partir das seis estimativas (chaves de ESTIMATE_ORDER) e das
    condições de minoração disponíveis (chaves "c31", "c32"). As chaves
    opcionais "m1_plus"/"m2_plus" só pesam quando falta H do lado.
    Retorna (veredito, estimativa bloqueante ou motivo).
    """
    for key in ESTIMATE_ORDER:
        if _is(estimates.get(key), "Inconclusive"):
            return INCONCLUSIVE, key

    h12, h21 = estimates.get("h12"), estimates.get("h21")
    pb12, pb21 = estimates.get("pbar12"), estimates.get("pbar21")
    pu12, pu21 = estimates.get("punder12"), estimates.get("punder21")
    c31, c32 = available.get("c31", False), available.get("c32", False)

    if h12 is None or h21 is None:
        # sem testemunha (C2) o lado depende de M⁺; M⁺ inconclusivo bloqueia
        for h, key in ((h12, "m1_plus"), (h21, "m2_plus")):
            if h is None and _is(estimates.get(key), "Inconclusive"):
                return INCONCLUSIVE, key
        return NOT_MET, "sem (C2) nem M⁺ finito para um dos lados"

    if _is(h12, "Divergent") and _is(h21, "Divergent"):
        if _is(pb12, "Finite") and _is(pb21, "Finite"):
            return THM1_CASE1, None
        if c31 and c32 and _is(pu12, "Divergent") and _is(pu21, "Divergent"):
            return THM1_CASE2, None
        if c32 and _is(pb12, "Finite") and _is(pu21, "Divergent"):
            return THM1_CASE3, None
        if c31 and _is(pu12, "Divergent") and _is(pb21, "Finite"):
            return THM1_CASE4, None
        return NOT_MET, "H divergentes mas nenhum caso de P se aplica"

    if _is(h12, "Finite") and _is(h21, "Finite"):
        if c31 and c32 and _strictly_below(pb12, h12) and _strictly_below(pb21, h21):
            return THM2_I, None
        return NOT_MET, "H finitos sem P̄ < H nos dois lados"

    if _is(h12, "Divergent") and _is(h21, "Finite"):
        if c31 and _is(pu12, "Divergent") and _strictly_below(pu21, h21):
            return THM2_II, None
        return NOT_MET, "H12 divergente e H21 finito sem as condições do caso ii"

    if _is(h12, "Finite") and _is(h21, "Divergent"):
        if c32 and _is(pu21, "Divergent") and _strictly_below(pb12, h12):
            return THM2_III, None
        return NOT_MET, "H12 finito e H21 divergente sem as condições do caso iii"

    return NOT_MET, None


# ---------------------------
# classify
# ---------------------------
def _safe_estimate(label: str, fn: Callable[[], LimitEstimate], notes: List[str]) -> Optional[LimitEstimate]:
    try:
        return fn()
    except HessianError as e:
        notes.append(f"{label}: {e}")
        logger.warning("%s indisponível: %s", label, e)
        return None


@log_call("classify")
def classify(
    spec: ProblemSpec,
    witness: Optional[GrowthWitness] = None,
    r_budget: float = 1024.0,
    grid_n: int = 16384,
    r0: float = 1.0,
    finite_ratio: float = 0.5,
) -> ClassificationReport:
    table = build_kernel_table(spec, uniform_grid(r_budget, grid_n))
    grid = table.grid
    consts = derive_constants(spec, r_budget, table=table, r0=r0, finite_ratio=finite_ratio)
    eff, remark_flags = effective_witness(spec, witness, consts)
    v12, v21, variant_flags, notes = choose_variants(eff, consts)
    if variant_flags:
        logger.warning("transformadas H alternativas (M⁺ finito) em uso: %s", ",".join(variant_flags))

    def estimate_h(pair: Pair, variant: Optional[Variant]) -> Optional[LimitEstimate]:
        if variant is None:
            return None
        lower = h_lower(spec, pair)
        return _safe_estimate(
            f"H{pair}",
            lambda: limit_estimate(
                lambda r: h_transform(spec, eff, consts, pair, lower + r, variant, eff.h21_exponent if pair == "21" else None),
                r0, r_budget, finite_ratio,
            ),
            notes,
        )

    def estimate_p(kind: PKind, variant: Optional[Variant]) -> Optional[LimitEstimate]:
        if kind.startswith("bar") and variant is None:
            return None

        def run() -> LimitEstimate:
            values = p_integral_profile(spec, eff, kind, table, variant or "standard")
            return limit_estimate(lambda r: float(np.interp(r, grid, values)), r0, r_budget, finite_ratio)

        return _safe_estimate(f"P {kind}", run, notes)

    h12 = estimate_h("12", v12)
    h21 = estimate_h("21", v21)
    estimates = {
        "h12": h12,
        "h21": h21,
        "pbar12": estimate_p("bar12", v12),
        "pbar21": estimate_p("bar21", v21),
        "punder12": estimate_p("under12", "standard") if eff.has_c31 else None,
        "punder21": estimate_p("under21", "standard") if eff.has_c32 else None,
    }
    verdict, blocking = decide(
        {**estimates, "m1_plus": consts.m1_plus, "m2_plus": consts.m2_plus},
        {"c31": eff.has_c31, "c32": eff.has_c32},
    )
    logger.info("veredito: %s%s", verdict, f" ({blocking})" if blocking else "")
    return ClassificationReport(
        constants=consts,
        p_bar_12=estimates["pbar12"],
        p_bar_21=estimates["pbar21"],
        p_under_12=estimates["punder12"],
        p_under_21=estimates["punder21"],
        h_12_inf=h12,
        h_21_inf=h21,
        verdict=verdict,
        blocking=blocking,
        remark_variant_used=remark_flags + variant_flags,
        h_variant_12=v12,
        h_variant_21=v21,
        notes=notes,
    )


# ---------------------------
# envelopes
# ---------------------------
@dataclass(frozen=True)
class SandwichEnvelopes:
    grid: np.ndarray
    lower1: Optional[np.ndarray] = None
    upper1: Optional[np.ndarray] = None
    lower2: Optional[np.ndarray] = None
    upper2: Optional[np.ndarray] = None
    tolerance: float = 0.0


class SandwichResult(BaseModel):
    passed: bool
    worst_violation: float
    worst_radius: Optional[float] = None
    worst_bound: Optional[str] = None
    tolerance: float
    checked: List[str] = Field(default_factory=list)


def _side_variant(report: ClassificationReport, side: int) -> Variant:
    value = report.h_variant_12 if side == 1 else report.h_variant_21
    return "mplus" if value == "mplus" else "standard"


def _envelopes_on(
    spec: ProblemSpec,
    report: ClassificationReport,
    witness: GrowthWitness,
    grid: np.ndarray,
    tops: Tuple[float, float],
    table_size: int,
) -> Dict[str, np.ndarray]:
    upper_sides, lower_sides = SANDWICH_SIDES[report.verdict]
    table = build_kernel_table(spec, grid)
    out: Dict[str, np.ndarray] = {}
    for side in upper_sides:
        pair: Pair = "12" if side == 1 else "21"
        variant = _side_variant(report, side)
        k = spec.k1 if side == 1 else spec.k2
        cbar = 1.0 if variant == "mplus" else (witness.cbar1 if side == 1 else witness.cbar2)
        pbar = p_integral_profile(spec, witness, f"bar{pair}", table, variant)  # type: ignore[arg-type]
        exponent = witness.h21_exponent if pair == "21" else None
        ht = h_table(spec, witness, report.constants, pair, tops[side - 1], variant, exponent, table_size)
        out[f"upper{side}"] = ht.inverse(kth_root(cbar, k) * pbar)
    for side in lower_sides:
        pair = "12" if side == 1 else "21"
        k = spec.k1 if side == 1 else spec.k2
        cunder = witness.cunder1 if side == 1 else witness.cunder2
        central = spec.central_a if side == 1 else spec.central_b
        punder = p_integral_profile(spec, witness, f"under{pair}", table)  # type: ignore[arg-type]
        out[f"lower{side}"] = central + kth_root(cunder, k) * punder
    return out


def sandwich_envelopes(
    spec: ProblemSpec,
    report: ClassificationReport,
    grid,
    witness: Optional[GrowthWitness],
    tops: Tuple[float, float],
    table_size: int = 16385,
) -> SandwichEnvelopes:
    """
    Envelopes a + c̲^{1/k}P̲(r) ≤ u(r) ≤ H⁻¹(c̄^{1/k}P̄(r)) dos lados que o
    veredito garante. A tolerância compara com a grade grossa (passo dobrado).
    """
    if report.verdict not in SANDWICH_SIDES:
        raise ValueError(f"veredito {report.verdict!r} não fornece envelopes")
    grid = np.asarray(grid, dtype=float)
    eff, _ = effective_witness(spec, witness, report.constants)
    fine = _envelopes_on(spec, report, eff, grid, tops, table_size)

    diffs = [0.0]
    if len(grid) >= 5:
        coarse = _envelopes_on(spec, report, eff, grid[::2], tops, (table_size + 1) // 2)
        for key, values in coarse.items():
            a, b = fine[key][::2], values
            finite = np.isfinite(a) & np.isfinite(b)
            if np.any(finite):
                diffs.append(float(np.max(np.abs(a[finite] - b[finite]))))
    return SandwichEnvelopes(grid=grid, tolerance=10.0 * max(diffs) + 1e-10, **fine)


@log_call("sandwich_check")
def sandwich_check(
    spec: ProblemSpec,
    report: ClassificationReport,
    profile: SolutionProfile,
    witness: Optional[GrowthWitness] = None,
) -> SandwichResult:
    """Confere os envelopes em todos os nós; devolve a maior violação."""
    tops = (2.0 * float(np.max(profile.u1)), 2.0 * float(np.max(profile.u2)))
    env = sandwich_envelopes(spec, report, profile.grid, witness, tops)
    values = {1: profile.u1, 2: profile.u2}

    worst, worst_r, worst_bound = 0.0, None, None
    checked: List[str] = []
    for name in ("lower1", "upper1", "lower2", "upper2"):
        bound = getattr(env, name)
        if bound is None:
            continue
        checked.append(name)
        u = values[int(name[-1])]
        excess = bound - u if name.startswith("lower") else u - bound
        excess = np.where(np.isfinite(excess), excess, -np.inf)
        idx = int(np.argmax(excess))
        if excess[idx] > worst:
            worst, worst_r, worst_bound = float(excess[idx]), float(profile.grid[idx]), name
    return SandwichResult(
        passed=worst <= env.tolerance,
        worst_violation=worst,
        worst_radius=worst_r,
        worst_bound=worst_bound,
        tolerance=env.tolerance,
        checked=checked,
    )


# ---------------------------
# cadeia de majoração e cotas a priori
# ---------------------------
class UpperBoundExcess(BaseModel):
    excess12: float
    excess21: float
    tolerance: float


def upper_bound_chain(
    spec: ProblemSpec,
    witness: GrowthWitness,
    state: Union[IterateState, SolutionProfile],
    constants: Optional[DerivedConstants] = None,
    table: Optional[KernelTable] = None,
) -> UpperBoundExcess:
    """max_r [H₁₂(u₁(r)) − c̄₁^{1/k₁}P̄₁₂(r)] e o análogo 2,1 (≤ 0 esperado)."""
    if not (witness.has_c21 and witness.has_c22):
        raise HypothesisViolation("(C2)", "cadeia de majoração exige h e φ̄ dos dois lados")
    grid = state.table.grid if isinstance(state, IterateState) else state.grid
    if table is None:
        table = build_kernel_table(spec, grid)
    if constants is None:
        constants = growth_constants(spec)
    out: List[float] = []
    tols: List[float] = [0.0]
    for side, u in ((1, state.u1), (2, state.u2)):
        pair: Pair = "12" if side == 1 else "21"
        k = spec.k1 if side == 1 else spec.k2
        cbar = witness.cbar1 if side == 1 else witness.cbar2
        pbar = p_integral_profile(spec, witness, f"bar{pair}", table)  # type: ignore[arg-type]
        exponent = witness.h21_exponent if pair == "21" else None
        ht = h_table(spec, witness, constants, pair, float(np.max(u)), "standard", exponent)
        h_u = ht(u)
        coarse = ht.coarse()
        tols.append(float(np.max(np.abs(coarse(u) - h_u))))
        out.append(float(np.max(h_u - kth_root(cbar, k) * pbar)))
    return UpperBoundExcess(excess12=out[0], excess21=out[1], tolerance=10.0 * max(tols) + 1e-10)


class APrioriBounds(BaseModel):
    c0: float
    c1: float
    c2: float
    l1: float
    l2: float


def a_priori_bounds(
    spec: ProblemSpec,
    witness: GrowthWitness,
    c0: float,
    grid_n: int = 4096,
    constants: Optional[DerivedConstants] = None,
) -> APrioriBounds:
    """
    Cotas uniformes em [0, c₀]: u_i ≤ C_i (pela inversa de H) e u_i′ ≤ L_i
    (equicontinuidade).
    """
    table = build_kernel_table(spec, uniform_grid(c0, grid_n))
    if constants is None:
        constants = growth_constants(spec)
    pb12 = p_integral(spec, witness, "bar12", c0, table=table)
    pb21 = p_integral(spec, witness, "bar21", c0, table=table)
    c1 = h_inverse(spec, witness, constants, "12", kth_root(witness.cbar1, spec.k1) * pb12)
    c2 = h_inverse(spec, witness, constants, "21", kth_root(witness.cbar2, spec.k2) * pb21,
                   exponent_override=witness.h21_exponent)
    hc = table.hc
    p1_sup = float(np.max(table.p1))
    p2_sup = float(np.max(table.p2))
    l1 = kth_root(p1_sup / hc.c0, spec.k1) * kth_root(evaluate(spec.f1, c2, spec.n), spec.k1) * c0
    l2 = kth_root(p2_sup / hc.c00, spec.k2) * kth_root(evaluate(spec.f2, c1, spec.n), spec.k2) * c0
    return APrioriBounds(c0=c0, c1=c1, c2=c2, l1=l1, l2=l2)
