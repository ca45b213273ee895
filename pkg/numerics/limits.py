from __future__ import annotations

import math
from typing import Callable, List, Literal, Optional

from pydantic import BaseModel, Field

from core.logging import get_logger

logger = get_logger("limits")

Verdict = Literal["Finite", "Divergent", "Inconclusive"]

# folga relativa na razão: uma cauda t⁻² dá razão exatamente 0.5
_RATIO_SLACK = 1e-6
_MONOTONE_RTOL = 1e-9


class LimitEstimate(BaseModel):
    """Estimativa de lim_{r→∞} F(r) a partir de amostras em r₀·2^j."""
    value_at_rmax: float
    verdict: Verdict
    evidence: List[float] = Field(default_factory=list)
    radii: List[float] = Field(default_factory=list)
    extrapolated_limit: Optional[float] = None
    extrapolation_error: Optional[float] = None
    note: str = ""

    @property
    def best_value(self) -> float:
        """Limite extrapolado quando há, senão o último valor amostrado."""
        if self.extrapolated_limit is not None:
            return self.extrapolated_limit
        return self.value_at_rmax

    def summary(self) -> str:
        if self.verdict == "Finite":
            return f"Finite (≈{self.best_value:.6g} ± {self.extrapolation_error or 0.0:.2g})"
        return f"{self.verdict} (F(rmax)={self.value_at_rmax:.6g})"


def _tail(increment: float, q: float) -> float:
    return increment * q / (1.0 - q)


def limit_estimate(
    fn: Callable[[float], float],
    r0: float = 1.0,
    r_budget: float = 1024.0,
    finite_ratio: float = 0.5,
) -> LimitEstimate:
    """
    Classifica F(∞) olhando os incrementos de F entre raios que dobram.

    - Finite: as duas últimas razões entre incrementos consecutivos ≤ finite_ratio
      (ou incrementos nulos). O limite é extrapolado pela cauda geométrica.
    - Divergent: os três últimos incrementos não decrescem.
    - Inconclusive: o resto, ou orçamento com menos de 3 dobras.
    """
    if r0 <= 0:
        raise ValueError("r0 deve ser positivo")
    radii: List[float] = []
    r = float(r0)
    while r <= r_budget * (1.0 + 1e-12):
        radii.append(r)
        r *= 2.0
    values = [float(fn(x)) for x in radii]
    last = values[-1] if values else float("nan")

    if len(values) < 4:
        return LimitEstimate(
            value_at_rmax=last, verdict="Inconclusive", evidence=values, radii=radii,
            note="orçamento insuficiente para 3 dobras",
        )

    if any(math.isnan(v) for v in values):
        return LimitEstimate(value_at_rmax=last, verdict="Inconclusive", evidence=values, radii=radii, note="NaN")
    if math.isinf(last) and last > 0:
        return LimitEstimate(value_at_rmax=last, verdict="Divergent", evidence=values, radii=radii, note="overflow")

    inc = [values[j] - values[j - 1] for j in range(len(values) - 3, len(values))]
    scale = max(1.0, abs(last))
    if any(i < -1e-12 * scale for i in inc):
        return LimitEstimate(
            value_at_rmax=last, verdict="Inconclusive", evidence=values, radii=radii,
            note="incrementos negativos",
        )

    if all(i <= 1e-15 * scale for i in inc):
        return LimitEstimate(
            value_at_rmax=last, verdict="Finite", evidence=values, radii=radii,
            extrapolated_limit=last, extrapolation_error=0.0,
        )

    if inc[1] >= inc[0] * (1.0 - _MONOTONE_RTOL) and inc[2] >= inc[1] * (1.0 - _MONOTONE_RTOL):
        return LimitEstimate(value_at_rmax=last, verdict="Divergent", evidence=values, radii=radii)

    bound = finite_ratio * (1.0 + _RATIO_SLACK)
    if inc[0] > 0 and inc[1] > 0:
        q_prev = inc[1] / inc[0]
        q_last = inc[2] / inc[1]
        if q_prev <= bound and q_last <= bound:
            tail = _tail(inc[2], q_last)
            err = abs(tail - _tail(inc[2], q_prev))
            return LimitEstimate(
                value_at_rmax=last, verdict="Finite", evidence=values, radii=radii,
                extrapolated_limit=last + tail, extrapolation_error=err,
            )
    elif inc[1] <= 1e-15 * scale and inc[2] <= 1e-15 * scale:
        return LimitEstimate(
            value_at_rmax=last, verdict="Finite", evidence=values, radii=radii,
            extrapolated_limit=last, extrapolation_error=0.0,
        )

    logger.debug("limite inconclusivo: incrementos=%s", inc)
    return LimitEstimate(value_at_rmax=last, verdict="Inconclusive", evidence=values, radii=radii)
