"""
Leitura do arquivo de problema (.cfg).

Formato por linha: `chave = valor`; `#` inicia comentário; seções entre
colchetes: [problem] (obrigatória), [witness] e [numerics] (opcionais).
Valores de funções são expressões em `t`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, ValidationError

from core.errors import ConfigError, ExprError, ExprEvalError, HypothesisViolation
from core.logging import get_logger
from numerics.classify import GrowthWitness
from numerics.exprcore import Expr, evaluate_array, parse
from numerics.iteration import ProblemSpec

logger = get_logger("problem_file")

_SECTION_RE = re.compile(r"^\s*\[\s*(?P<name>[A-Za-z_]+)\s*\]\s*$")
_KV_RE = re.compile(r"^\s*(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?P<val>.*?)\s*$")

PROBLEM_KEYS = ("N", "k1", "k2", "a1", "a2", "p1", "p2", "f1", "f2", "a", "b")
EXPR_KEYS = {
    "problem": ("a1", "a2", "p1", "p2", "f1", "f2"),
    "witness": ("h1", "h2", "phibar1", "phibar2", "phiunder1", "phiunder2"),
}

# amostras da sondagem de não negatividade (validação completa fica em check_hypotheses)
_SCREEN_T = np.linspace(0.0, 10.0, 41)


# ---------------------------
# modelos das seções
# ---------------------------
class ProblemSection(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    N: int
    k1: int
    k2: int
    a1: str
    a2: str
    p1: str
    p2: str
    f1: str
    f2: str
    a: float
    b: float


class WitnessSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    h1: Optional[str] = None
    h2: Optional[str] = None
    phibar1: Optional[str] = None
    phibar2: Optional[str] = None
    phiunder1: Optional[str] = None
    phiunder2: Optional[str] = None
    cbar1: float = 1.0
    cbar2: float = 1.0
    cunder1: float = 1.0
    cunder2: float = 1.0
    c21: Optional[bool] = None
    c22: Optional[bool] = None
    c31: Optional[bool] = None
    c32: Optional[bool] = None
    h21_exponent: Optional[float] = None


class NumericsSection(BaseModel):
    model_config = ConfigDict(extra="forbid")

    rmax: Optional[float] = None
    grid_n: Optional[int] = None
    tol: Optional[float] = None
    max_iter: Optional[int] = None
    refine_cap: Optional[int] = None
    limit_r0: Optional[float] = None
    limit_budget: Optional[float] = None
    classify_grid_n: Optional[int] = None
    finite_ratio: Optional[float] = None


_SECTIONS = {"problem": ProblemSection, "witness": WitnessSection, "numerics": NumericsSection}


@dataclass(frozen=True)
class LoadedConfig:
    spec: ProblemSpec
    witness: Optional[GrowthWitness]
    numerics: Dict[str, Any]
    sources: Dict[str, str] = field(default_factory=dict)
    path: Optional[str] = None


# ---------------------------
# parsing
# ---------------------------
def _strip_quotes(s: str) -> str:
    s = s.strip()
    if len(s) >= 2 and s[0] == s[-1] and s[0] in "\"'":
        return s[1:-1].strip()
    return s


def _strip_comment(line: str) -> str:
    # '#' dentro de aspas não ocorre em expressões válidas
    return line.split("#", 1)[0]


def parse_sections(text: str) -> Tuple[Dict[str, Dict[str, str]], Dict[Tuple[str, str], int]]:
    """Seções -> {chave: valor} e o mapa (seção, chave) -> número da linha."""
    sections: Dict[str, Dict[str, str]] = {}
    lines: Dict[Tuple[str, str], int] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        m = _SECTION_RE.match(line)
        if m:
            current = m.group("name").lower()
            if current not in _SECTIONS:
                raise ConfigError(f"seção desconhecida [{current}]", line=lineno)
            if current in sections:
                raise ConfigError(f"seção [{current}] repetida", line=lineno)
            sections[current] = {}
            continue
        m = _KV_RE.match(line)
        if not m:
            raise ConfigError(f"linha inválida (esperado 'chave = valor'): {raw.strip()!r}", line=lineno)
        if current is None:
            raise ConfigError("par chave=valor fora de seção", line=lineno, key=m.group("key"))
        key, val = m.group("key"), _strip_quotes(m.group("val"))
        if key in sections[current]:
            raise ConfigError(f"chave duplicada {key!r} em [{current}]", line=lineno, key=key)
        sections[current][key] = val
        lines[(current, key)] = lineno
    return sections, lines


def _parse_expr(section: str, key: str, source: str, lines: Dict[Tuple[str, str], int]) -> Expr:
    try:
        return parse(source)
    except ExprError as e:
        raise ConfigError(f"{key}: {e}", line=lines.get((section, key)), key=key) from e


def _validate(section: str, values: Dict[str, str], lines: Dict[Tuple[str, str], int]) -> BaseModel:
    model = _SECTIONS[section]
    try:
        return model(**values)
    except ValidationError as e:
        first = e.errors()[0]
        key = str(first["loc"][0]) if first.get("loc") else None
        line = lines.get((section, key)) if key else None
        raise ConfigError(f"[{section}] {key}: {first['msg']}", line=line, key=key) from e


def _screen(spec: ProblemSpec, sources: Dict[str, str]) -> None:
    """Sondagem grossa de não negatividade: p, a ≥ 0 (P1) e f ≥ 0 (C1); zero é aceito."""
    checks = (
        ("p1", spec.p1, "(P1)"), ("p2", spec.p2, "(P1)"),
        ("a1", spec.a1, "(P1)"), ("a2", spec.a2, "(P1)"),
        ("f1", spec.f1, "(C1)"), ("f2", spec.f2, "(C1)"),
    )
    for key, expr, hyp in checks:
        try:
            values = evaluate_array(expr, _SCREEN_T, spec.n)
        except ExprEvalError as e:
            raise ConfigError(f"{key} = {sources[key]!r}: {e}", key=key) from e
        if np.any(values < 0):
            idx = int(np.argmax(values < 0))
            raise HypothesisViolation(
                hyp, f"{key} = {sources[key]!r} é negativo em t={_SCREEN_T[idx]:g} ({values[idx]:.6g})"
            )


def load_config_text(text: str, path: Optional[str] = None) -> LoadedConfig:
    sections, lines = parse_sections(text)
    problem_raw = sections.get("problem")
    if problem_raw is None:
        raise ConfigError("seção [problem] ausente")
    missing = [k for k in PROBLEM_KEYS if k not in problem_raw]
    if missing:
        raise ConfigError(f"chave obrigatória ausente em [problem]: {missing[0]}", key=missing[0])

    problem = _validate("problem", problem_raw, lines)
    exprs = {k: _parse_expr("problem", k, problem_raw[k], lines) for k in EXPR_KEYS["problem"]}
    try:
        spec = ProblemSpec(
            n=problem.N, k1=problem.k1, k2=problem.k2,
            central_a=problem.a, central_b=problem.b, **exprs,
        )
    except ValueError as e:
        raise ConfigError(str(e)) from e
    sources = {k: problem_raw[k] for k in EXPR_KEYS["problem"]}
    _screen(spec, sources)

    witness: Optional[GrowthWitness] = None
    if "witness" in sections:
        w_raw = sections["witness"]
        wsec = _validate("witness", w_raw, lines)
        data = wsec.model_dump()
        for k in EXPR_KEYS["witness"]:
            if data.get(k) is not None:
                sources[k] = data[k]
                data[k] = _parse_expr("witness", k, data[k], lines)
        try:
            witness = GrowthWitness(**data)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    numerics: Dict[str, Any] = {}
    if "numerics" in sections:
        nsec = _validate("numerics", sections["numerics"], lines)
        numerics = {k: v for k, v in nsec.model_dump().items() if v is not None}

    logger.debug("config carregada: %s", spec.describe())
    return LoadedConfig(spec=spec, witness=witness, numerics=numerics, sources=sources, path=path)


def load_config(path) -> LoadedConfig:
    """Lê, valida e sonda o arquivo de problema."""
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"arquivo de configuração não encontrado: {p}")
    return load_config_text(p.read_text(encoding="utf-8"), str(p))
