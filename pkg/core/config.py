from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from typing import Any

from dotenv import load_dotenv


def ensure_env() -> None:
    """Carrega o .env (se existir) sem sobrescrever variáveis já exportadas."""
    load_dotenv(override=False)


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name)
    return float(raw) if raw not in (None, "") else default


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    return int(raw) if raw not in (None, "") else default


@dataclass(frozen=True)
class NumericsConfig:
    """Orçamentos e limiares numéricos. Padrões vêm do ambiente (HESSIAN_*)."""
    rmax: float = field(default_factory=lambda: _env_float("HESSIAN_RMAX", 5.0))
    grid_n: int = field(default_factory=lambda: _env_int("HESSIAN_GRID_N", 256))
    tol: float = field(default_factory=lambda: _env_float("HESSIAN_TOL", 1e-8))
    max_iter: int = field(default_factory=lambda: _env_int("HESSIAN_MAX_ITER", 200))
    refine_cap: int = field(default_factory=lambda: _env_int("HESSIAN_REFINE_CAP", 6))
    limit_r0: float = field(default_factory=lambda: _env_float("HESSIAN_LIMIT_R0", 1.0))
    limit_budget: float = field(default_factory=lambda: _env_float("HESSIAN_LIMIT_BUDGET", 1024.0))
    classify_grid_n: int = field(default_factory=lambda: _env_int("HESSIAN_CLASSIFY_GRID_N", 16384))
    finite_ratio: float = field(default_factory=lambda: _env_float("HESSIAN_FINITE_RATIO", 0.5))
    overflow_guard: float = field(default_factory=lambda: _env_float("HESSIAN_OVERFLOW_GUARD", 1e150))
    out_dir: str = field(default_factory=lambda: os.getenv("HESSIAN_OUT_DIR", "out"))
    log_level: str = field(default_factory=lambda: os.getenv("HESSIAN_LOG_LEVEL", "INFO"))

    def merged(self, **overrides: Any) -> "NumericsConfig":
        """Nova instância com os overrides não nulos aplicados."""
        known = {f.name for f in fields(self)}
        clean = {k: v for k, v in overrides.items() if v is not None and k in known}
        return replace(self, **clean)
