from __future__ import annotations

import logging
import sys
import time
from functools import wraps
from typing import Any, Callable, Optional

LOGGER_NAME = "hessian"


def get_logger(module: Optional[str] = None) -> logging.Logger:
    """Logger do projeto; `module` vira sufixo (ex.: hessian.kernels)."""
    if not module:
        return logging.getLogger(LOGGER_NAME)
    return logging.getLogger(f"{LOGGER_NAME}.{module}")


def configure_logging(level: str = "INFO") -> None:
    """Instala um único handler em stderr. Chamado apenas pelo app.py."""
    root = logging.getLogger(LOGGER_NAME)
    root.setLevel(level.upper())
    # troca o handler anterior: sys.stderr pode ter sido substituído
    for old in [h for h in root.handlers if getattr(h, "_hessian_handler", False)]:
        root.removeHandler(old)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s %(message)s"))
    handler._hessian_handler = True  # type: ignore[attr-defined]
    root.addHandler(handler)


def log_call(op_name: str):
    """Decorator simples para mensurar duração de uma operação numérica e registrar log."""
    logger = get_logger("ops")

    def decorator(func: Callable[..., Any]):
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            ok = False
            try:
                result = func(*args, **kwargs)
                ok = True
                return result
            finally:
                duration_ms = int((time.perf_counter() - start) * 1000)
                status = "OK" if ok else "ERROR"
                logger.debug(
                    "[op] name=%s status=%s duration_ms=%d", op_name, status, duration_ms
                )
        return wrapper
    return decorator
