from __future__ import annotations

from typing import Any, Optional


class HessianError(Exception):
    """Raiz de todos os erros do projeto."""


# ---------------------------
# expressões
# ---------------------------
class ExprError(HessianError, ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, offset: int, expected: str, found: str = "") -> None:
        self.offset = offset
        self.expected = expected
        self.found = found
        detail = f"esperado {expected}"
        if found:
            detail += f", encontrado {found!r}"
        super().__init__(f"erro de sintaxe no byte {offset}: {detail}")


class UnknownIdentifierError(ExprError):
    def __init__(self, offset: int, name: str) -> None:
        self.offset = offset
        self.name = name
        super().__init__(f"identificador desconhecido {name!r} no byte {offset}")


class ExprEvalError(ExprError):
    pass


class ExprDomainError(ExprEvalError):
    def __init__(self, function: str, argument: float) -> None:
        self.function = function
        self.argument = argument
        super().__init__(f"erro de domínio: {function}({argument!r})")


class ExprDivisionByZero(ExprEvalError):
    def __init__(self, at: Optional[float] = None) -> None:
        self.at = at
        where = "" if at is None else f" (t={at!r})"
        super().__init__(f"divisão por zero{where}")


# ---------------------------
# grades, problema e configuração
# ---------------------------
class GridError(HessianError, ValueError):
    pass


class SpecError(HessianError, ValueError):
    pass


class ConfigError(HessianError, ValueError):
    def __init__(self, message: str, *, line: Optional[int] = None, key: Optional[str] = None) -> None:
        self.line = line
        self.key = key
        prefix = f"linha {line}: " if line is not None else ""
        super().__init__(prefix + message)


class HypothesisViolation(HessianError, ValueError):
    def __init__(self, hypothesis: str, message: str) -> None:
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {message}")


# ---------------------------
# iteração e transformadas
# ---------------------------
class NonConvergenceError(HessianError, RuntimeError):
    def __init__(self, message: str, partial: Any = None) -> None:
        self.partial = partial
        super().__init__(message)


class BlowUpSuspected(HessianError, RuntimeError):
    def __init__(self, radius: float, iteration: int, component: str) -> None:
        self.radius = radius
        self.iteration = iteration
        self.component = component
        super().__init__(
            f"explosão suspeita em r={radius:.6g} ({component}, iteração {iteration})"
        )


class UnboundedPreimageError(HessianError, ValueError):
    pass


class SingularEndpointError(HessianError, ValueError):
    pass
