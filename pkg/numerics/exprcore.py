"""
Expressões escalares em uma variável livre `t` (e a constante `N`).

Gramática (precedência crescente):

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?          # associativo à direita
    atom    := NUMBER | "t" | "N" | FUNC "(" expr ("," expr)* ")" | "(" expr ")"

Funções: sqrt, exp, ln, abs (1 argumento); pow, min, max (2 argumentos).
Não existe multiplicação implícita: "2t" é erro de sintaxe.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, NamedTuple, Tuple, Union

import numpy as np

from core.errors import (
    ExprDivisionByZero,
    ExprDomainError,
    ExprSyntaxError,
    UnknownIdentifierError,
)

VARIABLES = ("t", "N")
FUNCTIONS: Dict[str, int] = {
    "sqrt": 1,
    "exp": 1,
    "ln": 1,
    "abs": 1,
    "pow": 2,
    "min": 2,
    "max": 2,
}


# ---------------------------
# AST (imutável)
# ---------------------------
@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: Tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]


# ---------------------------
# tokenizer
# ---------------------------
class _Token(NamedTuple):
    kind: str  # NUM | IDENT | OP | LPAREN | RPAREN | COMMA | EOF
    text: str
    pos: int  # índice de caractere


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^])
  | (?P<lparen>\()
  | (?P<rparen>\))
  | (?P<comma>,)
    """,
    re.VERBOSE,
)

_KIND = {"num": "NUM", "ident": "IDENT", "op": "OP", "lparen": "LPAREN", "rparen": "RPAREN", "comma": "COMMA"}


def _byte_offset(source: str, pos: int) -> int:
    return len(source[:pos].encode("utf-8"))


def _tokenize(source: str) -> List[_Token]:
    tokens: List[_Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if not m:
            raise ExprSyntaxError(
                _byte_offset(source, pos),
                "número, identificador, operador ou parêntese",
                source[pos],
            )
        group = m.lastgroup or ""
        if group != "ws":
            tokens.append(_Token(_KIND[group], m.group(), pos))
        pos = m.end()
    tokens.append(_Token("EOF", "", len(source)))
    return tokens


# ---------------------------
# parser (descida recursiva)
# ---------------------------
class _Parser:
    def __init__(self, source: str) -> None:
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _fail(self, expected: str) -> ExprSyntaxError:
        found = self.tok.text if self.tok.kind != "EOF" else "fim da entrada"
        return ExprSyntaxError(_byte_offset(self.source, self.tok.pos), expected, found)

    def _expect(self, kind: str, description: str) -> _Token:
        if self.tok.kind != kind:
            raise self._fail(description)
        tok = self.tok
        self.i += 1
        return tok

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "EOF":
            raise self._fail("operador ou fim da expressão")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "OP" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.tok.kind == "OP" and self.tok.text == "-":
            self.i += 1
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "OP" and self.tok.text == "^":
            self.i += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "NUM":
            value = float(tok.text)
            if not np.isfinite(value):
                raise self._fail("literal numérico finito")
            self.i += 1
            return Num(value)
        if tok.kind == "LPAREN":
            self.i += 1
            node = self.expr()
            self._expect("RPAREN", "')'")
            return node
        if tok.kind == "IDENT":
            if tok.text in VARIABLES:
                self.i += 1
                return Var(tok.text)
            if tok.text in FUNCTIONS:
                self.i += 1
                return self._call(tok.text)
            raise UnknownIdentifierError(_byte_offset(self.source, tok.pos), tok.text)
        raise self._fail("expressão")

    def _call(self, name: str) -> Call:
        self._expect("LPAREN", f"'(' após {name}")
        args = [self.expr()]
        while self.tok.kind == "COMMA":
            self.i += 1
            args.append(self.expr())
        arity = FUNCTIONS[name]
        if len(args) != arity:
            raise self._fail(f"{arity} argumento(s) para {name}")
        self._expect("RPAREN", "')'")
        return Call(name, tuple(args))


def parse(source: str) -> Expr:
    """Converte texto em AST. Levanta ExprSyntaxError / UnknownIdentifierError."""
    return _Parser(source).parse()


def unparse(expr: Expr) -> str:
    """Forma totalmente parentizada; parse(unparse(e)) == e."""
    if isinstance(expr, Num):
        return repr(expr.value)
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Neg):
        return f"(-{unparse(expr.operand)})"
    if isinstance(expr, BinOp):
        return f"({unparse(expr.left)} {expr.op} {unparse(expr.right)})"
    return f"{expr.func}({', '.join(unparse(a) for a in expr.args)})"


# ---------------------------
# avaliação vetorizada
# ---------------------------
def _first(values: np.ndarray, mask: np.ndarray) -> float:
    values = np.broadcast_to(values, mask.shape)
    return float(values[mask].ravel()[0])


def _check_power(base: np.ndarray, exponent: np.ndarray) -> None:
    base, exponent = np.broadcast_arrays(base, exponent)
    fractional = exponent != np.floor(exponent)
    bad = (base < 0) & fractional & np.isfinite(exponent)
    if np.any(bad):
        raise ExprDomainError("pow", _first(base, bad))
    zero_neg = (base == 0) & (exponent < 0)
    if np.any(zero_neg):
        raise ExprDivisionByZero()


def _power(base: np.ndarray, exponent: np.ndarray) -> np.ndarray:
    _check_power(base, exponent)
    return np.power(base, exponent)


def _eval(node: Expr, t: np.ndarray, n: float) -> np.ndarray:
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        return t if node.name == "t" else np.float64(n)
    if isinstance(node, Neg):
        return -_eval(node.operand, t, n)
    if isinstance(node, BinOp):
        left = _eval(node.left, t, n)
        right = _eval(node.right, t, n)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            zero = np.broadcast_to(right == 0, np.broadcast(left, right, t).shape)
            if np.any(zero):
                raise ExprDivisionByZero(_first(t, zero))
            return left / right
        return _power(left, right)

    args = [_eval(a, t, n) for a in node.args]
    x = args[0]
    if node.func == "sqrt":
        bad = np.asarray(x < 0)
        if np.any(bad):
            raise ExprDomainError("sqrt", _first(x, bad))
        return np.sqrt(x)
    if node.func == "ln":
        bad = np.asarray(x <= 0)
        if np.any(bad):
            raise ExprDomainError("ln", _first(x, bad))
        return np.log(x)
    if node.func == "exp":
        return np.exp(x)
    if node.func == "abs":
        return np.abs(x)
    if node.func == "pow":
        return _power(x, args[1])
    if node.func == "min":
        return np.minimum(x, args[1])
    return np.maximum(x, args[1])


def evaluate_array(expr: Expr, t, n: int) -> np.ndarray:
    """Avalia `expr` em cada elemento de `t` (float64). Overflow vira inf (IEEE)."""
    t_arr = np.asarray(t, dtype=np.float64)
    with np.errstate(all="ignore"):
        out = _eval(expr, t_arr, float(n))
    return np.array(np.broadcast_to(out, t_arr.shape), dtype=np.float64)


def evaluate(expr: Expr, t: float, n: int) -> float:
    """Avaliação escalar em dupla precisão; determinística."""
    return float(evaluate_array(expr, np.float64(t), n))


# ---------------------------
# jatos de Taylor (valor, 1a e 2a derivadas em t)
# ---------------------------
class Jet(NamedTuple):
    v: np.ndarray
    d1: np.ndarray
    d2: np.ndarray


def _const_jet(value: float, like: np.ndarray) -> Jet:
    zero = np.zeros_like(like)
    return Jet(np.full_like(like, value), zero, zero.copy())


def _is_const(j: Jet) -> bool:
    return not (np.any(j.d1) or np.any(j.d2))


def _jet_mul(a: Jet, b: Jet) -> Jet:
    return Jet(a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2 * a.d1 * b.d1 + a.v * b.d2)


def _jet_div(a: Jet, b: Jet, t: np.ndarray) -> Jet:
    if np.any(b.v == 0):
        raise ExprDivisionByZero(_first(t, b.v == 0))
    q = a.v / b.v
    q1 = (a.d1 - q * b.d1) / b.v
    q2 = (a.d2 - 2 * q1 * b.d1 - q * b.d2) / b.v
    return Jet(q, q1, q2)


def _jet_exp(a: Jet) -> Jet:
    e = np.exp(a.v)
    return Jet(e, e * a.d1, e * (a.d2 + a.d1 ** 2))


def _jet_ln(a: Jet) -> Jet:
    if np.any(a.v <= 0):
        raise ExprDomainError("ln", _first(a.v, a.v <= 0))
    return Jet(np.log(a.v), a.d1 / a.v, a.d2 / a.v - (a.d1 / a.v) ** 2)


def _jet_pow(a: Jet, b: Jet) -> Jet:
    if not _is_const(b):
        if np.any(a.v <= 0):
            raise ExprDomainError("pow", _first(a.v, a.v <= 0))
        return _jet_exp(_jet_mul(b, _jet_ln(a)))
    _check_power(a.v, b.v)
    p = b.v
    v = np.power(a.v, p)
    d1 = np.zeros_like(v)
    d2 = np.zeros_like(v)
    c1 = p
    if np.any(c1 != 0):
        g1 = np.where(c1 != 0, c1 * np.power(a.v, p - 1), 0.0)
        d1 = g1 * a.d1
        d2 = g1 * a.d2
    c2 = p * (p - 1)
    if np.any(c2 != 0):
        d2 = d2 + np.where(c2 != 0, c2 * np.power(a.v, p - 2), 0.0) * a.d1 ** 2
    return Jet(v, d1, d2)


def _select(mask: np.ndarray, a: Jet, b: Jet) -> Jet:
    return Jet(np.where(mask, a.v, b.v), np.where(mask, a.d1, b.d1), np.where(mask, a.d2, b.d2))


def _jet(node: Expr, t: np.ndarray, n: float) -> Jet:
    if isinstance(node, Num):
        return _const_jet(node.value, t)
    if isinstance(node, Var):
        if node.name == "N":
            return _const_jet(n, t)
        return Jet(t.copy(), np.ones_like(t), np.zeros_like(t))
    if isinstance(node, Neg):
        a = _jet(node.operand, t, n)
        return Jet(-a.v, -a.d1, -a.d2)
    if isinstance(node, BinOp):
        a = _jet(node.left, t, n)
        b = _jet(node.right, t, n)
        if node.op == "+":
            return Jet(a.v + b.v, a.d1 + b.d1, a.d2 + b.d2)
        if node.op == "-":
            return Jet(a.v - b.v, a.d1 - b.d1, a.d2 - b.d2)
        if node.op == "*":
            return _jet_mul(a, b)
        if node.op == "/":
            return _jet_div(a, b, t)
        return _jet_pow(a, b)

    args = [_jet(x, t, n) for x in node.args]
    a = args[0]
    if node.func == "sqrt":
        if np.any(a.v < 0):
            raise ExprDomainError("sqrt", _first(a.v, a.v < 0))
        s = np.sqrt(a.v)
        s1 = a.d1 / (2 * s)
        return Jet(s, s1, (a.d2 - 2 * s1 ** 2) / (2 * s))
    if node.func == "exp":
        return _jet_exp(a)
    if node.func == "ln":
        return _jet_ln(a)
    if node.func == "abs":
        sign = np.where(a.v < 0, -1.0, 1.0)
        return Jet(sign * a.v, sign * a.d1, sign * a.d2)
    if node.func == "pow":
        return _jet_pow(a, args[1])
    if node.func == "min":
        return _select(a.v <= args[1].v, a, args[1])
    return _select(a.v >= args[1].v, a, args[1])


def evaluate_jet(expr: Expr, t, n: int) -> Jet:
    """Valor e derivadas d/dt, d²/dt² por aritmética de jatos (sem álgebra simbólica)."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    with np.errstate(all="ignore"):
        return _jet(expr, t_arr, float(n))
