"""Closed-form expression DSL with exact symbolic derivatives.

Grammar (whitespace-insensitive, standard precedence):

    expr   := term  (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' integer)*
    atom   := number | name '(' expr ')' | name | '(' expr ')'

Variables are ``q``, ``t``, ``lambda`` and ``w1`` .. ``wK``, with the fiber
dimension K fixed at parse time.  Functions are ``sin``, ``cos`` and ``exp``.
Exponents are integer literals, which keeps differentiation exact and total.

Expressions are immutable after parsing; evaluation accepts plain floats or
numpy arrays (broadcasting like numpy).  There is no simplification engine:
the only rewriting ever done is the constant/zero folding inside
``differentiate`` so that derivatives come out readable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "ExprError",
    "ExprSyntaxError",
    "ExprNameError",
    "EvalError",
    "parse",
    "evaluate",
    "differentiate",
    "substitute",
    "free_variables",
]

FUNCTIONS = ("sin", "cos", "exp")
BASE_VARIABLES = ("q", "t", "lambda")

_VAR_RE = re.compile(r"w([0-9]+)$")


class ExprError(ValueError):
    """Base class for DSL failures."""


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class ExprNameError(ExprError):
    """Unknown identifier or fiber-variable index out of range."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class EvalError(ExprError):
    """Unbound variable, division by zero, or overflow during evaluation."""


# ---------------------------------------------------------------------------
# nodes


class Expr:
    """Immutable expression tree node."""

    _prec = 5

    def eval(self, env):
        raise NotImplementedError

    def diff(self, var: str) -> "Expr":
        raise NotImplementedError

    def free(self) -> frozenset:
        raise NotImplementedError

    def subst(self, name: str, value: float) -> "Expr":
        raise NotImplementedError

    def __str__(self) -> str:
        raise NotImplementedError


@dataclass(frozen=True)
class Const(Expr):
    value: float

    @property
    def _prec(self):
        return 5 if self.value >= 0 else 3

    def eval(self, env):
        return self.value

    def diff(self, var):
        return Const(0.0)

    def free(self):
        return frozenset()

    def subst(self, name, value):
        return self

    def __str__(self):
        return _fmt_num(self.value)


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def eval(self, env):
        try:
            return env[self.name]
        except KeyError:
            raise EvalError(f"unbound variable '{self.name}'") from None

    def diff(self, var):
        return Const(1.0) if var == self.name else Const(0.0)

    def free(self):
        return frozenset((self.name,))

    def subst(self, name, value):
        return Const(float(value)) if name == self.name else self

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr

    _prec = 3

    def eval(self, env):
        return -self.arg.eval(env)

    def diff(self, var):
        return _neg(self.arg.diff(var))

    def free(self):
        return self.arg.free()

    def subst(self, name, value):
        return Neg(self.arg.subst(name, value))

    def __str__(self):
        return "-" + _wrap(self.arg, 4)


@dataclass(frozen=True)
class Add(Expr):
    a: Expr
    b: Expr

    _prec = 1

    def eval(self, env):
        return self.a.eval(env) + self.b.eval(env)

    def diff(self, var):
        return _add(self.a.diff(var), self.b.diff(var))

    def free(self):
        return self.a.free() | self.b.free()

    def subst(self, name, value):
        return Add(self.a.subst(name, value), self.b.subst(name, value))

    def __str__(self):
        return f"{_wrap(self.a, 1)} + {_wrap(self.b, 2)}"


@dataclass(frozen=True)
class Sub(Expr):
    a: Expr
    b: Expr

    _prec = 1

    def eval(self, env):
        return self.a.eval(env) - self.b.eval(env)

    def diff(self, var):
        return _sub(self.a.diff(var), self.b.diff(var))

    def free(self):
        return self.a.free() | self.b.free()

    def subst(self, name, value):
        return Sub(self.a.subst(name, value), self.b.subst(name, value))

    def __str__(self):
        return f"{_wrap(self.a, 1)} - {_wrap(self.b, 2)}"


@dataclass(frozen=True)
class Mul(Expr):
    a: Expr
    b: Expr

    _prec = 2

    def eval(self, env):
        return self.a.eval(env) * self.b.eval(env)

    def diff(self, var):
        return _add(
            _mul(self.a.diff(var), self.b),
            _mul(self.a, self.b.diff(var)),
        )

    def free(self):
        return self.a.free() | self.b.free()

    def subst(self, name, value):
        return Mul(self.a.subst(name, value), self.b.subst(name, value))

    def __str__(self):
        return f"{_wrap(self.a, 2)}*{_wrap(self.b, 3)}"


@dataclass(frozen=True)
class Div(Expr):
    a: Expr
    b: Expr

    _prec = 2

    def eval(self, env):
        num = self.a.eval(env)
        den = self.b.eval(env)
        if isinstance(num, np.ndarray) or isinstance(den, np.ndarray):
            with np.errstate(divide="ignore", invalid="ignore"):
                return num / den
        try:
            return num / den
        except ZeroDivisionError:
            raise EvalError("division by zero") from None

    def diff(self, var):
        da, db = self.a.diff(var), self.b.diff(var)
        return _div(_sub(_mul(da, self.b), _mul(self.a, db)), _pow(self.b, 2))

    def free(self):
        return self.a.free() | self.b.free()

    def subst(self, name, value):
        return Div(self.a.subst(name, value), self.b.subst(name, value))

    def __str__(self):
        return f"{_wrap(self.a, 2)}/{_wrap(self.b, 3)}"


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    _prec = 4

    def eval(self, env):
        x = self.base.eval(env)
        if isinstance(x, np.ndarray):
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                return np.power(x, self.exponent)
        try:
            return x ** self.exponent
        except ZeroDivisionError:
            raise EvalError("division by zero (negative power of 0)") from None
        except OverflowError:
            raise EvalError("overflow in power") from None

    def diff(self, var):
        n = self.exponent
        if n == 0:
            return Const(0.0)
        return _mul(_mul(Const(float(n)), _pow(self.base, n - 1)), self.base.diff(var))

    def free(self):
        return self.base.free()

    def subst(self, name, value):
        return Pow(self.base.subst(name, value), self.exponent)

    def __str__(self):
        return f"{_wrap(self.base, 4)}^{self.exponent}"


_SCALAR_FUNCS = {"sin": math.sin, "cos": math.cos, "exp": math.exp}
_ARRAY_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}


@dataclass(frozen=True)
class Call(Expr):
    fn: str
    arg: Expr

    def eval(self, env):
        x = self.arg.eval(env)
        if isinstance(x, np.ndarray):
            with np.errstate(over="ignore", invalid="ignore"):
                return _ARRAY_FUNCS[self.fn](x)
        try:
            return _SCALAR_FUNCS[self.fn](x)
        except OverflowError:
            raise EvalError(f"overflow in {self.fn}") from None

    def diff(self, var):
        dx = self.arg.diff(var)
        if self.fn == "sin":
            return _mul(Call("cos", self.arg), dx)
        if self.fn == "cos":
            return _mul(_neg(Call("sin", self.arg)), dx)
        return _mul(Call("exp", self.arg), dx)

    def free(self):
        return self.arg.free()

    def subst(self, name, value):
        return Call(self.fn, self.arg.subst(name, value))

    def __str__(self):
        return f"{self.fn}({self.arg})"


def _fmt_num(v: float) -> str:
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


def _wrap(e: Expr, min_prec: int) -> str:
    if e._prec < min_prec:
        return f"({e})"
    return str(e)


# folding used only by differentiate(); not a general simplifier


def _is_const(e, v):
    return isinstance(e, Const) and e.value == v


def _add(a, b):
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return Add(a, b)


def _sub(a, b):
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return Sub(a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a, b):
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return Mul(a, b)


def _div(a, b):
    if _is_const(a, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


def _pow(x, n):
    if n == 0:
        return Const(1.0)
    if n == 1:
        return x
    return Pow(x, n)


# ---------------------------------------------------------------------------
# tokenizer / parser

_TOKEN_RE = re.compile(
    r"(?P<num>[0-9]+\.[0-9]*(?:[eE][+-]?[0-9]+)?"
    r"|\.[0-9]+(?:[eE][+-]?[0-9]+)?"
    r"|[0-9]+(?:[eE][+-]?[0-9]+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()])"
)


def _tokenize(text: str):
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {ch!r}", i)
        kind = m.lastgroup
        tokens.append((kind, m.group(), i))
        i = m.end()
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens, fiber_dim: int):
        self.tokens = tokens
        self.pos = 0
        self.fiber_dim = fiber_dim

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ExprSyntaxError(f"expected '{op}'", off)
        return self.advance()

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", off)
        return e

    def expr(self) -> Expr:
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.unary()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        node = self.atom()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "^":
                self.advance()
                node = Pow(node, self.integer_exponent())
            else:
                return node

    def integer_exponent(self) -> int:
        sign = 1
        kind, val, off = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            sign = -1
            kind, val, off = self.peek()
        if kind != "num" or any(c in val for c in ".eE"):
            raise ExprSyntaxError("integer exponent required after '^'", off)
        self.advance()
        return sign * int(val)

    def atom(self) -> Expr:
        kind, val, off = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "name":
            if val in FUNCTIONS:
                k, v, o = self.peek()
                if not (k == "op" and v == "("):
                    raise ExprSyntaxError(f"expected '(' after function '{val}'", o)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            return self.variable(val, off)
        raise ExprSyntaxError(f"unexpected token {val!r}", off)

    def variable(self, name: str, off: int) -> Var:
        if name in BASE_VARIABLES:
            return Var(name)
        m = _VAR_RE.match(name)
        if m:
            idx = int(m.group(1))
            if not (1 <= idx <= self.fiber_dim):
                raise ExprNameError(
                    f"fiber variable w{idx} out of range (fiber dimension {self.fiber_dim})",
                    off,
                )
            return Var(f"w{idx}")
        raise ExprNameError(f"unknown identifier '{name}'", off)


# ---------------------------------------------------------------------------
# public API


def parse(text: str, fiber_dim: int = 0) -> Expr:
    """Parse ``text`` into an expression over q, t, lambda, w1..w<fiber_dim>."""
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(_tokenize(text), fiber_dim).parse()


def evaluate(e: Expr, bindings: dict):
    """Evaluate ``e``, with bindings mapping variable names to floats or arrays."""
    env = {
        k: (v if isinstance(v, np.ndarray) else float(v)) for k, v in bindings.items()
    }
    return e.eval(env)


_LEGAL_VAR_RE = re.compile(r"q$|t$|lambda$|w[0-9]+$")


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic derivative of ``e`` with respect to ``var``."""
    if not _LEGAL_VAR_RE.match(var):
        raise ExprNameError(f"not a legal variable name: '{var}'", 0)
    return e.diff(var)


def substitute(e: Expr, name: str, value: float) -> Expr:
    """Replace every occurrence of variable ``name`` by the constant ``value``."""
    return e.subst(name, value)


def free_variables(e: Expr) -> frozenset:
    return e.free()
