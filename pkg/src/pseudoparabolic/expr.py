"""A small expression language for coefficients and boundary data.

Grammar, lowest to highest precedence::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | VAR | FUNC '(' expr ')' | '(' expr ')'

Variables are ``x1``, ``x2`` and ``t`` (the coordinate of a one-dimensional
edge function).  Functions are ``sin``, ``cos``, ``exp`` and ``step`` with
``step(v) = 1`` for ``v >= 0`` and 0 otherwise.  Exponents must be
non-negative integer literals, which keeps :func:`derive` closed.

Evaluation accepts scalars or numpy arrays (broadcast together).
"""
import re
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import UnsupportedDerivativeError

VARIABLES = ("x1", "x2", "t")
FUNCTIONS = ("sin", "cos", "exp", "step")


class Expr:
    """Base class of the syntax tree; nodes are immutable and hashable."""

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr


class ParseError(ValueError):
    """Malformed expression text; ``offset`` is a UTF-8 byte offset."""

    def __init__(self, offset, message):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset
        self.message = message


class EvaluationError(ArithmeticError):
    def __init__(self, node, message):
        super().__init__(f"{message} in {to_string(node)}")
        self.node = node


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*/^()]))"
)


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = []
        pos = 0
        while True:
            while pos < len(text) and text[pos].isspace():
                pos += 1
            if pos >= len(text):
                break
            m = _TOKEN.match(text, pos)
            if m is None:
                self.fail(pos, f"unexpected character {text[pos]!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    def fail(self, char_pos, message):
        raise ParseError(len(self.text[:char_pos].encode("utf-8")), message)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.take()
        if text != value or kind == "end":
            self.fail(pos, f"expected {value!r}" + (" but input ended" if kind == "end" else f", got {text!r}"))

    def parse(self):
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            self.fail(pos, f"unexpected {text!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            e = BinOp(op, e, self.unary())
        return e

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            pos = self.peek()[2]
            exponent = self.unary()
            if not (isinstance(exponent, Num) and float(exponent.value).is_integer()):
                self.fail(pos, "exponent must be a non-negative integer literal")
            return Pow(base, int(exponent.value))
        return base

    def atom(self):
        kind, text, pos = self.take()
        if kind == "num":
            return Num(float(text))
        if kind == "name":
            if text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(text, arg)
            if text in VARIABLES:
                return Var(text)
            self.fail(pos, f"unknown name {text!r}")
        if text == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "end":
            self.fail(pos, "unexpected end of input")
        self.fail(pos, f"unexpected {text!r}")


def parse(text):
    """Parse ``text`` into an :class:`Expr`, raising :class:`ParseError`."""
    return _Parser(text).parse()


# -- printing ----------------------------------------------------------------

def _fmt_number(v):
    if v.is_integer() and abs(v) < 1e15:
        s = str(int(v))
    else:
        s = repr(v)
    return f"({s})" if v < 0 or s.startswith("-") else s


def to_string(e):
    """Fully parenthesized text form; ``parse(to_string(e))`` rebuilds ``e``."""
    if isinstance(e, Num):
        return _fmt_number(float(e.value))
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, Pow):
        return f"({to_string(e.base)}^{e.exponent})"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# -- evaluation --------------------------------------------------------------

def _eval(e, env):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise EvaluationError(e, f"variable {e.name} is not bound") from None
    if isinstance(e, BinOp):
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            r = a + b
        elif e.op == "-":
            r = a - b
        elif e.op == "*":
            r = a * b
        else:
            if np.any(np.asarray(b) == 0):
                raise EvaluationError(e, "division by zero")
            r = a / b
    elif isinstance(e, Neg):
        r = -_eval(e.arg, env)
    elif isinstance(e, Pow):
        r = _eval(e.base, env) ** e.exponent
    elif isinstance(e, Func):
        a = _eval(e.arg, env)
        if e.name == "sin":
            r = np.sin(a)
        elif e.name == "cos":
            r = np.cos(a)
        elif e.name == "exp":
            r = np.exp(a)
        else:
            r = np.where(np.asarray(a) >= 0, 1.0, 0.0)
    else:
        raise TypeError(f"not an expression node: {e!r}")
    if not np.all(np.isfinite(r)):
        raise EvaluationError(e, "non-finite result")
    return r


def evaluate_env(e, env):
    """Evaluate with an explicit variable binding ``{name: value}``."""
    with np.errstate(all="ignore"):
        r = _eval(e, env)
    if np.ndim(r) == 0:
        return float(r)
    return np.asarray(r, dtype=float)


def evaluate(e, x1=0.0, x2=0.0, t=None):
    """Evaluate ``e`` at ``(x1, x2)``; ``t`` defaults to unbound."""
    env = {"x1": x1, "x2": x2}
    if t is not None:
        env["t"] = t
    return evaluate_env(e, env)


# -- symbolic differentiation -------------------------------------------------

def _is(e, v):
    return isinstance(e, Num) and e.value == v


def add(a, b):
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    return BinOp("+", a, b)


def sub(a, b):
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    if _is(b, 0):
        return a
    if _is(a, 0):
        return neg(b)
    return BinOp("-", a, b)


def mul(a, b):
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    if _is(a, 0) or _is(b, 0):
        return Num(0.0)
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    return BinOp("*", a, b)


def div(a, b):
    if isinstance(a, Num) and isinstance(b, Num) and b.value != 0:
        return Num(a.value / b.value)
    if _is(a, 0):
        return Num(0.0)
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def neg(a):
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a, n):
    if n == 0:
        return Num(1.0)
    if n == 1:
        return a
    if isinstance(a, Num) and abs(a.value) <= 1e100:
        return Num(a.value ** n)
    return Pow(a, n)


def derive(e, var):
    """Exact derivative of ``e`` with respect to variable ``var``.

    Only constant folding and 0/1 identities are applied to the result.
    """
    if isinstance(e, Num):
        return Num(0.0)
    if isinstance(e, Var):
        return Num(1.0 if e.name == var else 0.0)
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = derive(a, var), derive(b, var)
        if e.op == "+":
            return add(da, db)
        if e.op == "-":
            return sub(da, db)
        if e.op == "*":
            return add(mul(da, b), mul(a, db))
        if _is(db, 0):
            # constant denominator: skip the quotient rule so it is not squared repeatedly
            return div(da, b)
        return div(sub(mul(da, b), mul(a, db)), power(b, 2))
    if isinstance(e, Neg):
        return neg(derive(e.arg, var))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Num(0.0)
        inner = derive(e.base, var)
        return mul(mul(Num(float(e.exponent)), power(e.base, e.exponent - 1)), inner)
    if isinstance(e, Func):
        if e.name == "step":
            raise UnsupportedDerivativeError(f"cannot differentiate {to_string(e)}")
        inner = derive(e.arg, var)
        if e.name == "sin":
            outer = Func("cos", e.arg)
        elif e.name == "cos":
            outer = neg(Func("sin", e.arg))
        else:
            outer = e
        return mul(outer, inner)
    raise TypeError(f"not an expression node: {e!r}")


def derive_n(e, var, n):
    for _ in range(n):
        e = derive(e, var)
    return e


def substitute(e, name, value):
    """Replace variable ``name`` by ``value`` (an Expr or a number).

    The result is rebuilt with the folding constructors, so substituting a
    number collapses the constant parts.
    """
    if not isinstance(value, Expr):
        value = Num(float(value))
    if isinstance(e, Var):
        return value if e.name == name else e
    if isinstance(e, Num):
        return e
    if isinstance(e, BinOp):
        build = {"+": add, "-": sub, "*": mul, "/": div}[e.op]
        return build(substitute(e.left, name, value), substitute(e.right, name, value))
    if isinstance(e, Neg):
        return neg(substitute(e.arg, name, value))
    if isinstance(e, Pow):
        return power(substitute(e.base, name, value), e.exponent)
    return Func(e.name, substitute(e.arg, name, value))


def contains_step(e):
    if isinstance(e, Func):
        return e.name == "step" or contains_step(e.arg)
    if isinstance(e, BinOp):
        return contains_step(e.left) or contains_step(e.right)
    if isinstance(e, (Neg,)):
        return contains_step(e.arg)
    if isinstance(e, Pow):
        return contains_step(e.base)
    return False


def step_arguments(e):
    """Arguments of every ``step`` call in ``e`` (the places where it can jump)."""
    if isinstance(e, Func):
        inner = step_arguments(e.arg)
        return [e.arg] + inner if e.name == "step" else inner
    if isinstance(e, BinOp):
        return step_arguments(e.left) + step_arguments(e.right)
    if isinstance(e, (Neg, Pow)):
        return step_arguments(e.arg if isinstance(e, Neg) else e.base)
    return []


def variables(e):
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, (Neg, Func)):
        return variables(e.arg)
    if isinstance(e, Pow):
        return variables(e.base)
    return set()


def monomial(var, degree, coeff=1.0):
    """``coeff * var^degree / degree!`` as an expression."""
    return mul(Num(coeff / factorial(degree)), power(Var(var), degree))


def as_expr(obj):
    """Accept an :class:`Expr`, expression text, or a number."""
    if isinstance(obj, Expr):
        return obj
    if isinstance(obj, str):
        return parse(obj)
    return Num(float(obj))
