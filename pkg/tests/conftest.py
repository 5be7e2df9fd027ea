import numpy as np
import pytest

from pseudoparabolic import expr as ex


def random_expr(rng, depth, names=("x1", "x2"), allow_div=True):
    """Random step-free expression of at most ``depth`` levels."""
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.6:
            return ex.Var(str(rng.choice(names)))
        return ex.Num(float(rng.integers(1, 5)) / 2)
    kind = rng.choice(["+", "-", "*", "/", "^", "neg", "sin", "cos", "exp"])
    if kind == "/" and not allow_div:
        kind = "*"
    if kind in ("+", "-", "*"):
        return ex.BinOp(kind, random_expr(rng, depth - 1, names, allow_div),
                        random_expr(rng, depth - 1, names, allow_div))
    if kind == "/":
        # denominator bounded away from zero: 2 + sin(...)
        den = ex.BinOp("+", ex.Num(2.0), ex.Func("sin", random_expr(rng, depth - 2, names, allow_div)))
        return ex.BinOp("/", random_expr(rng, depth - 1, names, allow_div), den)
    if kind == "^":
        return ex.Pow(random_expr(rng, depth - 1, names, allow_div), int(rng.integers(0, 4)))
    if kind == "neg":
        return ex.Neg(random_expr(rng, depth - 1, names, allow_div))
    if kind == "exp":
        # keep exponentials tame so finite differences stay well conditioned
        return ex.Func("exp", ex.Func("sin", random_expr(rng, depth - 2, names, allow_div)))
    return ex.Func(str(kind), random_expr(rng, depth - 1, names, allow_div))


def random_field(rng):
    """Random smooth u(x1, x2): a polynomial of degree <= 6 per variable, or a trig product."""
    if rng.random() < 0.5:
        terms = []
        for _ in range(int(rng.integers(1, 6))):
            p, q = (int(k) for k in rng.integers(0, 7, size=2))
            c = round(float(rng.uniform(-2, 2)), 3)
            terms.append(f"({c})*x1^{p}*x2^{q}")
        return ex.parse(" + ".join(terms))
    a, b, c, d = (round(float(v), 3) for v in rng.uniform(0.3, 2.0, size=4))
    return ex.parse(f"sin({a}*x1 + {b}) * cos({c}*x2 - {d}) + {a}*x1^2*x2")


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)
