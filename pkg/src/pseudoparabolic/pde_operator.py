"""The (4,4)-order operator ``sum a_{i1,i2} D1^i1 D2^i2 u`` with ``a_{4,4} = 1``.

Coefficients are either expressions in ``x1, x2`` (``step`` allowed, so
piecewise-constant media are easy to write down) or node samples on a
tensor grid.  Sampled coefficients are only ever looked up at their own
nodes; there is no interpolation.
"""
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .boundary import NonClassicalData
from .errors import InvalidArgumentError
from .grid import Domain, GridFunction2D, cell_weights

ORDER = 4
INDEX_PAIRS = tuple((i1, i2) for i1 in range(ORDER + 1) for i2 in range(ORDER + 1)
                    if (i1, i2) != (ORDER, ORDER))


def as_coefficient(c):
    """Normalize to an :class:`~pseudoparabolic.expr.Expr` or a :class:`GridFunction2D`."""
    if isinstance(c, GridFunction2D):
        return c
    e = ex.as_expr(c)
    extra = ex.variables(e) - {"x1", "x2"}
    if extra:
        raise InvalidArgumentError(f"coefficients may only use x1, x2; found {sorted(extra)}")
    return e


def eval_coefficient(c, x1, x2):
    if isinstance(c, GridFunction2D):
        return c.at(x1, x2)
    return ex.evaluate(c, x1, x2)


def coefficient_on_grid(c, grid):
    """Values of a coefficient (or right-hand side) at every node of ``grid``."""
    if isinstance(c, GridFunction2D):
        if c.grid != grid:
            raise InvalidArgumentError("sampled coefficient lives on a different grid")
        return np.array(c.values)
    X1, X2 = grid.mesh()
    return np.broadcast_to(ex.evaluate(c, X1, X2), grid.shape).copy()


class CoefficientSet(Mapping):
    """Lower-order coefficients keyed by ``(i1, i2)``; absent keys are zero.

    The leading coefficient ``(4, 4)`` is fixed to 1 and may not be given.
    """

    def __init__(self, coeffs=None):
        items = {}
        for key, c in dict(coeffs or {}).items():
            if isinstance(key, str):
                key = tuple(int(k) for k in key.split(","))
            key = tuple(key)
            if key == (ORDER, ORDER):
                raise InvalidArgumentError("the leading coefficient a_{4,4} is fixed to 1")
            if key not in INDEX_PAIRS:
                raise InvalidArgumentError(f"coefficient index {key} out of range")
            items[key] = as_coefficient(c)
        self._items = items

    def __getitem__(self, key):
        return self._items[tuple(key)]

    def __iter__(self):
        return iter(sorted(self._items))

    def __len__(self):
        return len(self._items)

    def __repr__(self):
        return f"CoefficientSet({sorted(self._items)})"

    def on_grid(self, grid):
        return {k: coefficient_on_grid(c, grid) for k, c in self._items.items()}


@dataclass(frozen=True)
class Problem:
    """Equation data plus non-classical boundary data on one rectangle."""

    dom: Domain
    coeffs: CoefficientSet
    rhs: object
    data: NonClassicalData

    def __post_init__(self):
        if not isinstance(self.coeffs, CoefficientSet):
            object.__setattr__(self, "coeffs", CoefficientSet(self.coeffs))
        object.__setattr__(self, "rhs", as_coefficient(self.rhs))
        if isinstance(self.rhs, GridFunction2D) and not self.rhs.grid.spans(self.dom):
            raise InvalidArgumentError("sampled right-hand side does not span the domain")
        for c in self.coeffs.values():
            if isinstance(c, GridFunction2D) and not c.grid.spans(self.dom):
                raise InvalidArgumentError("sampled coefficient does not span the domain")


class Jet:
    """All mixed derivatives ``D1^i1 D2^i2 u`` (0 <= i1, i2 <= 4) on a grid.

    ``d`` has shape ``(5, 5, n1, n2)``; ``jet[i1, i2]`` returns one component
    as a :class:`GridFunction2D`, ``jet[0, 0]`` being ``u`` itself.
    """

    def __init__(self, grid, d):
        d = np.array(d, dtype=float)
        if d.shape != (ORDER + 1, ORDER + 1) + grid.shape:
            raise InvalidArgumentError(f"jet array has shape {d.shape}, expected {(5, 5) + grid.shape}")
        if not np.all(np.isfinite(d)):
            raise InvalidArgumentError("jet values must be finite")
        d.setflags(write=False)
        self.grid = grid
        self.d = d

    def __getitem__(self, idx):
        i1, i2 = idx
        return GridFunction2D(self.grid, self.d[i1, i2])

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((ORDER + 1, ORDER + 1) + grid.shape))

    def __add__(self, other):
        self._check(other)
        return Jet(self.grid, self.d + other.d)

    def __mul__(self, alpha):
        return Jet(self.grid, alpha * self.d)

    __rmul__ = __mul__

    def _check(self, other):
        if other.grid != self.grid:
            raise InvalidArgumentError("jets live on different grids")


def apply_operator(jet, coeffs, node):
    """``d[4][4] + sum a_{i1,i2} d[i1][i2]`` at grid node ``node = (i, j)``."""
    i, j = node
    n1, n2 = jet.grid.shape
    if not (0 <= i < n1 and 0 <= j < n2):
        raise InvalidArgumentError(f"node {node} out of range")
    x1 = jet.grid.g1.nodes[i]
    x2 = jet.grid.g2.nodes[j]
    total = jet.d[ORDER, ORDER, i, j]
    for (i1, i2), c in coeffs.items():
        total += eval_coefficient(c, x1, x2) * jet.d[i1, i2, i, j]
    return float(total)


def operator_on_grid(jet, coeffs):
    """Vectorized :func:`apply_operator` over all nodes."""
    out = np.array(jet.d[ORDER, ORDER])
    for (i1, i2), a in coeffs.on_grid(jet.grid).items():
        out += a * jet.d[i1, i2]
    return out


def lp_norm(values, grid, p=2.0):
    """Discrete L_p norm with tensor trapezoid weights; ``p = inf`` gives the sup norm."""
    values = np.abs(np.asarray(values))
    if np.isinf(p):
        return float(values.max())
    if p < 1:
        raise InvalidArgumentError("p must be >= 1")
    return float(np.sum(cell_weights(grid) * values ** p) ** (1.0 / p))


def residual(jet, prob, p=2.0):
    """Pointwise residual of the equation and its sup and L_p norms.

    Returns ``(GridFunction2D, sup_norm, lp_norm)``.
    """
    if not jet.grid.spans(prob.dom):
        raise InvalidArgumentError("jet grid does not span the problem domain")
    rhs = coefficient_on_grid(prob.rhs, jet.grid)
    r = operator_on_grid(jet, prob.coeffs) - rhs
    return GridFunction2D(jet.grid, r), float(np.max(np.abs(r))), lp_norm(r, jet.grid, p)

