"""Tensor-product grids on the rectangle, grid functions and quadrature.

All integrals over sampled data use the composite trapezoid rule applied to
the full integrand, kernel included.  The same weights are reused by the
marching solver, so everything here works on arbitrary monotone node sets,
not only uniform ones.
"""
from dataclasses import dataclass
from math import factorial

import numpy as np

from .errors import InvalidArgumentError

MIN_NODES = 5


@dataclass(frozen=True)
class Domain:
    """The rectangle (0, h1) x (0, h2)."""

    h1: float
    h2: float

    def __post_init__(self):
        if not (np.isfinite(self.h1) and np.isfinite(self.h2)):
            raise InvalidArgumentError("domain extents must be finite")
        if self.h1 <= 0 or self.h2 <= 0:
            raise InvalidArgumentError(
                f"domain extents must be positive, got h1={self.h1}, h2={self.h2}"
            )


class Grid1D:
    """Strictly increasing nodes on one axis (at least five of them)."""

    def __init__(self, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < MIN_NODES:
            raise InvalidArgumentError(
                f"a grid needs at least {MIN_NODES} nodes, got {nodes.size}"
            )
        if not np.all(np.isfinite(nodes)):
            raise InvalidArgumentError("grid nodes must be finite")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("grid nodes must be strictly increasing")
        nodes.setflags(write=False)
        self.nodes = nodes

    def __len__(self):
        return self.nodes.size

    def __repr__(self):
        return f"Grid1D(n={len(self)}, [{self.nodes[0]}, {self.nodes[-1]}])"

    def __eq__(self, other):
        if not isinstance(other, Grid1D):
            return NotImplemented
        return self.nodes.shape == other.nodes.shape and bool(
            np.all(self.nodes == other.nodes)
        )

    def __hash__(self):
        return hash(self.nodes.tobytes())

    @property
    def a(self):
        return float(self.nodes[0])

    @property
    def b(self):
        return float(self.nodes[-1])

    @property
    def spacing(self):
        """Largest cell width."""
        return float(np.max(np.diff(self.nodes)))

    def index(self, x):
        """Index of the node equal to ``x`` (up to round-off), else error."""
        scale = max(1.0, abs(self.a), abs(self.b))
        k = int(np.argmin(np.abs(self.nodes - x)))
        if abs(self.nodes[k] - x) > 1e-12 * scale:
            raise InvalidArgumentError(f"{x!r} is not a grid node")
        return k


def make_uniform_grid(n, a, b):
    """Uniform grid with ``n`` nodes on ``[a, b]``; both endpoints exact."""
    if int(n) != n or n < MIN_NODES:
        raise InvalidArgumentError(f"need n >= {MIN_NODES} nodes, got {n}")
    if not b > a:
        raise InvalidArgumentError(f"degenerate interval [{a}, {b}]")
    n = int(n)
    nodes = a + np.arange(n) * ((b - a) / (n - 1))
    nodes[-1] = b
    return Grid1D(nodes)


class TensorGrid:
    """Product of a grid on [0, h1] and a grid on [0, h2]."""

    def __init__(self, g1, g2):
        if g1.a != 0.0 or g2.a != 0.0:
            raise InvalidArgumentError("both axis grids must start at 0")
        self.g1 = g1
        self.g2 = g2

    @property
    def shape(self):
        return (len(self.g1), len(self.g2))

    @property
    def domain(self):
        return Domain(self.g1.b, self.g2.b)

    @property
    def spacing(self):
        return max(self.g1.spacing, self.g2.spacing)

    def mesh(self):
        """Coordinate arrays ``(X1, X2)`` with ``indexing='ij'``."""
        return np.meshgrid(self.g1.nodes, self.g2.nodes, indexing="ij")

    def spans(self, dom):
        return self.g1.b == dom.h1 and self.g2.b == dom.h2

    def __eq__(self, other):
        if not isinstance(other, TensorGrid):
            return NotImplemented
        return self.g1 == other.g1 and self.g2 == other.g2

    def __hash__(self):
        return hash((self.g1, self.g2))

    def __repr__(self):
        return f"TensorGrid({self.g1!r}, {self.g2!r})"


def make_tensor_grid(dom, n1, n2=None):
    """Uniform ``n1 x n2`` grid over the domain rectangle."""
    n2 = n1 if n2 is None else n2
    return TensorGrid(make_uniform_grid(n1, 0.0, dom.h1),
                      make_uniform_grid(n2, 0.0, dom.h2))


class GridFunction2D:
    """Real values on a :class:`TensorGrid`, ``values[i, j]`` at
    ``(g1.nodes[i], g2.nodes[j])``."""

    def __init__(self, grid, values):
        values = np.array(values, dtype=float)
        if values.shape != grid.shape:
            raise InvalidArgumentError(
                f"value shape {values.shape} does not match grid {grid.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("grid function values must be finite")
        values.setflags(write=False)
        self.grid = grid
        self.values = values

    def at(self, x1, x2):
        return float(self.values[self.grid.g1.index(x1), self.grid.g2.index(x2)])

    def __repr__(self):
        return f"GridFunction2D(shape={self.values.shape})"


def _trapezoid_weights(nodes, lo, hi):
    """Trapezoid weights for nodes ``lo..hi`` (inclusive) on ``[nodes[lo], nodes[hi]]``."""
    w = np.zeros(hi - lo + 1)
    if hi > lo:
        dx = np.diff(nodes[lo:hi + 1])
        w[:-1] += 0.5 * dx
        w[1:] += 0.5 * dx
    return w


def quad_weights(grid, upto):
    """Composite trapezoid weights for the integral over ``[nodes[0], nodes[upto]]``.

    The result has ``upto + 1`` entries and sums to ``nodes[upto] - nodes[0]``.
    """
    if int(upto) != upto or not 0 <= upto < len(grid):
        raise InvalidArgumentError(f"node index {upto} out of range")
    return _trapezoid_weights(grid.nodes, 0, int(upto))


def oriented_trapezoid(grid, g, start, stop):
    """Signed trapezoid integral of samples ``g`` from node ``start`` to ``stop``.

    Swapping the bounds negates the result.
    """
    g = np.asarray(g, dtype=float)
    if stop >= start:
        return float(_trapezoid_weights(grid.nodes, start, stop) @ g[start:stop + 1])
    return -float(_trapezoid_weights(grid.nodes, stop, start) @ g[stop:start + 1])


def kernel_integral_1d(grid, f, m, x, origin):
    """Trapezoid approximation of ``int_origin^x (x - t)^m / m! f(t) dt``.

    ``x`` and ``origin`` must be grid nodes; ``origin > x`` gives the
    oriented (negated) integral.
    """
    if int(m) != m or m < 0:
        raise InvalidArgumentError(f"kernel degree must be a non-negative integer, got {m}")
    f = np.asarray(f, dtype=float)
    if f.shape != grid.nodes.shape:
        raise InvalidArgumentError("samples do not match the grid")
    i, o = grid.index(x), grid.index(origin)
    t = grid.nodes
    g = (t[i] - t) ** m / factorial(int(m)) * f
    return oriented_trapezoid(grid, g, o, i)


def kernel_matrix(grid, m, origin):
    """Matrix ``A`` with ``(A @ f)[i] == kernel_integral_1d(grid, f, m, x_i, x_origin)``.

    ``origin`` is a node index.  Row ``i`` only touches nodes between
    ``origin`` and ``i``, which is what makes the Volterra systems causal.
    """
    t = grid.nodes
    n = t.size
    A = np.zeros((n, n))
    fm = factorial(int(m))
    for i in range(n):
        lo, hi = min(i, origin), max(i, origin)
        w = _trapezoid_weights(t, lo, hi)
        if i < origin:
            w = -w
        A[i, lo:hi + 1] = w * (t[i] - t[lo:hi + 1]) ** m / fm
    return A


_GAUSS_POINTS = 10


def kernel_integrals_smooth(grid, func, m, origin, breaks=()):
    """``int_{x_origin}^{x_i} (x_i - t)^m / m! f(t) dt`` at every node ``x_i``.

    For integrands that can be evaluated anywhere (``func`` maps an array of
    abscissae to values).  Uses a 10-point Gauss-Legendre rule per cell, so
    polynomial data up to degree 19 - m is integrated exactly.  Cells are
    split at ``breaks`` (points where ``f`` may jump) so that piecewise smooth
    data keeps full accuracy.
    """
    t = grid.nodes
    left, right, cell = [], [], []
    for c in range(t.size - 1):
        inner = [b for b in breaks if t[c] < b < t[c + 1]]
        pts = [t[c], *sorted(inner), t[c + 1]]
        left += pts[:-1]
        right += pts[1:]
        cell += [c] * (len(pts) - 1)
    left, right, cell = np.array(left), np.array(right), np.array(cell)
    xg, wg = np.polynomial.legendre.leggauss(_GAUSS_POINTS)
    half = 0.5 * (right - left)
    s = (0.5 * (left + right))[:, None] + half[:, None] * xg[None, :]
    w = half[:, None] * wg[None, :]
    fs = np.asarray(func(s.ravel()), dtype=float).reshape(s.shape)
    fm = factorial(int(m))
    out = np.zeros(t.size)
    for i in range(t.size):
        lo, hi = min(i, origin), max(i, origin)
        if lo == hi:
            continue
        sel = (cell >= lo) & (cell < hi)
        val = np.sum(w[sel] * (t[i] - s[sel]) ** m / fm * fs[sel])
        out[i] = val if i > origin else -val
    return out


def diff_sampled(grid, values, order):
    """Derivative of sampled data by repeated second-order differences.

    Each pass uses centered differences inside and second-order one-sided
    stencils at the two ends (``numpy.gradient`` with ``edge_order=2``, which
    also handles non-uniform nodes).
    """
    if int(order) != order or not 1 <= order <= 4:
        raise InvalidArgumentError(f"derivative order must be 1..4, got {order}")
    if len(grid) < order + 1:
        raise InvalidArgumentError("too few nodes for the requested order")
    d = np.asarray(values, dtype=float)
    if d.shape != grid.nodes.shape:
        raise InvalidArgumentError("samples do not match the grid")
    for _ in range(int(order)):
        d = np.gradient(d, grid.nodes, edge_order=2)
    return d


def cell_weights(grid):
    """Tensor trapezoid weights over the whole rectangle, shape ``grid.shape``."""
    w1 = quad_weights(grid.g1, len(grid.g1) - 1)
    w2 = quad_weights(grid.g2, len(grid.g2) - 1)
    return np.outer(w1, w2)
