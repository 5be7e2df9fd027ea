"""Solve the boundary value problem through a 2-D Volterra equation.

Write ``v = D1^4 D2^4 u``.  Taylor expansion around the data corner
(h1, 0) with integral remainders splits every mixed derivative as

    D1^j1 D2^j2 u = P^(j1,j2) + K^(j1,j2) v

where ``P`` depends only on the non-classical data and

    (K^(j1,j2) v)(x) = int_h1^x1 int_0^x2 (x1-l)^(3-j1)/(3-j1)! (x2-s)^(3-j2)/(3-j2)! v(l, s) ds dl

(an index equal to 4 replaces that integral by evaluation at ``x``).
Substituting into the equation gives the second-kind Volterra equation

    v = rhs - sum_{(i1,i2) != (4,4)} a_{i1,i2} (P^(i1,i2) + K^(i1,i2) v).

Both integrals are discretized with the trapezoid rule on the grid, so each
``K`` is ``A1 @ V @ A2.T`` with causal (triangular) axis matrices.  The
discrete system is solved either by marching through the nodes in causal
order (x1 descending, x2 ascending) or by Picard iteration from ``v = 0``.
"""
import time
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError, SingularMarchError
from .grid import GridFunction2D, kernel_matrix
from .pde_operator import ORDER, Jet, coefficient_on_grid

METHODS = ("marching", "picard")


@dataclass(frozen=True)
class SolverOptions:
    method: str = "marching"
    tol: float = 1e-10
    max_iter: int = 200
    pivot_floor: float = 1e-8

    def __post_init__(self):
        if self.method not in METHODS:
            raise InvalidArgumentError(f"method must be one of {METHODS}, got {self.method!r}")
        if not self.tol > 0:
            raise InvalidArgumentError("tol must be positive")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise InvalidArgumentError("max_iter must be a positive integer")
        if not self.pivot_floor > 0:
            raise InvalidArgumentError("pivot_floor must be positive")


@dataclass(frozen=True)
class SolveStats:
    method: str
    iterations: int
    update_norm: float
    residual_norm: float
    wall_time: float


@lru_cache(maxsize=64)
def axis_matrix(grid, j, anchor):
    """Discrete ``x -> int_{x_anchor}^x (x-s)^(3-j)/(3-j)! f(s) ds``; identity for ``j = 4``."""
    if j == ORDER:
        A = np.eye(len(grid))
    else:
        A = kernel_matrix(grid, ORDER - 1 - j, anchor)
    A.setflags(write=False)
    return A


def _axis_matrices(grid):
    n1 = len(grid.g1)
    A1 = [axis_matrix(grid.g1, j, n1 - 1) for j in range(ORDER + 1)]
    A2 = [axis_matrix(grid.g2, j, 0) for j in range(ORDER + 1)]
    return A1, A2


def _check_grid(grid, dom):
    if not grid.spans(dom):
        raise InvalidArgumentError("grid does not span the problem domain")


def data_jet(nc, dom, grid):
    """The data part ``P^(j1,j2)`` of every mixed derivative, as a :class:`Jet`.

    Restricted to ``x1 = h1`` the ``(j1, 0)`` components reproduce the
    classical edge functions built by
    :func:`~pseudoparabolic.boundary.nonclassical_to_classical`.
    """
    _check_grid(grid, dom)
    g1, g2 = grid.g1, grid.g2
    n1 = len(g1)
    Z = nc.corner
    # T1[i2, j1, :] along x1 and T2[i1, j2, :] along x2
    T1 = np.array([nc.edge_x1[i2].remainder_jet(g1, n1 - 1) for i2 in range(4)])
    T2 = np.array([nc.edge_x2[i1].remainder_jet(g2, 0) for i1 in range(4)])
    X1 = [(g1.nodes - dom.h1) ** k / factorial(k) for k in range(4)]
    X2 = [g2.nodes ** k / factorial(k) for k in range(4)]
    d = np.zeros((ORDER + 1, ORDER + 1) + grid.shape)
    for j1 in range(ORDER + 1):
        for j2 in range(ORDER + 1):
            P = d[j1, j2]
            for i1 in range(j1, 4):
                for i2 in range(j2, 4):
                    P += Z[i1, i2] * np.outer(X1[i1 - j1], X2[i2 - j2])
            for i2 in range(j2, 4):
                P += np.outer(T1[i2, j1], X2[i2 - j2])
            for i1 in range(j1, 4):
                P += np.outer(X1[i1 - j1], T2[i1, j2])
    return Jet(grid, d)


def _kernel(V, A1, A2, j1, j2):
    return A1[j1] @ V @ A2[j2].T


def kernel_apply(v, j1, j2, dom):
    """The ``v``-part ``K^(j1,j2) v`` of ``D1^j1 D2^j2 u`` (trapezoid in both directions)."""
    if not (0 <= j1 <= ORDER and 0 <= j2 <= ORDER):
        raise InvalidArgumentError(f"derivative indices ({j1}, {j2}) out of range")
    _check_grid(v.grid, dom)
    A1, A2 = _axis_matrices(v.grid)
    return GridFunction2D(v.grid, _kernel(np.asarray(v.values), A1, A2, j1, j2))


def _assemble(P, V, A1, A2):
    d = np.array(P.d)
    for j1 in range(ORDER + 1):
        for j2 in range(ORDER + 1):
            d[j1, j2] += _kernel(V, A1, A2, j1, j2)
    return Jet(P.grid, d)


def assemble_jet(nc, v, dom, grid):
    """``d[j1][j2] = P^(j1,j2) + K^(j1,j2) v`` for all 25 components."""
    if v.grid != grid:
        raise InvalidArgumentError("v lives on a different grid")
    A1, A2 = _axis_matrices(grid)
    return _assemble(data_jet(nc, dom, grid), np.asarray(v.values), A1, A2)


def _fixed_point_map(V, R, terms, A1, A2):
    out = np.array(R)
    for (j1, j2), a in terms:
        out -= a * _kernel(V, A1, A2, j1, j2)
    return out


def _picard(R, terms, A1, A2, opts):
    V = np.zeros_like(R)
    update = np.inf
    for it in range(1, opts.max_iter + 1):
        V_new = _fixed_point_map(V, R, terms, A1, A2)
        if not np.all(np.isfinite(V_new)):
            raise ConvergenceError(f"Picard iterate became non-finite at sweep {it}", it, np.inf)
        update = float(np.max(np.abs(V_new - V)))
        V = V_new
        if update <= opts.tol:
            return V, it, update
    raise ConvergenceError(
        f"Picard iteration did not converge in {opts.max_iter} sweeps (last update {update:.3e})",
        opts.max_iter, update,
    )


def _march(R, terms, A1, A2, grid, opts):
    n1, n2 = R.shape
    V = np.zeros_like(R)
    for i in range(n1 - 1, -1, -1):
        known = np.array(R[i])
        # self-coupling inside row i, grouped by the x2 kernel index
        self_coupling = {}
        for (j1, j2), a in terms:
            # rows > i are final, row i (and rows < i) are still zero
            known -= a[i] * ((A1[j1][i] @ V) @ A2[j2].T)
            c = A1[j1][i, i]
            if c != 0.0:
                b = self_coupling.setdefault(j2, np.zeros(n2))
                b += c * a[i]
        groups = [(b, A2[j2]) for j2, b in self_coupling.items()]
        row = V[i]
        for j in range(n2):
            acc = known[j]
            pivot = 1.0
            for b, A in groups:
                if b[j] != 0.0:
                    acc -= b[j] * (A[j, :j] @ row[:j])
                    pivot += b[j] * A[j, j]
            if abs(pivot) < opts.pivot_floor:
                x = (float(grid.g1.nodes[i]), float(grid.g2.nodes[j]))
                raise SingularMarchError(
                    f"marching pivot {pivot:.3e} below floor at node {(i, j)} (x = {x})",
                    (i, j), pivot,
                )
            row[j] = acc / pivot
    return V


def solve(prob, grid, opts=None):
    """Solve ``prob`` on ``grid``; returns ``(Jet, SolveStats)``.

    Raises :class:`~pseudoparabolic.errors.ConvergenceError` when Picard
    runs out of sweeps and :class:`~pseudoparabolic.errors.SingularMarchError`
    when a marching pivot is too small.
    """
    opts = opts or SolverOptions()
    _check_grid(grid, prob.dom)
    start = time.perf_counter()
    A1, A2 = _axis_matrices(grid)
    P = data_jet(prob.data, prob.dom, grid)
    terms = [(k, a) for k, a in prob.coeffs.on_grid(grid).items() if np.any(a != 0.0)]
    R = coefficient_on_grid(prob.rhs, grid)
    for (j1, j2), a in terms:
        R -= a * P.d[j1, j2]

    if opts.method == "picard":
        V, iterations, update = _picard(R, terms, A1, A2, opts)
    else:
        V = _march(R, terms, A1, A2, grid, opts)
        iterations, update = 1, 0.0
    fp = float(np.max(np.abs(V - _fixed_point_map(V, R, terms, A1, A2))))
    jet = _assemble(P, V, A1, A2)
    stats = SolveStats(opts.method, iterations, update, fp, time.perf_counter() - start)
    return jet, stats
