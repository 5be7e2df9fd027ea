"""Manufactured solutions, grid-convergence studies and equivalence checks."""
import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .boundary import (
    check_agreement,
    classical_to_nonclassical,
    nonclassical_to_classical,
    sample_classical_from_field,
)
from .errors import InvalidArgumentError, UnsupportedDerivativeError
from .grid import Domain, GridFunction2D, make_tensor_grid
from .pde_operator import ORDER, CoefficientSet, Jet, Problem, lp_norm
from .volterra import SolverOptions, solve

ORDER_FLOOR = 1e-11


@dataclass(frozen=True)
class MmsCase:
    u_exact: ex.Expr
    coeffs: CoefficientSet = field(default_factory=CoefficientSet)
    dom: Domain = Domain(1.0, 1.0)

    def __post_init__(self):
        u = ex.as_expr(self.u_exact)
        if ex.contains_step(u):
            raise UnsupportedDerivativeError("manufactured solution must be step-free")
        if not ex.variables(u) <= {"x1", "x2"}:
            raise InvalidArgumentError("manufactured solution may only use x1, x2")
        object.__setattr__(self, "u_exact", u)
        if not isinstance(self.coeffs, CoefficientSet):
            object.__setattr__(self, "coeffs", CoefficientSet(self.coeffs))


def derivative_exprs(u):
    """``D1^i1 D2^i2 u`` for 0 <= i1, i2 <= 4 as a nested list of expressions."""
    out = []
    for i1 in range(ORDER + 1):
        base = ex.derive_n(u, "x1", i1)
        out.append([ex.derive_n(base, "x2", i2) for i2 in range(ORDER + 1)])
    return out


def exact_jet(u, grid):
    X1, X2 = grid.mesh()
    d = np.zeros((ORDER + 1, ORDER + 1) + grid.shape)
    for i1, row in enumerate(derivative_exprs(ex.as_expr(u))):
        for i2, e in enumerate(row):
            d[i1, i2] = ex.evaluate(e, X1, X2)
    return Jet(grid, d)


def manufacture(case, grid):
    """Problem whose exact solution is ``case.u_exact``, plus its exact jet.

    The right-hand side is the operator applied symbolically to the exact
    solution; with sampled coefficients it is assembled node-wise instead.
    Boundary data goes classical -> non-classical through the agreement check.
    """
    u, dom = case.u_exact, case.dom
    D = derivative_exprs(u)
    if all(isinstance(c, ex.Expr) for c in case.coeffs.values()):
        rhs = D[ORDER][ORDER]
        for (i1, i2), a in case.coeffs.items():
            rhs = ex.add(rhs, ex.mul(a, D[i1][i2]))
    else:
        jet = exact_jet(u, grid)
        vals = np.array(jet.d[ORDER, ORDER])
        for (i1, i2), a in case.coeffs.on_grid(grid).items():
            vals += a * jet.d[i1, i2]
        rhs = GridFunction2D(grid, vals)
    data = classical_to_nonclassical(sample_classical_from_field(u, dom), dom.h1)
    return Problem(dom, case.coeffs, rhs, data), exact_jet(u, grid)


@dataclass(frozen=True)
class ConvergenceRow:
    n1: int
    n2: int
    h: float
    sup_error: float
    l2_error: float
    order: float | None = None


def observed_orders(errors, spacings, floor=ORDER_FLOOR):
    """Consecutive-pair orders ``log(e_prev / e) / log(h_prev / h)``.

    Pairs with an error below ``floor`` have no meaningful order (``None``).
    For grids that halve the spacing this is the usual log2 ratio.
    """
    orders = [None]
    for k in range(1, len(errors)):
        e0, e1 = errors[k - 1], errors[k]
        if e0 < floor or e1 < floor:
            orders.append(None)
        else:
            orders.append(math.log(e0 / e1) / math.log(spacings[k - 1] / spacings[k]))
    return orders


def convergence_study(case, sizes, opts=None):
    """Manufacture, solve and measure ``u`` errors on ``n x n`` grids for each size."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < 3:
        raise InvalidArgumentError("a convergence study needs at least three grid sizes")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidArgumentError("grid sizes must be strictly increasing")
    opts = opts or SolverOptions()
    sups, l2s, hs, shapes = [], [], [], []
    for n in sizes:
        grid = make_tensor_grid(case.dom, n)
        prob, exact = manufacture(case, grid)
        try:
            jet, _ = solve(prob, grid, opts)
        except (ArithmeticError, RuntimeError) as err:
            err.size = n
            err.args = (f"grid {n}x{n}: {err.args[0] if err.args else err}",) + err.args[1:]
            raise
        e = jet.d[0, 0] - exact.d[0, 0]
        sups.append(float(np.max(np.abs(e))))
        l2s.append(lp_norm(e, grid, 2.0))
        hs.append(grid.spacing)
        shapes.append(grid.shape)
    orders = observed_orders(sups, hs)
    return [ConvergenceRow(s[0], s[1], h, es, el, o)
            for s, h, es, el, o in zip(shapes, hs, sups, l2s, orders)]


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["size", "sup_err", "l2_err", "order"])
    for r in rows:
        w.writerow([r.n1, f"{r.sup_error:.17g}", f"{r.l2_error:.17g}",
                    "" if r.order is None else f"{r.order:.6f}"])
    return buf.getvalue()


def format_table(rows):
    lines = [f"{'size':>9} {'h':>10} {'sup error':>12} {'L2 error':>12} {'order':>7}"]
    for r in rows:
        order = "n/a" if r.order is None else f"{r.order:.3f}"
        lines.append(f"{f'{r.n1}x{r.n2}':>9} {r.h:>10.4g} {r.sup_error:>12.4e} {r.l2_error:>12.4e} {order:>7}")
    return "\n".join(lines)


@dataclass(frozen=True)
class EquivalenceReport:
    deviations: dict
    tol: float
    agreement: object

    @property
    def passed(self):
        return self.agreement.passed and all(d <= self.tol for d in self.deviations.values())

    @property
    def max_deviation(self):
        return max(self.deviations.values())


def trace_deviations(jet, cd):
    """Largest gap between the jet's edge traces and classical data ``cd``.

    ``phi[k]`` is compared with ``d[k][0]`` on ``x1 = h1`` and ``psi[k]``
    with ``d[0][k]`` on ``x2 = 0``.
    """
    g1, g2 = jet.grid.g1, jet.grid.g2
    out = {}
    for k in range(4):
        out[f"phi{k + 1}"] = float(np.max(np.abs(jet.d[k, 0, -1, :] - cd.phi[k].values(g2))))
    for k in range(4):
        out[f"psi{k + 1}"] = float(np.max(np.abs(jet.d[0, k, :, 0] - cd.psi[k].values(g1))))
    return out


def equivalence_check(prob, jet, tol, classical=None):
    """Check that a solution of the non-classical problem satisfies the classical one.

    The classical data is rebuilt from ``prob.data`` unless ``classical`` is
    given (e.g. the original data a problem was converted from).
    """
    if not jet.grid.spans(prob.dom):
        raise InvalidArgumentError("jet grid does not span the problem domain")
    rebuilt = nonclassical_to_classical(prob.data, prob.dom, jet.grid)
    cd = rebuilt if classical is None else classical
    agreement = check_agreement(rebuilt, prob.dom.h1, max(tol, 1e-9))
    return EquivalenceReport(trace_deviations(jet, cd), tol, agreement)


def boundary_reproduction(jet, nc, dom):
    """Max deviation of the jet from the non-classical conditions, per group.

    Keys: ``corner`` (16 values at (h1, 0)), ``edge_x1`` (``d[4][i2]`` on
    ``x2 = 0``) and ``edge_x2`` (``d[i1][4]`` on ``x1 = h1``).
    """
    g1, g2 = jet.grid.g1, jet.grid.g2
    corner = max(abs(jet.d[i1, i2, -1, 0] - nc.corner[i1, i2]) for i1 in range(4) for i2 in range(4))
    e1 = max(float(np.max(np.abs(jet.d[ORDER, i2, :, 0] - nc.edge_x1[i2].values(g1)))) for i2 in range(4))
    e2 = max(float(np.max(np.abs(jet.d[i1, ORDER, -1, :] - nc.edge_x2[i1].values(g2)))) for i1 in range(4))
    return {"corner": float(corner), "edge_x1": e1, "edge_x2": e2}
