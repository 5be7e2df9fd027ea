"""Classical and non-classical boundary data and the conversions between them.

Classical data lives on the two edges meeting at the corner (h1, 0):

* ``phi[k]`` (k = 0..3) is ``D1^k u`` on the edge ``x1 = h1``, a function of x2;
* ``psi[k]`` (k = 0..3) is ``D2^k u`` on the edge ``x2 = 0``, a function of x1.

Non-classical data is the 4x4 table of corner derivatives
``Z[i1, i2] = D1^i1 D2^i2 u(h1, 0)`` plus the top-order edge traces
``Z_{4,i2}(x1) = D1^4 D2^i2 u(x1, 0)`` and ``Z_{i1,4}(x2) = D1^i1 D2^4 u(h1, x2)``.

Classical data has to satisfy 16 corner agreement conditions; condition
``(i1, i2)`` reads ``phi[i1]^(i2)(0) == psi[i2]^(i1)(h1)``.  Non-classical
data needs none: any table and any integrable edge traces give consistent
classical data through the Taylor-with-integral-remainder formulas in
:func:`nonclassical_to_classical`.
"""
from dataclasses import dataclass
from math import factorial

import numpy as np

from . import expr as ex
from .errors import InconsistentDataError, InvalidArgumentError, UnsupportedDerivativeError
from .grid import diff_sampled, kernel_integrals_smooth, kernel_matrix

AXIS_VARIABLE = {1: "x1", 2: "x2"}


def _same_nodes(g, h):
    if len(g) != len(h):
        return False
    scale = max(1.0, abs(g.b))
    return bool(np.all(np.abs(g.nodes - h.nodes) <= 1e-12 * scale))


class BoundaryFunction:
    """A function of one coordinate, analytic or sampled.

    Analytic functions are stored as an expression in ``t`` (the axis
    variable ``x1``/``x2`` is accepted and renamed).  Sampled functions keep a
    jet: row ``k`` of ``jet`` holds samples of the k-th derivative.  Only the
    values row is mandatory; missing derivative rows are reconstructed with
    :func:`~pseudoparabolic.grid.diff_sampled`.
    """

    def __init__(self, axis, expr=None, grid=None, jet=None):
        if axis not in (1, 2):
            raise InvalidArgumentError(f"axis must be 1 or 2, got {axis}")
        if (expr is None) == (grid is None):
            raise InvalidArgumentError("give either an expression or a sampled grid")
        self.axis = axis
        self.expr = None
        self.grid = None
        self.jet = None
        if expr is not None:
            e = ex.as_expr(expr)
            e = ex.substitute(e, AXIS_VARIABLE[axis], ex.Var("t"))
            extra = ex.variables(e) - {"t"}
            if extra:
                raise InvalidArgumentError(
                    f"edge function on axis {axis} may only use t or "
                    f"{AXIS_VARIABLE[axis]}, found {sorted(extra)}"
                )
            self.expr = e
        else:
            jet = np.atleast_2d(np.array(jet, dtype=float))
            if jet.shape[1] != len(grid) or jet.shape[0] > 5:
                raise InvalidArgumentError("sample jet does not match the grid")
            if not np.all(np.isfinite(jet)):
                raise InvalidArgumentError("samples must be finite")
            jet.setflags(write=False)
            self.grid = grid
            self.jet = jet

    @classmethod
    def analytic(cls, expr, axis):
        return cls(axis, expr=expr)

    @classmethod
    def sampled(cls, grid, values, axis, derivatives=()):
        rows = [np.asarray(values, dtype=float)] + [np.asarray(d, dtype=float) for d in derivatives]
        return cls(axis, grid=grid, jet=np.vstack(rows))

    @property
    def is_sampled(self):
        return self.grid is not None

    def __repr__(self):
        if self.is_sampled:
            return f"BoundaryFunction(axis={self.axis}, sampled n={len(self.grid)}, jet rows={self.jet.shape[0]})"
        return f"BoundaryFunction(axis={self.axis}, {ex.to_string(self.expr)})"

    def _check_grid(self, grid):
        if not _same_nodes(self.grid, grid):
            raise InvalidArgumentError("sampled boundary function queried on a different grid")

    def derivative_expr(self, order):
        return ex.derive_n(self.expr, "t", order)

    def derivative(self, order, grid):
        """Samples of the ``order``-th derivative at the nodes of ``grid``."""
        if self.is_sampled:
            self._check_grid(grid)
            top = self.jet.shape[0] - 1
            if order <= top:
                return np.array(self.jet[order])
            return diff_sampled(grid, self.jet[top], order - top)
        e = self.derivative_expr(order) if order else self.expr
        return np.broadcast_to(ex.evaluate_env(e, {"t": grid.nodes}), grid.nodes.shape).copy()

    def values(self, grid):
        return self.derivative(0, grid)

    def derivative_at(self, order, x):
        if self.is_sampled:
            return float(self.derivative(order, self.grid)[self.grid.index(x)])
        e = self.derivative_expr(order) if order else self.expr
        return float(ex.evaluate_env(e, {"t": x}))

    def __call__(self, x):
        """Evaluate anywhere (analytic) or at nodes only (sampled)."""
        if self.is_sampled:
            x = np.atleast_1d(np.asarray(x, dtype=float))
            return np.array([self.jet[0, self.grid.index(xi)] for xi in x])
        return np.broadcast_to(ex.evaluate_env(self.expr, {"t": x}), np.shape(x)).astype(float)

    def remainder_jet(self, grid, anchor):
        """Derivatives of ``R(x) = int_{x_anchor}^x (x - s)^3/3! f(s) ds``.

        Row ``k`` (k = 0..3) is ``int (x - s)^(3-k)/(3-k)! f(s) ds`` and row 4
        is ``f`` itself.  Sampled data uses the trapezoid kernel matrices;
        analytic data is integrated cell-by-cell with Gauss-Legendre.
        """
        out = np.empty((5, len(grid)))
        if self.is_sampled:
            f = self.values(grid)
            for k in range(4):
                out[k] = kernel_matrix(grid, 3 - k, anchor) @ f
            out[4] = f
        else:
            func = self.__call__
            breaks = _step_breaks(self.expr, grid)
            for k in range(4):
                out[k] = kernel_integrals_smooth(grid, func, 3 - k, anchor, breaks)
            out[4] = self(grid.nodes)
        return out


def _step_breaks(e, grid, per_cell=16):
    """Points in ``[a, b]`` where a ``step`` inside ``e(t)`` switches.

    Sign changes of every step argument are bracketed on a fine sampling and
    then bisected down to round-off.
    """
    args = ex.step_arguments(e)
    if not args:
        return ()
    t = np.linspace(grid.a, grid.b, per_cell * (len(grid) - 1) + 1)
    out = []
    for arg in args:
        g = np.broadcast_to(ex.evaluate_env(arg, {"t": t}), t.shape) >= 0
        for k in np.flatnonzero(g[1:] != g[:-1]):
            lo, hi, glo = t[k], t[k + 1], g[k]
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if mid in (lo, hi):
                    break
                if (float(ex.evaluate_env(arg, {"t": mid})) >= 0) == glo:
                    lo = mid
                else:
                    hi = mid
            out.append(hi)
    return tuple(sorted(out))


def _as_boundary_function(obj, axis):
    if isinstance(obj, BoundaryFunction):
        return obj
    return BoundaryFunction.analytic(obj, axis)


@dataclass(frozen=True)
class ClassicalData:
    """Edge data: ``phi`` on ``x1 = h1`` (functions of x2), ``psi`` on ``x2 = 0``."""

    phi: tuple
    psi: tuple

    def __post_init__(self):
        if len(self.phi) != 4 or len(self.psi) != 4:
            raise InvalidArgumentError("classical data needs four phi and four psi functions")
        object.__setattr__(self, "phi", tuple(_as_boundary_function(f, 2) for f in self.phi))
        object.__setattr__(self, "psi", tuple(_as_boundary_function(f, 1) for f in self.psi))
        for f in self.phi + self.psi:
            if f.expr is not None and ex.contains_step(f.expr):
                raise UnsupportedDerivativeError(
                    "classical boundary functions must be four times differentiable (no step)"
                )


@dataclass(frozen=True)
class NonClassicalData:
    """Corner table ``corner[i1, i2]`` and edge traces ``edge_x1[i2]``, ``edge_x2[i1]``.

    Edge traces only need to be integrable, so they may contain ``step``.
    """

    corner: np.ndarray
    edge_x1: tuple
    edge_x2: tuple

    def __post_init__(self):
        corner = np.array(self.corner, dtype=float)
        if corner.shape != (4, 4):
            raise InvalidArgumentError("corner table must be 4x4")
        if not np.all(np.isfinite(corner)):
            raise InvalidArgumentError("corner values must be finite")
        corner.setflags(write=False)
        if len(self.edge_x1) != 4 or len(self.edge_x2) != 4:
            raise InvalidArgumentError("need four edge functions on each edge")
        e1 = tuple(_as_boundary_function(f, 1) for f in self.edge_x1)
        e2 = tuple(_as_boundary_function(f, 2) for f in self.edge_x2)
        if any(f.axis != 1 for f in e1) or any(f.axis != 2 for f in e2):
            raise InvalidArgumentError("edge_x1 must live on axis 1 and edge_x2 on axis 2")
        object.__setattr__(self, "corner", corner)
        object.__setattr__(self, "edge_x1", e1)
        object.__setattr__(self, "edge_x2", e2)

    @classmethod
    def zero(cls):
        return cls(np.zeros((4, 4)), ("0",) * 4, ("0",) * 4)


@dataclass(frozen=True)
class AgreementRecord:
    index: int
    i1: int
    i2: int
    lhs: float
    rhs: float
    residual: float
    passed: bool

    @property
    def label(self):
        return f"phi{self.i1 + 1}^({self.i2})(0) = psi{self.i2 + 1}^({self.i1})(h1)"


@dataclass(frozen=True)
class AgreementReport:
    records: tuple
    tol: float

    @property
    def passed(self):
        return all(r.passed for r in self.records)

    @property
    def failures(self):
        return [r for r in self.records if not r.passed]

    def to_text(self):
        lines = [f"{'idx':>3}  {'condition':<34} {'lhs':>24} {'rhs':>24} {'residual':>10}  status"]
        for r in self.records:
            lines.append(
                f"{r.index:>3}  {r.label:<34} {r.lhs:>24.17g} {r.rhs:>24.17g} "
                f"{r.residual:>10.3e}  {'PASS' if r.passed else 'FAIL'}"
            )
        lines.append(f"tol = {self.tol:g}: {'all 16 conditions hold' if self.passed else f'{len(self.failures)} condition(s) violated'}")
        return "\n".join(lines)

    def to_dict(self):
        return {
            "tol": self.tol,
            "passed": self.passed,
            "conditions": [
                {"index": r.index, "i1": r.i1, "i2": r.i2, "lhs": r.lhs,
                 "rhs": r.rhs, "residual": r.residual, "pass": r.passed}
                for r in self.records
            ],
        }


def check_agreement(cd, h1, tol=1e-9):
    """Evaluate the 16 corner agreement conditions of classical data.

    Records are ordered row-major over ``(i1, i2)``; record ``4*i1 + i2 + 1``
    compares ``phi[i1]^(i2)(0)`` with ``psi[i2]^(i1)(h1)``.
    """
    if tol < 0:
        raise InvalidArgumentError("tolerance must be non-negative")
    if any(f.axis != 2 for f in cd.phi) or any(f.axis != 1 for f in cd.psi):
        raise InvalidArgumentError("phi functions must live on axis 2 and psi functions on axis 1")
    records = []
    for i1 in range(4):
        for i2 in range(4):
            lhs = cd.phi[i1].derivative_at(i2, 0.0)
            rhs = cd.psi[i2].derivative_at(i1, h1)
            res = abs(lhs - rhs)
            records.append(AgreementRecord(4 * i1 + i2 + 1, i1, i2, lhs, rhs, res, res <= tol))
    return AgreementReport(tuple(records), tol)


def _fourth_derivative(f):
    if f.is_sampled:
        return BoundaryFunction.sampled(f.grid, f.derivative(4, f.grid), f.axis)
    return BoundaryFunction.analytic(f.derivative_expr(4), f.axis)


def classical_to_nonclassical(cd, h1, tol=1e-9):
    """Corner table and edge traces from agreeing classical data.

    Corner values come from the phi side; the psi side only enters the
    agreement check, which must pass.
    """
    report = check_agreement(cd, h1, tol)
    if not report.passed:
        bad = ", ".join(str(r.index) for r in report.failures)
        raise InconsistentDataError(f"agreement conditions violated: {bad}", report)
    corner = np.array([[cd.phi[i1].derivative_at(i2, 0.0) for i2 in range(4)] for i1 in range(4)])
    return NonClassicalData(
        corner,
        tuple(_fourth_derivative(cd.psi[i2]) for i2 in range(4)),
        tuple(_fourth_derivative(cd.phi[i1]) for i1 in range(4)),
    )


def taylor_jet(coeffs, offsets):
    """Derivatives of ``sum_i offsets^i / i! * coeffs[i]`` for orders 0..4.

    ``coeffs`` has four entries (orders 0..3); row 4 of the result is zero.
    """
    out = np.zeros((5, offsets.size))
    for k in range(4):
        for i in range(k, 4):
            out[k] += offsets ** (i - k) / factorial(i - k) * coeffs[i]
    return out


def nonclassical_to_classical(nc, dom, out_grid):
    """Classical edge data rebuilt from the corner table and edge traces.

    ``phi[i1](x2) = sum_i2 x2^i2/i2! Z[i1,i2] + int_0^x2 (x2-s)^3/3! Z_{i1,4}(s) ds``
    and ``psi[i2](x1) = sum_i1 (x1-h1)^i1/i1! Z[i1,i2] + int_h1^x1 (x1-s)^3/3! Z_{4,i2}(s) ds``.
    The returned functions are sampled on the axes of ``out_grid`` and carry
    derivative samples up to order 4, so the agreement conditions can be
    checked without numerical differentiation.
    """
    if not out_grid.spans(dom):
        raise InvalidArgumentError("output grid does not span the domain")
    g1, g2 = out_grid.g1, out_grid.g2
    Z = nc.corner
    phi = []
    for i1 in range(4):
        jet = taylor_jet(Z[i1, :], g2.nodes) + nc.edge_x2[i1].remainder_jet(g2, 0)
        phi.append(BoundaryFunction(2, grid=g2, jet=jet))
    psi = []
    for i2 in range(4):
        jet = taylor_jet(Z[:, i2], g1.nodes - dom.h1) + nc.edge_x1[i2].remainder_jet(g1, len(g1) - 1)
        psi.append(BoundaryFunction(1, grid=g1, jet=jet))
    return ClassicalData(tuple(phi), tuple(psi))


def sample_classical_from_field(u, dom, grid=None):
    """Classical data read off a field ``u(x1, x2)`` by exact differentiation.

    Without ``grid`` the eight functions are analytic; with a grid they are
    sampled on its axes together with exact derivative samples up to order 4.
    """
    u = ex.as_expr(u)
    if ex.contains_step(u):
        raise UnsupportedDerivativeError("field contains step and cannot be differentiated")
    if not ex.variables(u) <= {"x1", "x2"}:
        raise InvalidArgumentError("field may only depend on x1 and x2")
    phi = [ex.substitute(ex.derive_n(u, "x1", k), "x1", dom.h1) for k in range(4)]
    psi = [ex.substitute(ex.derive_n(u, "x2", k), "x2", 0.0) for k in range(4)]
    phi = [BoundaryFunction.analytic(e, 2) for e in phi]
    psi = [BoundaryFunction.analytic(e, 1) for e in psi]
    if grid is not None:
        phi = [_sample(f, grid.g2) for f in phi]
        psi = [_sample(f, grid.g1) for f in psi]
    return ClassicalData(tuple(phi), tuple(psi))


def _sample(f, g):
    return BoundaryFunction(f.axis, grid=g, jet=np.vstack([f.derivative(k, g) for k in range(5)]))

