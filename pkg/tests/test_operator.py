import numpy as np
import pytest

from pseudoparabolic import expr as ex
from pseudoparabolic.boundary import NonClassicalData
from pseudoparabolic.errors import InvalidArgumentError
from pseudoparabolic.grid import Domain, GridFunction2D, make_tensor_grid
from pseudoparabolic.pde_operator import (
    INDEX_PAIRS,
    CoefficientSet,
    Jet,
    Problem,
    apply_operator,
    eval_coefficient,
    lp_norm,
    operator_on_grid,
    residual,
)
from pseudoparabolic.verification import exact_jet

DOM = Domain(1.0, 1.0)
GRID = make_tensor_grid(DOM, 9)


def test_eval_coefficient():
    assert eval_coefficient(ex.parse("2"), 0.3, 0.9) == 2
    assert eval_coefficient(ex.parse("step(x1 - 0.5)"), 0.75, 0.1) == 1
    gf = GridFunction2D(GRID, np.ones(GRID.shape))
    assert eval_coefficient(gf, 0.125, 0.5) == 1
    with pytest.raises(InvalidArgumentError):
        eval_coefficient(gf, 0.1, 0.5)


def test_coefficient_set_rules():
    cs = CoefficientSet({"0,0": "1", (3, 4): "x1", "2, 1": 2.5})
    assert sorted(cs) == [(0, 0), (2, 1), (3, 4)]
    with pytest.raises(InvalidArgumentError):
        CoefficientSet({"4,4": "1"})
    with pytest.raises(InvalidArgumentError):
        CoefficientSet({(5, 0): "1"})
    with pytest.raises(InvalidArgumentError):
        CoefficientSet({(0, 0): "t"})
    assert len(INDEX_PAIRS) == 24


def test_zero_jet():
    cs = CoefficientSet({k: "1 + x1*x2" for k in INDEX_PAIRS})
    assert apply_operator(Jet.zeros(GRID), cs, (3, 4)) == 0


def test_constant_jet():
    d = np.zeros((5, 5) + GRID.shape)
    d[0, 0] = 1
    jet = Jet(GRID, d)
    cs = CoefficientSet({(0, 0): "3"})
    for node in [(0, 0), (4, 7), (8, 8)]:
        assert apply_operator(jet, cs, node) == 3


def test_leading_term_only():
    jet = exact_jet(ex.parse("x1^4*x2^4/576"), GRID)
    for i in range(9):
        for j in range(9):
            assert apply_operator(jet, CoefficientSet(), (i, j)) == pytest.approx(1.0, rel=1e-14)


def test_node_out_of_range():
    with pytest.raises(InvalidArgumentError):
        apply_operator(Jet.zeros(GRID), CoefficientSet(), (9, 0))


def test_linearity(rng):
    cs = CoefficientSet({k: f"{rng.uniform(-2, 2)!r} + step(x1 - 0.5)*x2" for k in INDEX_PAIRS})
    for _ in range(5):
        j1 = Jet(GRID, rng.normal(size=(5, 5) + GRID.shape))
        j2 = Jet(GRID, rng.normal(size=(5, 5) + GRID.shape))
        a, b = rng.normal(size=2)
        combo = a * j1 + b * j2
        for node in [(0, 0), (3, 5), (8, 2)]:
            lhs = apply_operator(combo, cs, node)
            rhs = a * apply_operator(j1, cs, node) + b * apply_operator(j2, cs, node)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


def test_vectorized_matches_pointwise(rng):
    cs = CoefficientSet({(1, 3): "cos(x1)", (4, 0): "step(x2 - 0.25)", (0, 2): "x1*x2"})
    jet = Jet(GRID, rng.normal(size=(5, 5) + GRID.shape))
    grid_vals = operator_on_grid(jet, cs)
    for i in range(0, 9, 2):
        for j in range(0, 9, 3):
            assert grid_vals[i, j] == pytest.approx(apply_operator(jet, cs, (i, j)), rel=1e-14)


class TestResidual:
    def test_zero(self):
        prob = Problem(DOM, CoefficientSet(), "0", NonClassicalData.zero())
        r, sup, l2 = residual(Jet.zeros(GRID), prob)
        assert sup == 0 and l2 == 0
        np.testing.assert_array_equal(r.values, 0)

    def test_unit_rhs(self):
        prob = Problem(DOM, CoefficientSet(), "1", NonClassicalData.zero())
        r, sup, l2 = residual(Jet.zeros(GRID), prob)
        np.testing.assert_array_equal(r.values, -1)
        assert sup == 1
        assert l2 == pytest.approx(1.0, rel=1e-14)  # area of the unit square

    def test_exact_jet(self):
        u = ex.parse("sin(x1)*x2^5 + x1^6")
        cs = CoefficientSet({(0, 0): "1 + step(x1 - 0.5)", (3, 4): "x2"})
        rhs = ex.add(ex.derive_n(ex.derive_n(u, "x1", 4), "x2", 4),
                     ex.add(ex.mul(cs[0, 0], u),
                            ex.mul(cs[3, 4], ex.derive_n(ex.derive_n(u, "x1", 3), "x2", 4))))
        prob = Problem(DOM, cs, rhs, NonClassicalData.zero())
        _, sup, _ = residual(exact_jet(u, GRID), prob)
        assert sup <= 1e-12

    def test_grid_mismatch(self):
        prob = Problem(Domain(2.0, 1.0), CoefficientSet(), "0", NonClassicalData.zero())
        with pytest.raises(InvalidArgumentError):
            residual(Jet.zeros(GRID), prob)

    def test_lp_norms(self):
        vals = np.ones(GRID.shape) * 2
        assert lp_norm(vals, GRID, 1) == pytest.approx(2.0)
        assert lp_norm(vals, GRID, np.inf) == 2.0
        with pytest.raises(InvalidArgumentError):
            lp_norm(vals, GRID, 0.5)
