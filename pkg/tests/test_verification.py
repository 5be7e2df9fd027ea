import numpy as np
import pytest

from pseudoparabolic import expr as ex
from pseudoparabolic.boundary import NonClassicalData, check_agreement, nonclassical_to_classical
from pseudoparabolic.errors import InvalidArgumentError, UnsupportedDerivativeError
from pseudoparabolic.grid import Domain, GridFunction2D, make_tensor_grid
from pseudoparabolic.pde_operator import CoefficientSet, Problem
from pseudoparabolic.verification import (
    ConvergenceRow,
    MmsCase,
    boundary_reproduction,
    convergence_study,
    equivalence_check,
    exact_jet,
    format_table,
    manufacture,
    observed_orders,
    rows_to_csv,
)
from pseudoparabolic.volterra import SolverOptions, solve

DOM = Domain(1.0, 1.0)


class TestManufacture:
    def test_leading_monomial(self):
        grid = make_tensor_grid(DOM, 9)
        prob, exact = manufacture(MmsCase(ex.parse("x1^4*x2^4/576")), grid)
        assert ex.evaluate(prob.rhs, 0.3, 0.7) == pytest.approx(1.0, rel=1e-15)
        np.testing.assert_allclose(exact.d[4, 4], 1.0, rtol=1e-15)

    def test_zero_solution(self):
        grid = make_tensor_grid(DOM, 9)
        prob, exact = manufacture(MmsCase(ex.parse("0"), {(1, 2): "x1"}), grid)
        assert ex.evaluate(prob.rhs, 0.5, 0.5) == 0
        assert not np.any(prob.data.corner) and not np.any(exact.d)

    def test_data_agrees_and_matches_field(self):
        u = ex.parse("sin(x1 + 0.3)*exp(x2) + x1^2*x2^5")
        grid = make_tensor_grid(DOM, 9)
        prob, exact = manufacture(MmsCase(u, {(0, 0): "1"}), grid)
        Z = prob.data.corner
        for i1 in range(4):
            for i2 in range(4):
                assert Z[i1, i2] == pytest.approx(exact.d[i1, i2, -1, 0], abs=1e-13)
        assert max(boundary_reproduction(exact, prob.data, DOM).values()) <= 1e-12

    def test_sampled_coefficient_gives_sampled_rhs(self):
        grid = make_tensor_grid(DOM, 9)
        a = GridFunction2D(grid, np.full(grid.shape, 2.0))
        prob, exact = manufacture(MmsCase(ex.parse("x1*x2"), {(1, 1): a}), grid)
        assert isinstance(prob.rhs, GridFunction2D)
        np.testing.assert_allclose(prob.rhs.values, 2.0)

    def test_step_solution_rejected(self):
        with pytest.raises(UnsupportedDerivativeError):
            MmsCase(ex.parse("step(x1 - 0.5)"))


class TestObservedOrders:
    def test_halving(self):
        orders = observed_orders([4e-4, 1e-4, 2.5e-5], [0.1, 0.05, 0.025])
        assert orders[0] is None
        assert orders[1] == pytest.approx(2.0) and orders[2] == pytest.approx(2.0)

    def test_below_floor(self):
        assert observed_orders([1e-12, 1e-13, 1e-14], [0.1, 0.05, 0.025]) == [None] * 3


class TestConvergenceStudy:
    def test_cubic_is_exact(self):
        case = MmsCase(ex.parse("x1^3*x2^3 + x1*x2^2"), {(0, 0): "1", (2, 3): "x1"})
        rows = convergence_study(case, [9, 17, 33])
        assert all(r.sup_error <= 1e-9 for r in rows)
        assert all(r.order is None for r in rows)

    def test_smooth_second_order(self):
        case = MmsCase(ex.parse("sin(x1)*sin(x2)"), {(0, 0): "1"})
        rows = convergence_study(case, [17, 33, 65])
        assert rows[-1].order >= 1.9
        assert rows[0].sup_error > rows[1].sup_error > rows[2].sup_error

    @pytest.mark.parametrize("sizes", [[17], [17, 33], [33, 17, 65], [17, 17, 33]])
    def test_bad_sizes(self, sizes):
        with pytest.raises(InvalidArgumentError):
            convergence_study(MmsCase(ex.parse("x1")), sizes)

    def test_failure_names_the_size(self):
        # pivot 1 - 8 h / 2 vanishes for h = 1/4 at the first interior row
        case = MmsCase(ex.parse("x1*x2"), {(3, 4): "8"})
        with pytest.raises(RuntimeError) as info:
            convergence_study(case, [5, 9, 17])
        assert info.value.size == 5

    def test_csv_and_table(self):
        rows = [ConvergenceRow(17, 17, 1 / 16, 1e-6, 5e-7, None),
                ConvergenceRow(33, 33, 1 / 32, 2.5e-7, 1.25e-7, 2.0)]
        text = rows_to_csv(rows)
        assert text.splitlines()[0] == "size,sup_err,l2_err,order"
        assert text.splitlines()[1].endswith(",")
        assert "2.000" in format_table(rows)


class TestEquivalence:
    def test_zero_problem(self):
        grid = make_tensor_grid(DOM, 9)
        prob = Problem(DOM, CoefficientSet(), "0", NonClassicalData.zero())
        jet, _ = solve(prob, grid)
        rep = equivalence_check(prob, jet, 1e-12)
        assert rep.passed and rep.max_deviation == 0

    def test_random_data_no_coefficients(self, rng):
        grid = make_tensor_grid(DOM, 17)
        for _ in range(5):
            corner = rng.uniform(-1, 1, size=(4, 4))
            e1 = tuple(f"{rng.uniform(-1, 1)!r}*cos(t)" for _ in range(4))
            e2 = tuple(f"{rng.uniform(-1, 1)!r} + step(t - 0.5)" for _ in range(4))
            prob = Problem(DOM, CoefficientSet(), "0", NonClassicalData(corner, e1, e2))
            jet, _ = solve(prob, grid)
            rep = equivalence_check(prob, jet, 1e-10)
            assert rep.passed, rep.deviations
            assert rep.agreement.passed

    def test_detects_wrong_traces(self):
        grid = make_tensor_grid(DOM, 9)
        prob, exact = manufacture(MmsCase(ex.parse("x1*x2^2")), grid)
        d = np.array(exact.d)
        d[0, 0, -1, 3] += 1e-3
        bad = type(exact)(grid, d)
        rep = equivalence_check(prob, bad, 1e-8)
        assert not rep.passed
        assert rep.deviations["phi1"] == pytest.approx(1e-3, rel=1e-9)

    def test_exact_jet_passes_agreement(self):
        grid = make_tensor_grid(DOM, 9)
        prob, exact = manufacture(MmsCase(ex.parse("cos(x1)*x2^4")), grid)
        rep = equivalence_check(prob, exact, 1e-12)
        assert rep.passed
        assert check_agreement(nonclassical_to_classical(prob.data, DOM, grid), DOM.h1).passed


def test_exact_jet_shape():
    grid = make_tensor_grid(DOM, 5, 7)
    jet = exact_jet(ex.parse("x1^2*x2"), grid)
    assert jet.d.shape == (5, 5, 5, 7)
    np.testing.assert_allclose(jet.d[2, 1], 2.0)
    assert not np.any(jet.d[3:])


def test_picard_and_marching_agree_on_manufactured_problem():
    grid = make_tensor_grid(DOM, 17)
    case = MmsCase(ex.parse("sin(x1)*cos(x2)"), {(0, 0): "1", (1, 2): "x2", (4, 1): "0.5"})
    prob, _ = manufacture(case, grid)
    jm, _ = solve(prob, grid, SolverOptions("marching"))
    jp, _ = solve(prob, grid, SolverOptions("picard", tol=1e-13))
    assert np.max(np.abs(jm.d - jp.d)) <= 1e-11
