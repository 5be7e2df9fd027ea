"""
Solving with a jump in the coefficient
======================================

a_00 = 1 + step(x1 - 0.5) doubles across x1 = 0.5.  Coefficients only
need to be bounded, so the Volterra solvers take this without special
treatment.  Both solvers should give the same jet.
"""
import numpy as np

from pseudoparabolic.boundary import NonClassicalData
from pseudoparabolic.grid import Domain, make_tensor_grid
from pseudoparabolic.pde_operator import CoefficientSet, Problem, residual
from pseudoparabolic.verification import boundary_reproduction, equivalence_check
from pseudoparabolic.volterra import SolverOptions, solve

dom = Domain(1.0, 1.0)
grid = make_tensor_grid(dom, 33)   # 0.5 is a node
coeffs = CoefficientSet({(0, 0): "1 + step(x1 - 0.5)", (3, 2): "-0.5*x2"})
corner = np.zeros((4, 4))
corner[0, 0] = 1.0
data = NonClassicalData(corner, ("0", "1", "0", "0"), ("step(t - 0.25)", "0", "0", "0"))
prob = Problem(dom, coeffs, "exp(-x1*x2)", data)

jm, sm = solve(prob, grid, SolverOptions("marching"))
jp, sp = solve(prob, grid, SolverOptions("picard", tol=1e-12))
print(f"marching: fixed-point residual {sm.residual_norm:.1e}, {1e3 * sm.wall_time:.1f} ms")
print(f"picard:   {sp.iterations} sweeps, last update {sp.update_norm:.1e}")
print(f"max |marching - picard| over the jet: {np.max(np.abs(jm.d - jp.d)):.2e}")

_, sup, l2 = residual(jm, prob)
print(f"equation residual: sup {sup:.1e}, L2 {l2:.1e}")
print("boundary reproduction:", boundary_reproduction(jm, data, dom))
print("equivalence check passes:", equivalence_check(prob, jm, 1e-8).passed)

# u across the jump, along x2 = 0.5
print("u(x1, 0.5):", np.round(jm[0, 0].values[::4, 16], 6))
