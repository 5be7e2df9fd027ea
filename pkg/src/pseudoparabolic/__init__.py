"""Contact-boundary problems for the (4,4)-order pseudoparabolic equation.

Boundary data handling (classical edge functions vs. corner values plus
edge traces), a 2-D Volterra-equation solver, and a verification harness.
"""
from .boundary import (
    BoundaryFunction,
    ClassicalData,
    NonClassicalData,
    check_agreement,
    classical_to_nonclassical,
    nonclassical_to_classical,
    sample_classical_from_field,
)
from .expr import parse
from .grid import Domain, make_tensor_grid
from .pde_operator import CoefficientSet, Problem, residual
from .verification import MmsCase, convergence_study, equivalence_check, manufacture
from .volterra import SolverOptions, solve

__version__ = "0.1.0"
