"""
Classical <-> non-classical boundary data
=========================================

The non-classical form keeps the 16 corner values plus the top-order
derivatives along each edge.  It has no agreement conditions: any corner
table and any integrable edge traces rebuild consistent classical data.
"""
import numpy as np

from pseudoparabolic.boundary import (
    NonClassicalData,
    check_agreement,
    classical_to_nonclassical,
    nonclassical_to_classical,
    sample_classical_from_field,
)
from pseudoparabolic.grid import Domain, make_tensor_grid
from pseudoparabolic import expr as ex

dom = Domain(1.0, 2.0)
grid = make_tensor_grid(dom, 65)

cd = sample_classical_from_field(ex.parse("sin(x1 + x2) + x1^2*x2^3"), dom)
nc = classical_to_nonclassical(cd, dom.h1)
np.set_printoptions(precision=4, suppress=True)
print("corner table Z[i1, i2]:")
print(nc.corner)
print("edge trace along x2 = 0, i2 = 0:", nc.edge_x1[0])

back = nonclassical_to_classical(nc, dom, grid)
err = max(np.max(np.abs(a.values(grid.g2) - b.values(grid.g2))) for a, b in zip(cd.phi, back.phi))
print(f"round trip, worst phi error on 65 nodes: {err:.2e}")

# arbitrary data, jumps included, still gives consistent classical data
rng = np.random.default_rng(7)
wild = NonClassicalData(rng.normal(size=(4, 4)),
                        ("step(t - 0.4)", "t", "0", "cos(5*t)"),
                        ("1", "step(t - 1.5)*t", "exp(-t)", "0"))
print("reconstruction passes:", check_agreement(nonclassical_to_classical(wild, dom, grid), dom.h1).passed)
