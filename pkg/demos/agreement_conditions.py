"""
Corner agreement conditions
===========================

Classical edge data on x1 = h1 and x2 = 0 must fit together at the
shared corner (h1, 0): sixteen derivative equalities.  Data read off a
smooth field always fits; nudging one function breaks exactly one of them.
"""
from pseudoparabolic import expr as ex
from pseudoparabolic.boundary import ClassicalData, check_agreement, sample_classical_from_field
from pseudoparabolic.grid import Domain

dom = Domain(1.0, 1.0)
u = ex.parse("exp(x1)*cos(2*x2) + x1^3*x2")

# phi_k = D1^(k-1) u on x1 = h1, psi_k = D2^(k-1) u on x2 = 0
cd = sample_classical_from_field(u, dom)
for k, f in enumerate(cd.phi, 1):
    print(f"phi{k}(x2) =", ex.to_string(f.expr))

report = check_agreement(cd, dom.h1)
print(report.to_text())

# add 1e-4 * t^2 / 2 to phi2: only phi2''(0) changes, which is condition 4*1 + 2 + 1 = 7
phi = list(cd.phi)
phi[1] = ex.add(phi[1].expr, ex.monomial("t", 2, 1e-4))
bad = check_agreement(ClassicalData(tuple(phi), cd.psi), dom.h1)
for r in bad.failures:
    print(f"violated: #{r.index} {r.label}  residual {r.residual:.3e}")
