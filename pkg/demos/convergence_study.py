"""
Manufactured solutions and observed order
=========================================

Pick u, generate the right-hand side and boundary data from it, solve,
and compare.  Cubics (per variable) are reproduced to round-off since the
trapezoid remainders vanish; smooth fields converge at second order.
"""
from pseudoparabolic import expr as ex
from pseudoparabolic.verification import MmsCase, convergence_study, format_table

cubic = MmsCase(ex.parse("x1^3*x2^2 - x1*x2^3"),
                {(0, 0): "1 + step(x1 - 0.5)", (2, 1): "x2", (1, 4): "0.25"})
print(format_table(convergence_study(cubic, [9, 17, 33])))
print()

smooth = MmsCase(ex.parse("sin(x1)*sin(x2)"), {(0, 0): "1"})
rows = convergence_study(smooth, [17, 33, 65, 129])
print(format_table(rows))
