"""A unimodular symbol whose operator is still not a partial isometry.

conj(z1) * b_{1/2}(z1) has modulus one on the torus, but both an analytic and
a co-analytic factor live in the same variable. The corner residual settles
near 0.216 and stays there as the outer box grows.
"""

from polydisc_toeplitz import (
    Blaschke, Conj, Monomial, check_partial_isometry, check_unimodular, classify_variables,
    parse_gaussian,
)

phi = Conj(Monomial((1,))) * Blaschke(1, 1, parse_gaussian("1/2"))
print("unimodular:", check_unimodular(phi).verdict)
print("variable tags:", classify_variables(phi).tags)

for D in (16, 32, 64):
    r = check_partial_isometry(phi, (3,), (D,))
    print(f"D={D:2d}  residual={r.residual:.10f}  leakage<={r.leakage_bound:.1e}  {r.verdict}")
