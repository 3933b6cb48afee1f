"""Factor conj(b_{1/2}(z1)) * b_{1/3}(z2) and watch its compressions behave.

The symbol is unimodular with disjoint analytic and co-analytic variables,
so the operator is a partial isometry. On a finite box we can only see this
up to truncation, and the report says how much truncation could hide.
"""

from polydisc_toeplitz import (
    Blaschke, Conj, check_partial_isometry, check_power_partial_isometry, factorize,
    parse_gaussian,
)

phi = Conj(Blaschke(2, 1, parse_gaussian("1/2"))) * Blaschke(2, 2, parse_gaussian("1/3"))

fac = factorize(phi)
print("factors:", fac.to_json()["phi1"]["expr"], fac.to_json()["phi2"]["expr"])

for D in (16, 24, 32):
    r = check_partial_isometry(phi, (3, 3), (D, D))
    print(f"D={D:2d}  residual={r.residual:.2e}  leakage<={r.leakage_bound:.2e}  {r.verdict}")

# powers of a partial isometry need not be partial isometries, but these are
for r in check_power_partial_isometry(phi, 3, (3, 3), (32, 32)):
    print(f"power {r.details['power']}: residual={r.residual:.2e} {r.verdict}")
