"""Split compressions into a unitary part and truncated shifts.

T_{conj(z1) z2} on the (2,2) box is a partial permutation of the nine
monomials. Its chains have lengths 1, 1, 2, 2 and 3, and the decomposition
recovers exactly that without looking at the permutation.
"""

import numpy as np

from polydisc_toeplitz import Conj, DegreeBox, Monomial, compression, hw_decompose

for name, phi, box in [
    ("z1 on d=3", Monomial((1,)), (3,)),
    ("conj(z1) z2 on d=(2,2)", Conj(Monomial((1, 0))) * Monomial((0, 1)), (2, 2)),
]:
    h = hw_decompose(compression(phi, DegreeBox(box)).M)
    print(f"{name}: unitary_dim={h.unitary_dim} blocks={h.blocks} "
          f"model_residual={h.model_residual:.1e}")

# the same structure survives an arbitrary unitary change of basis
rng = np.random.default_rng(0)
Q, _ = np.linalg.qr(rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)))
V = compression(Conj(Monomial((1, 0))) * Monomial((0, 1)), DegreeBox((2, 2))).M
print("rotated:", hw_decompose(Q @ V @ Q.conj().T).blocks)
