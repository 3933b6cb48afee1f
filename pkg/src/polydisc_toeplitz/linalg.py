"""Dense complex linear algebra used by the checkers.

Matrices are plain 2-D ``complex128`` numpy arrays. Rank decisions always
take an explicit ``rank_tol``; nothing here hides a default cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionMismatch, InvalidInput

__all__ = [
    "Subspace",
    "as_matrix",
    "hermitian_min_eig",
    "hermitian_min_eigpair",
    "operator_norm",
    "orthonormalize",
    "subspace_intersect",
    "null_space",
    "matrix_to_json",
    "matrix_from_json",
    "DEFAULT_RANK_TOL",
]

DEFAULT_RANK_TOL = 1e-8


def as_matrix(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or min(A.shape) < 1:
        raise InvalidInput(f"expected a nonempty 2-D matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInput("matrix has non-finite entries")
    return A


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis (columns) of a subspace of C^ambient_dim."""

    ambient_dim: int
    basis: np.ndarray
    rank_tol: float

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def complement(self) -> "Subspace":
        """Orthogonal complement in the ambient space."""
        if self.rank == 0:
            return Subspace(self.ambient_dim, np.eye(self.ambient_dim, dtype=complex), self.rank_tol)
        if self.rank == self.ambient_dim:
            return Subspace(self.ambient_dim, np.zeros((self.ambient_dim, 0), complex), self.rank_tol)
        q, _ = np.linalg.qr(self.basis, mode="complete")
        return Subspace(self.ambient_dim, q[:, self.rank:], self.rank_tol)

    @classmethod
    def full(cls, dim: int, rank_tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        return cls(dim, np.eye(dim, dtype=complex), rank_tol)

    @classmethod
    def empty(cls, dim: int, rank_tol: float = DEFAULT_RANK_TOL) -> "Subspace":
        return cls(dim, np.zeros((dim, 0), dtype=complex), rank_tol)


def _hermitian_check(M, herm_tol):
    M = as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise InvalidInput("matrix must be square")
    if np.linalg.norm(M - M.conj().T, 2) > herm_tol:
        raise InvalidInput("matrix is not Hermitian within tolerance")
    return M


def hermitian_min_eig(M, tol: float = 1e-12, herm_tol: float = 1e-10) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Dense ``eigh`` is backward stable, so the error is O(eps * ||M||), far
    inside any ``tol`` this package uses at desk scale.
    """
    return hermitian_min_eigpair(M, tol, herm_tol)[0]


def hermitian_min_eigpair(M, tol: float = 1e-12, herm_tol: float = 1e-10):
    """``(lambda_min, unit eigenvector)`` for a Hermitian matrix."""
    M = _hermitian_check(M, herm_tol)
    H = 0.5 * (M + M.conj().T)
    try:
        w, v = scipy.linalg.eigh(H, subset_by_index=[0, 0])
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise InvalidInput(f"eigensolver failed: {exc}") from exc
    return float(w[0]), v[:, 0]


def operator_norm(M, tol: float = 1e-12) -> float:
    """Largest singular value (dense SVD)."""
    M = as_matrix(M)
    return float(np.linalg.norm(M, 2))


def orthonormalize(vectors, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Orthonormal basis of the column span by Gram-Schmidt with reorthogonalization.

    A column whose residual norm after projection onto the previously kept
    columns is ``<= rank_tol`` is discarded.
    """
    if rank_tol <= 0:
        raise InvalidInput("rank_tol must be positive")
    V = np.asarray(vectors, dtype=complex)
    if V.ndim == 1:
        V = V[:, None]
    dim = V.shape[0]
    kept: list[np.ndarray] = []
    for j in range(V.shape[1]):
        v = V[:, j].copy()
        for _ in range(2):  # twice is enough
            for q in kept:
                v -= q * np.vdot(q, v)
        nrm = np.linalg.norm(v)
        if nrm > rank_tol:
            kept.append(v / nrm)
    basis = np.column_stack(kept) if kept else np.zeros((dim, 0), dtype=complex)
    return Subspace(dim, basis, rank_tol)


def subspace_intersect(A: Subspace, B: Subspace, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Numerical intersection via principal angles.

    The singular values of ``A.basis^* B.basis`` are the cosines of the
    principal angles (and the nonzero singular values of P_A P_B); directions
    with cosine ``>= 1 - rank_tol`` span the intersection.
    """
    if A.ambient_dim != B.ambient_dim:
        raise DimensionMismatch("subspaces live in different ambient spaces")
    dim = A.ambient_dim
    if A.rank == 0 or B.rank == 0:
        return Subspace.empty(dim, rank_tol)
    U, s, _ = np.linalg.svd(A.basis.conj().T @ B.basis)
    keep = s >= 1 - rank_tol
    basis = A.basis @ U[:, : len(s)][:, keep]
    # re-orthonormalize to wash out rounding in the rotated basis
    return orthonormalize(basis, rank_tol) if basis.shape[1] else Subspace.empty(dim, rank_tol)


def null_space(M, rank_tol: float = DEFAULT_RANK_TOL) -> Subspace:
    """Right singular vectors of ``M`` with singular value ``<= rank_tol``."""
    M = np.asarray(M, dtype=complex)
    _, s, vh = np.linalg.svd(M)
    s_full = np.zeros(vh.shape[0])
    s_full[: len(s)] = s
    return Subspace(M.shape[1], vh[s_full <= rank_tol].conj().T.copy(), rank_tol)


def matrix_to_json(M) -> dict:
    """``{"rows": r, "cols": c, "entries": [[re, im], ...]}`` in row-major order."""
    A = as_matrix(M)
    flat = A.reshape(-1)
    return {
        "rows": int(A.shape[0]),
        "cols": int(A.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_json(obj) -> np.ndarray:
    try:
        r, c, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidInput("matrix JSON needs rows, cols and entries") from exc
    if r < 1 or c < 1 or len(entries) != r * c:
        raise InvalidInput(f"matrix JSON has {len(entries)} entries, expected {r}x{c}")
    try:
        arr = np.array([complex(float(re), float(im)) for re, im in entries], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InvalidInput("matrix entries must be [re, im] pairs") from exc
    return as_matrix(arr.reshape(r, c))

