"""Structure of partially isometric Toeplitz operators.

* :func:`classify_variables` tags each variable as absent, analytic,
  co-analytic or mixed from the coefficient support of the symbol.
* :func:`factorize` writes a partial-isometry symbol as
  ``scalar * conj(phi1) * phi2`` with inner ``phi1``, ``phi2`` in disjoint
  variables.
* :func:`hw_decompose` splits a finite power partial isometry into a
  unitary part and a direct sum of truncated shifts.
* :func:`classify_operator` combines the three into a shift / co-shift /
  truncated-shift-sum verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .checkers import (
    DEFAULT_EPS, DEFAULT_TOL_FAIL, DEFAULT_TOL_PASS, FAIL, INCONCLUSIVE, check_partial_isometry,
    check_unimodular,
)
from .errors import ChainOrthogonalityError, InvalidInput, NotPartialIsometry, PreconditionError
from .gaussian import ONE, GaussianRational
from .laurent import LaurentPoly
from .linalg import (
    DEFAULT_RANK_TOL, Subspace, as_matrix, matrix_to_json, null_space, orthonormalize,
    subspace_intersect,
)
from .series import working_series
from .symbol import (
    Blaschke, Conj, Constant, Laurent, Monomial, Product, Sum, Symbol, format_value, is_exact,
    symbol_hash, symbol_to_json, to_laurent, variables,
)
from .toeplitz import DegreeBox, compression

__all__ = [
    "ABSENT", "ANALYTIC", "COANALYTIC", "MIXED",
    "VariableClassification", "classify_variables",
    "FactorizationResult", "factorize",
    "HWDecomposition", "hw_decompose",
    "Classification", "classify_operator", "canonical_model",
    "SHIFT", "CO_SHIFT", "TRUNCATED_SHIFT_SUM", "NOT_PARTIAL_ISOMETRY", "UNITARY_SCALAR",
]

ABSENT, ANALYTIC, COANALYTIC, MIXED = "ABSENT", "ANALYTIC", "COANALYTIC", "MIXED"
SHIFT, CO_SHIFT, TRUNCATED_SHIFT_SUM = "SHIFT", "CO_SHIFT", "TRUNCATED_SHIFT_SUM"
NOT_PARTIAL_ISOMETRY, UNITARY_SCALAR = "NOT_PARTIAL_ISOMETRY", "UNITARY_SCALAR"
DEFAULT_MODEL_TOL = 1e-8


# ---------------------------------------------------------------- variables

@dataclass(frozen=True)
class VariableClassification:
    """Per-variable tags with witness multi-indices.

    ``witnesses[i]`` is ``{"pos": k or None, "neg": k or None}``: a
    multi-index with a nonzero coefficient and positive (negative) exponent
    in variable i + 1.
    """

    tags: tuple
    witnesses: tuple

    def __post_init__(self):
        for t, w in zip(self.tags, self.witnesses):
            if t == MIXED and (w["pos"] is None or w["neg"] is None):
                raise AssertionError("MIXED needs both witnesses")

    def vars_with(self, *tags) -> frozenset:
        return frozenset(i + 1 for i, t in enumerate(self.tags) if t in tags)

    def depends(self) -> frozenset:
        return self.vars_with(ANALYTIC, COANALYTIC, MIXED)

    @property
    def has_mixed(self) -> bool:
        return MIXED in self.tags

    def to_json(self) -> dict:
        return {"tags": {str(i + 1): t for i, t in enumerate(self.tags)},
                "witnesses": {str(i + 1): w for i, w in enumerate(self.witnesses)}}


def _tag(pos, neg):
    if pos is not None and neg is not None:
        return MIXED
    if pos is not None:
        return ANALYTIC
    if neg is not None:
        return COANALYTIC
    return ABSENT


def classify_variables(phi: Symbol, eps: float = DEFAULT_EPS) -> VariableClassification:
    """Which of z_i and conj(z_i) each variable of ``phi`` depends on.

    Exact symbols use the exact coefficient support. Otherwise a coefficient
    counts only if its stored magnitude exceeds ``eps`` plus the series error
    bound, which certifies the true coefficient is nonzero.
    """
    n = phi.n
    pos, neg = [None] * n, [None] * n
    if is_exact(phi):
        for k in to_laurent(phi).support():
            for i, e in enumerate(k):
                if e > 0 and pos[i] is None:
                    pos[i] = list(k)
                if e < 0 and neg[i] is None:
                    neg[i] = list(k)
    else:
        w = working_series(phi, eps)
        mag = np.abs(w.coeffs)
        keep = mag > eps + w.tail_bound
        grids = np.stack(np.meshgrid(*[np.arange(l, u + 1) for l, u in zip(w.lower, w.upper)],
                                     indexing="ij"), axis=-1)
        for i in range(n):
            for sign, store in ((1, pos), (-1, neg)):
                mask = keep & (sign * grids[..., i] > 0)
                if mask.any():
                    # largest certified coefficient as witness
                    idx = np.unravel_index(int(np.argmax(np.where(mask, mag, -1.0))), mag.shape)
                    store[i] = [int(x) for x in grids[idx]]
    tags = tuple(_tag(p, q) for p, q in zip(pos, neg))
    wit = tuple({"pos": p, "neg": q} for p, q in zip(pos, neg))
    return VariableClassification(tags, wit)


# ---------------------------------------------------------------- factorization

@dataclass(frozen=True)
class FactorizationResult:
    """``phi = unimodular_scalar * conj(phi1) * phi2`` with phi1, phi2 inner."""

    phi1: Symbol
    phi2: Symbol
    unimodular_scalar: object
    path: str

    def reconstruct(self) -> Symbol:
        return Product((Constant(self.phi1.n, self.unimodular_scalar), Conj(self.phi1), self.phi2))

    def to_json(self) -> dict:
        return {"phi1": symbol_to_json(self.phi1), "phi2": symbol_to_json(self.phi2),
                "unimodular_scalar": format_value(self.unimodular_scalar), "path": self.path}


def _is_constant(s: Symbol) -> bool:
    if isinstance(s, Constant):
        return True
    if is_exact(s):
        p = to_laurent(s)
        return all(not any(k) for k in p.support())
    return not variables(s)


def _flatten(s: Symbol, conj: bool, out: list):
    """Flatten a product tree into (conjugated?, leaf) pairs; None on unsupported nodes."""
    if isinstance(s, Conj):
        return _flatten(s.arg, not conj, out)
    if isinstance(s, Product):
        return all(_flatten(f, conj, out) for f in s.factors)
    if isinstance(s, (Constant, Monomial, Blaschke)):
        out.append((conj, s))
        return True
    if isinstance(s, Laurent) and s.poly.is_monomial():
        (k, c), = s.poly.terms
        out.append((conj, Constant(s.n, c)))
        out.append((conj, Monomial(k)))
        return True
    return False


def _scalar_product(values):
    exact = all(isinstance(v, GaussianRational) for v in values)
    if exact:
        out = ONE
        for v in values:
            out = out * v
        return out
    out = 1 + 0j
    for v in values:
        out *= complex(v)
    return out


def _product_symbol(n, factors) -> Symbol:
    if not factors:
        return Constant(n, ONE)
    return factors[0] if len(factors) == 1 else Product(tuple(factors))


def _structured_split(phi: Symbol):
    leaves = []
    if not _flatten(phi, False, leaves):
        return None
    n = phi.n
    scalars, c_part, a_part = [], [], []
    net = [0] * n
    for conj, leaf in leaves:
        if isinstance(leaf, Constant):
            v = leaf.value
            scalars.append(v.conjugate() if conj else v)
        elif isinstance(leaf, Monomial):
            for i, e in enumerate(leaf.k):
                net[i] += -e if conj else e
        else:  # Blaschke
            (c_part if conj else a_part).append(leaf)
    up = tuple(max(e, 0) for e in net)
    down = tuple(max(-e, 0) for e in net)
    if any(up):
        a_part.insert(0, Monomial(up))
    if any(down):
        c_part.insert(0, Monomial(down))
    phi1 = _product_symbol(n, c_part)
    phi2 = _product_symbol(n, a_part)
    return phi1, phi2, _scalar_product(scalars)


def _poly_symbol(p: LaurentPoly) -> Symbol:
    if p.is_monomial():
        (k, c), = p.terms
        if c == ONE:
            return Monomial(k) if any(k) else Constant(p.n, ONE)
    return Laurent(p)


def _coefficient_split(phi: Symbol, cls: VariableClassification):
    p = to_laurent(phi)
    n = p.n
    C = sorted(i - 1 for i in cls.vars_with(COANALYTIC))
    slices: dict = {}
    for k, c in p.terms:
        kc = tuple(-k[i] if i in C else 0 for i in range(n))
        ka = tuple(0 if i in C else k[i] for i in range(n))
        slices.setdefault(kc, {})[ka] = c
    if not slices:
        raise PreconditionError("the zero symbol has no inner factorization")
    # base slice: lowest C-exponent present (the zero slice when it exists)
    base_key = min(slices)
    psi = LaurentPoly(n, slices[base_key])
    lead_k, lam = psi.terms[0]
    phi2 = psi * (ONE / lam)
    beta = {}
    for kc, sl in slices.items():
        s = LaurentPoly(n, sl)
        b = s[lead_k]
        if b == 0 or s != phi2 * b:
            raise PreconditionError(
                f"slice at co-analytic exponent {list(kc)} is not a multiple of the base slice")
        beta[kc] = b
    raw = LaurentPoly(n, {kc: b.conjugate() for kc, b in beta.items()})
    _, mu = raw.terms[0]
    phi1 = raw * (ONE / mu)
    scalar = mu.conjugate()
    return _poly_symbol(phi1), _poly_symbol(phi2), scalar


def factorize(phi: Symbol, eps: float = DEFAULT_EPS) -> FactorizationResult:
    """Split a partial-isometry symbol into ``scalar * conj(phi1) * phi2``.

    Symbols with Blaschke factors must be products of constants, monomials,
    Blaschke factors and their conjugates; these are split syntactically
    with the factors returned as written. Exact symbols go through the
    coefficient path: the slice with the lowest
    co-analytic exponent gives phi2 (scaled to leading coefficient 1), each
    other slice must be a scalar multiple beta_k of it, and
    phi1 = sum conj(beta_k) z^k, again scaled to leading coefficient 1. The
    leftover unimodular constant is returned separately.
    """
    cls = classify_variables(phi, eps)
    if cls.has_mixed:
        i = cls.tags.index(MIXED)
        raise NotPartialIsometry(
            f"variable {i + 1} appears both analytically and co-analytically "
            f"(witnesses {cls.witnesses[i]['pos']} and {cls.witnesses[i]['neg']})")
    rep = check_unimodular(phi)
    if rep.verdict == FAIL:
        raise NotPartialIsometry(f"symbol is not unimodular (residual {rep.residual:.3g})")
    if is_exact(phi):
        phi1, phi2, scalar = _coefficient_split(phi, cls)
        path = "coefficient"
    else:
        split = _structured_split(phi)
        if split is None:
            raise PreconditionError("numeric symbols must be written as a product of inner "
                                    "factors and their conjugates")
        phi1, phi2, scalar = split
        path = "structured"
        if variables(phi1) & variables(phi2):
            raise PreconditionError("inner factors share variables; cancel them before factorizing")
    exact_scalar = isinstance(scalar, GaussianRational)
    if exact_scalar and scalar.abs2() != 1 or not exact_scalar and abs(abs(scalar) - 1) > eps:
        raise NotPartialIsometry(f"leftover scalar {format_value(scalar)} is not unimodular")
    result = FactorizationResult(phi1, phi2, scalar, path)
    if is_exact(phi) and to_laurent(result.reconstruct()) != to_laurent(phi):
        raise AssertionError("factorization failed to reconstruct the symbol")
    return result


# ---------------------------------------------------------------- Halmos-Wallen

@dataclass
class HWDecomposition:
    """Unitary part plus truncated shifts for a finite power partial isometry.

    ``basis_change`` has the unitary basis first, then for each block
    (p, m) in increasing p the chain vectors ordered position-major: the m
    heads, then their images under V, and so on. In this basis V is
    ``U (+) kron(S_p, I_m) (+) ...`` with S_p the p x p lower shift.
    """

    unitary_dim: int
    blocks: list
    basis_change: np.ndarray
    model_residual: float
    model: np.ndarray
    rank_tol: float
    model_tol: float
    shift_dim: int = 0
    coshift_dim: int = 0

    @property
    def dim(self) -> int:
        return self.basis_change.shape[0]

    def to_json(self, include_basis: bool = False) -> dict:
        out = {"unitary_dim": self.unitary_dim,
               "blocks": [[p, m] for p, m in self.blocks],
               "model_residual": self.model_residual,
               "shift_dim": self.shift_dim,
               "coshift_dim": self.coshift_dim,
               "rank_tol": self.rank_tol,
               "model_tol": self.model_tol}
        if include_basis:
            out["basis_change"] = matrix_to_json(self.basis_change)
        return out


def _shift_block(p: int) -> np.ndarray:
    return np.eye(p, k=-1, dtype=complex)


def canonical_model(unitary: np.ndarray, blocks) -> np.ndarray:
    """``unitary (+) kron(S_p, I_m) (+) ...`` as a dense matrix."""
    parts = [unitary] if unitary.size else []
    parts += [np.kron(_shift_block(p), np.eye(m)) for p, m in blocks]
    return scipy.linalg.block_diag(*parts) if parts else np.zeros((0, 0), complex)


def _ranges(P, rank_tol):
    U, s, Vh = np.linalg.svd(P)
    r = int(np.sum(s > rank_tol))
    n = P.shape[0]
    return Subspace(n, Vh[:r].conj().T.copy(), rank_tol), Subspace(n, U[:, :r].copy(), rank_tol)


def hw_decompose(V, rank_tol: float = DEFAULT_RANK_TOL,
                 model_tol: float = DEFAULT_MODEL_TOL) -> HWDecomposition:
    """Decompose a square power partial isometry into unitary part and truncated shifts.

    Raises :class:`NotPartialIsometry` when some power fails
    ``P P^* P = P`` within ``model_tol`` and :class:`ChainOrthogonalityError`
    when the assembled chains are not orthonormal within ``rank_tol``.
    """
    V = as_matrix(V)
    n = V.shape[0]
    if V.shape[1] != n:
        raise InvalidInput("hw_decompose needs a square matrix")
    if rank_tol <= 0 or model_tol <= 0:
        raise InvalidInput("tolerances must be positive")

    # power ladder and unitary part
    Hu = Subspace.full(n, rank_tol)
    P = np.eye(n, dtype=complex)
    last_rank = n
    for m in range(1, n + 2):
        P = P @ V
        defect = np.linalg.norm(P @ P.conj().T @ P - P, 2)
        if defect > model_tol:
            raise NotPartialIsometry(f"V^{m} is not a partial isometry (defect {defect:.3g})")
        ran_E, ran_F = _ranges(P, rank_tol)
        Hu = subspace_intersect(subspace_intersect(Hu, ran_E, rank_tol), ran_F, rank_tol)
        if Hu.rank == last_rank and m > 1 or Hu.rank == 0:
            break
        last_rank = Hu.rank
    u = Hu.rank

    # head space and filtration by chain length
    heads = subspace_intersect(null_space(V.conj().T, rank_tol), Hu.complement(), rank_tol)
    blocks, chains = [], []
    prev = np.zeros((n, 0), dtype=complex)
    Vp = np.eye(n, dtype=complex)
    for p in range(1, n + 1):
        if prev.shape[1] == heads.rank:
            break
        Vp = Vp @ V
        ker = null_space(Vp @ heads.basis, rank_tol)
        A_p = heads.basis @ ker.basis
        adapted = orthonormalize(np.hstack([prev, A_p]), rank_tol).basis
        new = adapted[:, prev.shape[1]:]
        if new.shape[1]:
            blocks.append((p, new.shape[1]))
            col, block = new, [new]
            for _ in range(p - 1):
                col = V @ col
                block.append(col)
            chains.append(np.hstack(block))
        prev = adapted
    W = np.hstack([Hu.basis] + chains) if chains else Hu.basis
    if W.shape[1] != n:
        raise NotPartialIsometry(
            f"unitary part ({u}) and chains ({W.shape[1] - u}) do not fill dimension {n}")
    gram = W.conj().T @ W - np.eye(n)
    worst = np.unravel_index(int(np.argmax(np.abs(gram))), gram.shape)
    if abs(gram[worst]) > max(rank_tol, model_tol):
        raise ChainOrthogonalityError(
            f"basis vectors {worst[0]} and {worst[1]} overlap by {abs(gram[worst]):.3g}",
            pair=(int(worst[0]), int(worst[1])))
    unitary = Hu.basis.conj().T @ V @ Hu.basis
    model = canonical_model(unitary, blocks)
    residual = float(np.linalg.norm(W.conj().T @ V @ W - model, 2))
    if residual > model_tol:
        raise NotPartialIsometry(f"model residual {residual:.3g} exceeds {model_tol:.3g}")
    return HWDecomposition(u, blocks, W, residual, model, rank_tol, model_tol)


# ---------------------------------------------------------------- classification

@dataclass
class Classification:
    verdict: str
    partial_isometry: object
    factorization: FactorizationResult | None = None
    decomposition: HWDecomposition | None = None
    evidence_box: tuple | None = None
    note: str = ""
    inputs: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "inputs": self.inputs,
               "partial_isometry": self.partial_isometry.to_json(), "note": self.note}
        if self.factorization is not None:
            out["factorization"] = self.factorization.to_json()
        if self.decomposition is not None:
            out["decomposition"] = self.decomposition.to_json()
            out["evidence_box"] = list(self.evidence_box)
        return out


def _inner_products(left: Symbol, vecs: list, eps: float) -> np.ndarray:
    """``G[i, j] = <left * v_j, v_i>`` in L^2 of the torus, from truncated series."""
    ser = [working_series(v, eps) for v in vecs]
    prod = [working_series(Product((left, v)), eps) for v in vecs]
    G = np.zeros((len(vecs), len(vecs)), dtype=complex)
    for j, pj in enumerate(prod):
        for i, si in enumerate(ser):
            G[i, j] = np.vdot(si.window(pj.lower, pj.upper), pj.coeffs)
    return G


def _wandering_family(phi_i: Symbol, count: int, eps: float) -> list:
    """``phi_i^a u`` for a = 0..count-1 with u = (1 - conj(alpha) phi_i) / sqrt(1 - |alpha|^2)."""
    alpha = working_series(phi_i, eps).get((0,) * phi_i.n)
    s = math.sqrt(1 - abs(alpha) ** 2)
    u = Sum((Constant(phi_i.n, complex(1 / s)),
             Product((Constant(phi_i.n, complex(-alpha.conjugate() / s)), phi_i))))
    return [u if a == 0 else Product((phi_i,) * a + (u,)) for a in range(count)]


def _adapted_model(fac: FactorizationResult, d: DegreeBox, eps: float):
    """Matrix of T_phi on the orthonormal family phi1^a u1 * phi2^b u2.

    In this family T_phi moves (a, b) to (a - 1, b + 1) and kills a = 0, so
    the compression is a partial permutation times the scalar.
    """
    c_vars, a_vars = variables(fac.phi1), variables(fac.phi2)
    dims, mats = [], []
    if c_vars:
        k = 1 + max(d.d[i - 1] for i in c_vars)
        mats.append(_inner_products(Conj(fac.phi1), _wandering_family(fac.phi1, k, eps), eps))
        dims.append(k - 1)
    if a_vars:
        k = 1 + max(d.d[i - 1] for i in a_vars)
        mats.append(_inner_products(fac.phi2, _wandering_family(fac.phi2, k, eps), eps))
        dims.append(k - 1)
    G = mats[0] if len(mats) == 1 else np.kron(mats[0], mats[1])
    return complex(fac.unimodular_scalar) * G, tuple(dims)


def classify_operator(phi: Symbol, d=None, D=None, eps: float = DEFAULT_EPS,
                      tol_pass: float = DEFAULT_TOL_PASS, tol_fail: float = DEFAULT_TOL_FAIL,
                      rank_tol: float = DEFAULT_RANK_TOL,
                      model_tol: float = DEFAULT_MODEL_TOL) -> Classification:
    """Shift, co-shift, or direct sum of truncated shifts.

    Decided at the symbol level from the inner factorization. A finite
    decomposition is attached as evidence: the d-box compression for exact
    symbols, and for other symbols the matrix of T_phi on an orthonormal
    family adapted to the inner factors.
    """
    d = d if isinstance(d, DegreeBox) else DegreeBox(tuple(d or (3,) * phi.n))
    inputs = {"symbol": symbol_hash(phi), "d": list(d.d), "eps": eps}
    pi = check_partial_isometry(phi, d, D, eps, tol_pass, tol_fail)
    if pi.verdict == FAIL:
        return Classification(NOT_PARTIAL_ISOMETRY, pi, inputs=inputs)
    if pi.verdict == INCONCLUSIVE:
        return Classification(INCONCLUSIVE, pi, note="partial-isometry check inconclusive",
                              inputs=inputs)
    fac = factorize(phi, eps)
    c1, c2 = _is_constant(fac.phi1), _is_constant(fac.phi2)
    if c1 and c2:
        verdict = UNITARY_SCALAR
        note = "constant unimodular symbol: T_phi is a scalar multiple of the identity"
    elif c1:
        verdict, note = SHIFT, "analytic inner symbol: T_phi is a shift"
    elif c2:
        verdict, note = CO_SHIFT, "co-analytic inner symbol: T_phi is the adjoint of a shift"
    else:
        verdict, note = TRUNCATED_SHIFT_SUM, "both inner factors nonconstant"
    if is_exact(phi) or verdict == UNITARY_SCALAR:
        M, box = compression(phi, d, eps).M, d.d
    else:
        M, box = _adapted_model(fac, d, eps)
    dec = hw_decompose(M, rank_tol, model_tol)
    return Classification(verdict, pi, fac, dec, tuple(box), note, inputs)

