"""Finite models of Toeplitz operators on H^2 of the polydisc.

Bases are monomials z^k with 0 <= k <= d (a :class:`DegreeBox`), ordered
lexicographically with the first variable most significant, which is numpy's
C order on an array of shape ``d + 1``. Matrix entry (j, k) of a compression
is the Fourier coefficient phi_hat(j - k) = <T_phi z^k, z^j>.

Corner leakage
--------------
Compressions do not commute with products: the d-corner of M_D^(1)...M_D^(K)
differs from the d-corner of T_1...T_K. With P the projection onto the
D-box and Q = I - P, telescoping gives

    T_1...T_K - T_1 P T_2 ... P T_K = sum_i T_1 P ... P T_i Q T_{i+1} ... T_K,

and each term is bounded either by how far T_{i+1}...T_K can push the d-box
out of the D-box, or by the same quantity for (T_1 P ... T_i)^*. Splitting
the margin D - d into steps and using Schur's test on each step, a single
factor pushes mass past a per-coordinate gap g with operator norm at most

    tau(g) = sum |phi_hat(m)| over m with m_c > g_c for some c   (for T_phi)
             sum |phi_hat(m)| over m with m_c < -g_c for some c  (for T_phi^*).

The margin in coordinate c is shared only among factors that can move
coordinate c outward, so analytic/co-analytic structure is exploited. On top
of this come the truncation error of the symbol expansion (each factor is
replaced by a finite series within l1 distance delta) and a floating-point
term K * N * u * prod(l1 masses).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInput, PreconditionError
from .laurent import LaurentPoly, lp_analytic_project, lp_conj_torus, lp_mul
from .linalg import operator_norm
from .series import TruncatedSeries, blaschke_depth, working_series
from .symbol import Blaschke, Symbol, is_exact, sup_bound, to_laurent, variables

__all__ = [
    "DegreeBox",
    "CompressionMatrix",
    "toeplitz_apply_exact",
    "compression",
    "toeplitz_from_series",
    "gram_compression",
    "gram_compression_exact",
    "ToeplitzFactor",
    "corner_combination",
    "pi_residual",
    "suggest_outer_box",
]

_UNIT_ROUNDOFF = float(np.finfo(float).eps)


@dataclass(frozen=True)
class DegreeBox:
    """Monomials z^k with 0 <= k <= d componentwise."""

    d: tuple

    def __post_init__(self):
        d = tuple(int(x) for x in self.d)
        if not d or min(d) < 0:
            raise InvalidInput(f"degree box needs nonnegative bounds, got {self.d}")
        object.__setattr__(self, "d", d)

    @classmethod
    def cube(cls, n: int, size: int) -> "DegreeBox":
        return cls((size,) * n)

    @property
    def n(self) -> int:
        return len(self.d)

    @property
    def shape(self) -> tuple:
        return tuple(x + 1 for x in self.d)

    @property
    def dim(self) -> int:
        return math.prod(self.shape)

    def indices(self) -> np.ndarray:
        """Multi-indices in basis order, shape (dim, n)."""
        return np.array(list(np.ndindex(*self.shape)), dtype=np.int64).reshape(self.dim, self.n)

    def monomials(self):
        return list(np.ndindex(*self.shape))

    def position(self, k) -> int:
        return int(np.ravel_multi_index(tuple(k), self.shape))

    def contains(self, k) -> bool:
        return len(k) == self.n and all(0 <= a <= b for a, b in zip(k, self.d))

    def __le__(self, other: "DegreeBox") -> bool:
        return self.n == other.n and all(a <= b for a, b in zip(self.d, other.d))

    def positions_in(self, outer: "DegreeBox") -> np.ndarray:
        """Row/column positions of this box's basis inside ``outer``'s basis."""
        if not self <= outer:
            raise InvalidInput(f"box {self.d} is not contained in {outer.d}")
        return np.ravel_multi_index(tuple(self.indices().T), outer.shape)


@dataclass(frozen=True, eq=False)
class CompressionMatrix:
    """P_d T_phi P_d as a dense matrix.

    ``entry_err`` bounds the entrywise error. On the exact path it is 0 and the
    only discrepancy is the conversion of exact rationals to doubles (at most
    one ulp per entry), flagged by ``exact=True``.
    """

    box: DegreeBox
    M: np.ndarray
    entry_err: float
    exact: bool = False

    def header(self) -> dict:
        return {"box": list(self.box.d), "entry_err": self.entry_err}


def _as_poly(phi) -> LaurentPoly:
    if isinstance(phi, LaurentPoly):
        return phi
    if isinstance(phi, Symbol):
        if not is_exact(phi):
            raise PreconditionError("this operation needs an exact symbol")
        return to_laurent(phi)
    raise InvalidInput(f"expected a LaurentPoly or exact symbol, got {type(phi).__name__}")


def toeplitz_apply_exact(phi, f) -> LaurentPoly:
    """T_phi f = P(phi f), exactly, for a polynomial ``f`` in H^2."""
    phi, f = _as_poly(phi), _as_poly(f)
    if not f.is_analytic():
        raise InvalidInput("f must be an analytic polynomial (no negative exponents)")
    return lp_analytic_project(lp_mul(phi, f))


def toeplitz_from_series(series: TruncatedSeries, box: DegreeBox) -> np.ndarray:
    """Dense compression on ``box`` built from stored coefficients."""
    if series.n != box.n:
        raise InvalidInput("series and box have different variable counts")
    d = box.d
    C = series.window(tuple(-x for x in d), d)
    idx = box.indices()
    lin = np.zeros((box.dim, box.dim), dtype=np.int64)
    stride = 1
    for c in reversed(range(box.n)):
        width = 2 * d[c] + 1
        lin += (idx[:, c][:, None] - idx[:, c][None, :] + d[c]) * stride
        stride *= width
    return C.reshape(-1)[lin]


def compression(phi: Symbol, box: DegreeBox, eps: float = 1e-10) -> CompressionMatrix:
    """Entry (j, k) = coeff(phi, j - k) with entrywise error <= eps."""
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    if phi.n != box.n:
        raise InvalidInput("symbol and box have different variable counts")
    if is_exact(phi):
        series = working_series(phi, eps)
        return CompressionMatrix(box, toeplitz_from_series(series, box), 0.0, exact=True)
    series = working_series(phi, eps)
    return CompressionMatrix(box, toeplitz_from_series(series, box), series.coeff_err)


# ---------------------------------------------------------------- exact Gram

def gram_compression_exact(phi, psi, box: DegreeBox, kind: str) -> list:
    """Exact box compression of T_psi^* T_phi or T_phi T_psi^*.

    ``adjoint_first``:  entry (j, k) = <T_phi z^k, T_psi z^j> = <P(phi z^k), P(psi z^j)>
    ``adjoint_second``: entry (j, k) = <T_psi^* z^k, T_phi^* z^j>
                                     = <P(conj(psi) z^k), P(conj(phi) z^j)>
    These are the true compressions of the products, with no truncation.
    Returns nested lists of :class:`GaussianRational`.
    """
    phi, psi = _as_poly(phi), _as_poly(psi)
    if phi.n != box.n or psi.n != box.n:
        raise InvalidInput("symbols and box have different variable counts")
    if kind == "adjoint_first":
        left, right = phi, psi
    elif kind == "adjoint_second":
        left, right = lp_conj_torus(psi), lp_conj_torus(phi)
    else:
        raise InvalidInput(f"unknown gram kind {kind!r}")
    monos = box.monomials()
    a = [toeplitz_apply_exact(left, LaurentPoly.monomial(k)) for k in monos]
    b = a if right == left else [toeplitz_apply_exact(right, LaurentPoly.monomial(k)) for k in monos]
    return [[a[k].inner(b[j]) for k in range(len(monos))] for j in range(len(monos))]


def gram_compression(phi, psi, box: DegreeBox, kind: str) -> np.ndarray:
    """Floating copy of :func:`gram_compression_exact`."""
    G = gram_compression_exact(phi, psi, box, kind)
    return np.array([[complex(x) for x in row] for row in G], dtype=complex)


# ---------------------------------------------------------------- leakage

@dataclass(eq=False)
class ToeplitzFactor:
    """One symbol's finite model on an outer box, with the data leakage bounds need."""

    symbol: Symbol
    outer: DegreeBox
    eps: float
    series: TruncatedSeries = field(init=False)
    delta: float = field(init=False)
    norm: float = field(init=False)
    l1: float = field(init=False)
    M: np.ndarray = field(init=False)

    def __post_init__(self):
        self.series = working_series(self.symbol, self.eps)
        self.delta = self.series.tail_bound
        self.norm = sup_bound(self.symbol) + self.delta
        self.l1 = self.series.l1()
        self.M = toeplitz_from_series(self.series, self.outer)
        self._active = {}

    def pushes(self, coord: int, adjoint: bool) -> bool:
        """Can T (or T^*) increase exponent ``coord`` of a monomial?"""
        key = (coord, adjoint)
        if key not in self._active:
            s = self.series
            nz = np.abs(s.coeffs) > 0
            ax = np.arange(s.lower[coord], s.upper[coord] + 1)
            shape = [1] * s.n
            shape[coord] = -1
            m = np.broadcast_to(ax.reshape(shape), nz.shape)
            self._active[key] = bool(np.any(nz & ((m < 0) if adjoint else (m > 0))))
        return self._active[key]

    def tau(self, gap, adjoint: bool) -> float:
        gap = np.asarray(gap)
        if adjoint:
            return self.series.mass_where(lambda K: np.any(K < -gap, axis=-1))
        return self.series.mass_where(lambda K: np.any(K > gap, axis=-1))


def _spread(chain, margin) -> float:
    """Bound on ||Q_D Y_j ... Y_1 P_d|| for factors listed from P_d outward."""
    if not chain:
        return 0.0
    n = len(margin)
    gaps = np.zeros((len(chain), n), dtype=np.int64)
    for c in range(n):
        active = [t for t, (f, adj) in enumerate(chain) if f.pushes(c, adj)]
        if not active:
            continue
        q, r = divmod(int(margin[c]), len(active))
        for pos, t in enumerate(active):
            gaps[t, c] = q + (1 if pos < r else 0)
    norms = [f.norm for f, _ in chain]
    total = 0.0
    for t, (f, adj) in enumerate(chain):
        others = math.prod(norms[:t] + norms[t + 1:])
        total += others * f.tau(gaps[t], adj)
    return total


def word_leakage(word, inner: DegreeBox, outer: DegreeBox) -> float:
    """Certified bound on ||corner(T_1...T_K) - corner(M_1...M_K)||.

    ``word`` is a sequence of ``(ToeplitzFactor, adjoint)`` pairs, leftmost first.
    """
    K = len(word)
    margin = np.array(outer.d) - np.array(inner.d)
    norms = [f.norm for f, _ in word]
    total = 0.0
    for i in range(1, K):
        right = _spread(list(reversed(word[i:])), margin)
        left = _spread([(f, not adj) for f, adj in word[:i]], margin)
        total += min(left * math.prod(norms[i:]), right * math.prod(norms[:i]))
    # replacing each true symbol by its finite expansion
    for t, (f, _) in enumerate(word):
        total += f.delta * math.prod(norms[:t] + norms[t + 1:])
    total += 2 * K * outer.dim * _UNIT_ROUNDOFF * math.prod(f.l1 for f, _ in word)
    return total


def _corner_product(word, cols: np.ndarray) -> np.ndarray:
    X = None
    for f, adj in reversed(word):
        A = f.M.conj().T if adj else f.M
        X = A[:, cols] if X is None else A @ X
    return X[cols]


def corner_combination(terms, inner: DegreeBox, outer: DegreeBox):
    """Evaluate sum_t c_t * corner_d(word_t) on the outer box.

    ``terms`` is a list of ``(coefficient, word)``. Returns
    ``(corner_matrix, leakage_bound)`` where the leakage bounds the operator
    norm distance to the same combination of the true operators.
    """
    cols = inner.positions_in(outer)
    total = np.zeros((len(cols), len(cols)), dtype=complex)
    leak = 0.0
    for c, word in terms:
        total += c * _corner_product(word, cols)
        leak += abs(c) * word_leakage(word, inner, outer)
    # rounding in the final norm/eigen computation
    leak += 4 * len(cols) * _UNIT_ROUNDOFF * max(np.abs(total).sum(axis=0).max(initial=0.0), 1.0)
    return total, leak


def pi_residual(phi: Symbol, inner: DegreeBox, outer: DegreeBox, eps: float = 1e-10):
    """``(residual, leakage_bound)`` for the corner of M M^* M - M on the outer box."""
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    if not inner <= outer:
        raise InvalidInput("inner box must be contained in the outer box")
    f = ToeplitzFactor(phi, outer, eps)
    R, leak = corner_combination([(1.0, [(f, False), (f, True), (f, False)]),
                                  (-1.0, [(f, False)])], inner, outer)
    return operator_norm(R), leak


def suggest_outer_box(phi: Symbol, inner: DegreeBox, eps: float = 1e-10,
                      factors: int = 3) -> DegreeBox:
    """Outer box with margin = (per-variable depth where the tail drops below eps) * factors."""
    depth = [0] * phi.n
    if is_exact(phi):
        bounds = to_laurent(phi).degree_bounds()
        if bounds is not None:
            depth = [max(-lo, hi) for lo, hi in zip(*bounds)]
    else:
        for node in _blaschke_nodes(phi):
            depth[node.var - 1] += blaschke_depth(abs(node.a), eps)
        for v in range(phi.n):
            if depth[v] == 0 and (v + 1) in variables(phi):
                depth[v] = 1
    return DegreeBox(tuple(d + factors * max(x, 1) for d, x in zip(inner.d, depth)))


def _blaschke_nodes(s):
    if isinstance(s, Blaschke):
        yield s
        return
    for attr in ("arg", "factors", "terms"):
        child = getattr(s, attr, None)
        if child is None:
            continue
        for c in (child if isinstance(child, tuple) else (child,)):
            yield from _blaschke_nodes(c)
