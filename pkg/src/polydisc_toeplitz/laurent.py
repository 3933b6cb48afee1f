"""Finitely supported Fourier series on the n-torus with exact coefficients.

A :class:`LaurentPoly` maps multi-indices k in Z^n to Gaussian rationals.
Negative exponents stand for conjugate variables on the torus
(z_i^{-1} = conj(z_i) when |z_i| = 1).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .gaussian import GaussianRational, ONE

__all__ = [
    "LaurentPoly",
    "lp_mul",
    "lp_conj_torus",
    "lp_analytic_project",
    "lp_eval",
]

MultiIndex = tuple


class LaurentPoly:
    """Immutable Laurent polynomial in ``n`` variables.

    Terms are kept in canonical order: lexicographic on the multi-index with
    the first variable most significant. Zero coefficients are never stored,
    so the zero polynomial has an empty term map.
    """

    __slots__ = ("n", "_terms", "_dict", "_hash")

    def __init__(self, n: int, terms: Mapping | Iterable = ()):
        if n < 1:
            raise InvalidInput("a Laurent polynomial needs at least one variable")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple, GaussianRational] = {}
        for k, c in items:
            k = tuple(int(x) for x in k)
            if len(k) != n:
                raise DimensionMismatch(f"multi-index {k} does not have length {n}")
            c = GaussianRational.coerce(c)
            acc[k] = acc.get(k, GaussianRational(0)) + c
        self.n = n
        self._dict = {k: c for k, c in acc.items() if c}
        self._terms = tuple(sorted(self._dict.items()))
        self._hash = None

    # constructors
    @classmethod
    def constant(cls, n: int, c=1) -> "LaurentPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, k: Iterable[int], c=1) -> "LaurentPoly":
        k = tuple(k)
        return cls(len(k), {k: c})

    @classmethod
    def zero(cls, n: int) -> "LaurentPoly":
        return cls(n)

    # queries
    @property
    def terms(self) -> tuple:
        """Canonically ordered ``(multi_index, coefficient)`` pairs."""
        return self._terms

    def __getitem__(self, k) -> GaussianRational:
        return self._dict.get(tuple(k), GaussianRational(0))

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms)

    def support(self) -> list[tuple]:
        return [k for k, _ in self._terms]

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def is_analytic(self) -> bool:
        return all(min(k) >= 0 for k, _ in self._terms)

    def degree_bounds(self):
        """Componentwise (min, max) exponents, or ``None`` for the zero polynomial."""
        if not self._terms:
            return None
        ks = np.array([k for k, _ in self._terms], dtype=np.int64)
        return tuple(ks.min(axis=0).tolist()), tuple(ks.max(axis=0).tolist())

    def norm2(self) -> Fraction:
        """Squared l2 norm of the coefficients (= squared L2 norm on the torus)."""
        return sum((c.abs2() for _, c in self._terms), Fraction(0))

    def l1_norm(self) -> float:
        return float(sum(abs(c) for _, c in self._terms))

    def inner(self, other: "LaurentPoly") -> GaussianRational:
        """<self, other> = sum_k self_k conj(other_k)."""
        _check_n(self, other)
        small, big = (self, other) if len(self) <= len(other) else (other, self)
        out = GaussianRational(0)
        for k, c in small._terms:
            d = big._dict.get(k)
            if d is not None:
                out = out + (c * d.conjugate() if small is self else d * c.conjugate())
        return out

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        _check_n(self, other)
        acc = dict(self._dict)
        for k, c in other._terms:
            acc[k] = acc.get(k, GaussianRational(0)) + c
        return LaurentPoly(self.n, acc)

    def __neg__(self):
        return LaurentPoly(self.n, {k: -c for k, c in self._terms})

    def __sub__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return lp_mul(self, other)
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return LaurentPoly(self.n, {k: c * v for k, v in self._terms})

    __rmul__ = __mul__

    def __pow__(self, m: int):
        if m < 0:
            raise InvalidInput("negative powers are not polynomial")
        out = LaurentPoly.constant(self.n)
        for _ in range(m):
            out = lp_mul(out, self)
        return out

    def shift(self, k) -> "LaurentPoly":
        """Multiply by the monomial z^k."""
        return LaurentPoly(self.n, {tuple(a + b for a, b in zip(kk, k)): c for kk, c in self._terms})

    def conj(self) -> "LaurentPoly":
        return lp_conj_torus(self)

    def analytic_part(self) -> "LaurentPoly":
        return lp_analytic_project(self)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.n, self._terms)))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({self.n}, {{{', '.join(f'{k}: {c}' for k, c in self._terms)}}})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, c in self._terms:
            mono = "*".join(
                (f"z{i + 1}" if e == 1 else f"z{i + 1}^{e}") if e > 0 else
                (f"zb{i + 1}" if e == -1 else f"zb{i + 1}^{-e}")
                for i, e in enumerate(k) if e
            )
            if not mono:
                parts.append(f"({c})")
            elif c == ONE:
                parts.append(mono)
            else:
                parts.append(f"({c})*{mono}")
        return " + ".join(parts)

    # serialization
    def to_json(self) -> dict:
        return {"terms": [{"k": list(k), "c": str(c)} for k, c in self._terms]}

    @classmethod
    def from_json(cls, n: int, obj: dict) -> "LaurentPoly":
        try:
            terms = obj["terms"]
            return cls(n, [(t["k"], _parse_coeff(t["c"])) for t in terms])
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed laurent object: {obj!r}") from exc


def _parse_coeff(c):
    if not isinstance(c, str):
        raise InvalidInput(f"coefficients must be Gaussian-rational strings, got {c!r}")
    from .gaussian import parse_gaussian

    try:
        return parse_gaussian(c)
    except ValueError as exc:
        raise InvalidInput(str(exc)) from exc


def _check_n(a: LaurentPoly, b: LaurentPoly):
    if a.n != b.n:
        raise DimensionMismatch(f"variable counts differ: {a.n} vs {b.n}")


def lp_mul(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Exact product (coefficient convolution)."""
    _check_n(a, b)
    acc: dict[tuple, GaussianRational] = {}
    zero = GaussianRational(0)
    for ka, ca in a.terms:
        for kb, cb in b.terms:
            k = tuple(x + y for x, y in zip(ka, kb))
            acc[k] = acc.get(k, zero) + ca * cb
    return LaurentPoly(a.n, acc)


def lp_conj_torus(a: LaurentPoly) -> LaurentPoly:
    """Pointwise conjugate on the torus: coefficient at k becomes conj of the one at -k."""
    return LaurentPoly(a.n, {tuple(-x for x in k): c.conjugate() for k, c in a.terms})


def lp_analytic_project(a: LaurentPoly) -> LaurentPoly:
    """Orthogonal projection onto H^2: drop every term with a negative exponent."""
    return LaurentPoly(a.n, {k: c for k, c in a.terms if min(k) >= 0})


def lp_eval(a: LaurentPoly, w, atol: float = 1e-12) -> complex:
    """Evaluate at a point of the torus in floating point."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if w.shape[0] != a.n:
        raise DimensionMismatch(f"point has {w.shape[0]} coordinates, expected {a.n}")
    if np.any(np.abs(np.abs(w) - 1.0) > atol):
        raise InvalidInput("evaluation point is not on the torus")
    total = 0j
    for k, c in a.terms:
        total += complex(c) * complex(np.prod(w ** np.array(k, dtype=float)))
    return total
