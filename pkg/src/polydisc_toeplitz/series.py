"""Truncated Fourier expansions of symbols with certified l1 error.

Every non-exact symbol is expanded into a dense coefficient array over a
box of multi-indices together with ``tail_bound``, an upper bound on the l1
norm of (true series - stored series) over all of Z^n. The stored entries
are therefore each within ``tail_bound`` of the true coefficients, and the
Toeplitz matrix built from the stored coefficients is within ``tail_bound``
of the true one in operator norm.

Propagation rules:

* Blaschke leaf with zero a, depth K: coefficients c_0 = -a,
  c_k = conj(a)^(k-1) (1 - |a|^2) for 1 <= k <= K; omitted mass
  sum_{k>K} |a|^(k-1)(1-|a|^2) = |a|^K (1 + |a|).
* Sum: errors add.
* Product: |fg - f_T g_T|_1 <= |f_T|_1 e_g + e_f |g_T|_1 + e_f e_g.
* Conj: reflect indices and conjugate; error unchanged.

Rounding in the floating coefficient arithmetic (relative size ~1e-16) is
not included in the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import signal

from .errors import BudgetExceeded, InvalidInput
from .symbol import (
    Blaschke, Conj, Constant, Laurent, Monomial, Product, Sum, Symbol,
    is_exact, to_laurent,
)

__all__ = ["TruncatedSeries", "expand", "coeff", "working_series", "blaschke_depth",
           "blaschke_coefficients", "MAX_DEPTH"]

#: largest per-variable expansion depth for a single Blaschke factor
MAX_DEPTH = 4096
_DIRECT_CONV_LIMIT = 4_000_000


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Dense coefficients on ``lower <= k <= upper`` plus an l1 error bound.

    ``coeff_err`` bounds the entrywise error inside the box; ``tail_bound``
    bounds the l1 distance to the true series over all of Z^n (so it covers
    both the in-box error and every omitted coefficient).
    """

    lower: tuple
    upper: tuple
    coeffs: np.ndarray
    tail_bound: float
    coeff_err: float = 0.0

    def __post_init__(self):
        if self.tail_bound < 0 or not np.all(np.isfinite(self.coeffs)):
            raise InvalidInput("series must be finite with nonnegative tail bound")
        expected = tuple(u - l + 1 for l, u in zip(self.lower, self.upper))
        if self.coeffs.shape != expected:
            raise InvalidInput(f"coefficient array shape {self.coeffs.shape} != box {expected}")

    @property
    def n(self) -> int:
        return len(self.lower)

    def get(self, k) -> complex:
        idx = tuple(ki - li for ki, li in zip(k, self.lower))
        if any(i < 0 or i >= s for i, s in zip(idx, self.coeffs.shape)):
            return 0j
        return complex(self.coeffs[idx])

    def window(self, lower, upper) -> np.ndarray:
        """Dense coefficients over another box, zero-filled outside the stored one."""
        shape = tuple(u - l + 1 for l, u in zip(lower, upper))
        out = np.zeros(shape, dtype=complex)
        src, dst = [], []
        for l_out, u_out, l_in, u_in in zip(lower, upper, self.lower, self.upper):
            lo, hi = max(l_out, l_in), min(u_out, u_in)
            if lo > hi:
                return out
            src.append(slice(lo - l_in, hi - l_in + 1))
            dst.append(slice(lo - l_out, hi - l_out + 1))
        out[tuple(dst)] = self.coeffs[tuple(src)]
        return out

    def l1(self) -> float:
        return float(np.abs(self.coeffs).sum())

    def mass_outside(self, lower, upper) -> float:
        """l1 mass of stored coefficients outside the box ``lower..upper``."""
        inside = np.abs(self.window(lower, upper)).sum()
        return max(self.l1() - float(inside), 0.0)

    def mass_where(self, predicate) -> float:
        """l1 mass of stored coefficients at indices k with ``predicate(K) -> bool array``."""
        grids = np.meshgrid(*[np.arange(l, u + 1) for l, u in zip(self.lower, self.upper)],
                            indexing="ij")
        mask = predicate(np.stack(grids, axis=-1))
        return float(np.abs(self.coeffs[mask]).sum())

    def conj(self) -> "TruncatedSeries":
        flipped = np.conj(self.coeffs[(slice(None, None, -1),) * self.n])
        return TruncatedSeries(tuple(-u for u in self.upper), tuple(-l for l in self.lower),
                               flipped, self.tail_bound, self.coeff_err)


# ---------------------------------------------------------------- leaves

def blaschke_coefficients(a: complex, depth: int) -> np.ndarray:
    """Fourier coefficients c_0..c_depth of the Blaschke factor with zero ``a``."""
    a = complex(a)
    c = np.empty(depth + 1, dtype=complex)
    c[0] = -a
    if depth >= 1:
        c[1:] = (1 - abs(a) ** 2) * np.conj(a) ** np.arange(depth)
    return c


def blaschke_depth(r: float, delta: float, max_depth: int = MAX_DEPTH) -> int:
    """Smallest K with r^K (1 + r) <= delta, i.e. r^K (1 - r^2) / (1 - r) <= delta."""
    if r == 0:
        return 1
    if delta <= 0:
        raise InvalidInput("delta must be positive")
    k = max(1, math.ceil(math.log(delta / (1 + r)) / math.log(r)))
    while r ** k * (1 + r) > delta:
        k += 1
    if k > max_depth:
        raise BudgetExceeded(
            f"Blaschke factor with |a| = {r:.6g} needs depth {k} > {max_depth} for tail {delta:.3g}")
    return k


def _point(n, k, value) -> TruncatedSeries:
    return TruncatedSeries(tuple(k), tuple(k), np.full((1,) * n, complex(value)), 0.0)


def _from_laurent(poly) -> TruncatedSeries:
    n = poly.n
    bounds = poly.degree_bounds()
    if bounds is None:
        return _point(n, (0,) * n, 0)
    lo, hi = bounds
    arr = np.zeros(tuple(h - l + 1 for l, h in zip(lo, hi)), dtype=complex)
    for k, c in poly.terms:
        arr[tuple(ki - li for ki, li in zip(k, lo))] = complex(c)
    return TruncatedSeries(lo, hi, arr, 0.0)


def _blaschke_series(s: Blaschke, delta: float, max_depth: int) -> TruncatedSeries:
    a = s.a
    r = abs(a)
    depth = blaschke_depth(r, delta, max_depth)
    c = blaschke_coefficients(a, depth)
    err = r ** depth * (1 + r) if r else 0.0
    shape = [1] * s.n
    shape[s.var - 1] = depth + 1
    lo = [0] * s.n
    hi = [0] * s.n
    hi[s.var - 1] = depth
    return TruncatedSeries(tuple(lo), tuple(hi), c.reshape(shape), err)


# ---------------------------------------------------------------- combinators

def _add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    lo = tuple(map(min, a.lower, b.lower))
    hi = tuple(map(max, a.upper, b.upper))
    arr = a.window(lo, hi) + b.window(lo, hi)
    return TruncatedSeries(lo, hi, arr, a.tail_bound + b.tail_bound)


def _convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    method = "direct" if x.size * y.size <= _DIRECT_CONV_LIMIT else "fft"
    return signal.convolve(x, y, mode="full", method=method)


def _mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    arr = _convolve(a.coeffs, b.coeffs)
    lo = tuple(x + y for x, y in zip(a.lower, b.lower))
    hi = tuple(x + y for x, y in zip(a.upper, b.upper))
    ea, eb = a.tail_bound, b.tail_bound
    err = a.l1() * eb + ea * b.l1() + ea * eb
    return TruncatedSeries(lo, hi, arr, err)


def _series(s: Symbol, delta: float, max_depth: int) -> TruncatedSeries:
    if is_exact(s):
        return _from_laurent(to_laurent(s))
    if isinstance(s, Constant):
        return _point(s.n, (0,) * s.n, s.value)
    if isinstance(s, Monomial):
        return _point(s.n, s.k, 1)
    if isinstance(s, Laurent):
        return _from_laurent(s.poly)
    if isinstance(s, Blaschke):
        return _blaschke_series(s, delta, max_depth)
    if isinstance(s, Conj):
        return _series(s.arg, delta, max_depth).conj()
    if isinstance(s, Sum):
        out = _series(s.terms[0], delta, max_depth)
        for t in s.terms[1:]:
            out = _add(out, _series(t, delta, max_depth))
        return out
    if isinstance(s, Product):
        out = _series(s.factors[0], delta, max_depth)
        for f in s.factors[1:]:
            out = _mul(out, _series(f, delta, max_depth))
        return out
    raise TypeError(f"unknown symbol node {type(s).__name__}")


@lru_cache(maxsize=256)
def working_series(s: Symbol, eps: float, max_depth: int = MAX_DEPTH) -> TruncatedSeries:
    """Finite expansion of ``s`` whose l1 distance to the true series is <= eps.

    Leaf depths are tightened until the propagated bound meets ``eps``; the
    result is cached per (symbol, eps).
    """
    if eps <= 0:
        raise InvalidInput("eps must be positive")
    if is_exact(s):
        return _from_laurent(to_laurent(s))
    delta = eps
    for _ in range(60):
        out = _series(s, delta, max_depth)
        if out.tail_bound <= eps:
            return TruncatedSeries(out.lower, out.upper, out.coeffs, out.tail_bound,
                                   coeff_err=out.tail_bound)
        delta *= min(0.5, 0.5 * eps / out.tail_bound)
    raise BudgetExceeded(f"could not reach l1 error {eps:.3g} for {s!r}")


def expand(s: Symbol, lower, upper, eps: float = 1e-12,
           max_depth: int = MAX_DEPTH) -> TruncatedSeries:
    """Coefficients of ``s`` on the box ``lower..upper``.

    Entries are within ``eps`` of the true coefficients. ``tail_bound`` is the
    certified l1 mass of everything not represented (exterior coefficients
    plus in-box error). Exact symbols give the exterior mass exactly.
    """
    lower, upper = tuple(lower), tuple(upper)
    if len(lower) != s.n or len(upper) != s.n:
        raise InvalidInput("box dimension does not match the symbol")
    if any(l > u for l, u in zip(lower, upper)):
        raise InvalidInput("empty box")
    if is_exact(s):
        poly = to_laurent(s)
        arr = _from_laurent(poly).window(lower, upper)
        outside = sum(abs(c) for k, c in poly.terms
                      if any(ki < l or ki > u for ki, l, u in zip(k, lower, upper)))
        return TruncatedSeries(lower, upper, arr, float(outside), 0.0)
    w = working_series(s, eps, max_depth)
    arr = w.window(lower, upper)
    return TruncatedSeries(lower, upper, arr, w.tail_bound + w.mass_outside(lower, upper),
                           w.coeff_err)


def coeff(s: Symbol, k, eps: float = 1e-12):
    """Fourier coefficient at ``k``.

    Exact symbols return a :class:`GaussianRational`; otherwise a complex
    within ``eps`` of the true value.
    """
    k = tuple(int(x) for x in k)
    if len(k) != s.n:
        raise InvalidInput(f"multi-index {k} does not have length {s.n}")
    if is_exact(s):
        return to_laurent(s)[k]
    return working_series(s, eps).get(k)

