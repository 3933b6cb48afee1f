"""Symbol expressions on the n-torus.

A symbol is a small immutable expression tree built from constants,
monomials, one-variable Blaschke factors ``(z_i - a) / (1 - conj(a) z_i)``,
torus conjugation, products, sums and exact Laurent polynomials. Python
operators build trees: ``Conj(b1) * b2``, ``m + 1``, ``~phi`` (conjugate).

JSON schema::

    {"vars": n, "expr": E}
    E := {"const": "<gaussian-rational or float>"} | {"monomial": [k1, ..., kn]}
       | {"blaschke": {"var": i, "zero": "<value>"}} | {"conj": E}
       | {"product": [E, ...]} | {"sum": [E, ...]}
       | {"laurent": {"terms": [{"k": [...], "c": "<gaussian-rational>"}]}}
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

from .errors import DimensionMismatch, InvalidInput
from .gaussian import GaussianRational, parse_gaussian
from .laurent import LaurentPoly, lp_conj_torus, lp_mul

__all__ = [
    "Symbol",
    "Constant",
    "Monomial",
    "Blaschke",
    "Conj",
    "Product",
    "Sum",
    "Laurent",
    "is_exact",
    "to_laurent",
    "evaluate",
    "sup_bound",
    "lipschitz_bounds",
    "sup_norm_bounds",
    "torus_grid",
    "parse_value",
    "format_value",
    "symbol_from_json",
    "symbol_to_json",
    "symbol_hash",
    "variables",
]


class Symbol:
    """Base class for expression nodes. Every node knows its variable count ``n``."""

    n: int

    def __mul__(self, other):
        other = _lift(other, self.n)
        if other is None:
            return NotImplemented
        return Product((self, other))

    def __rmul__(self, other):
        other = _lift(other, self.n)
        if other is None:
            return NotImplemented
        return Product((other, self))

    def __add__(self, other):
        other = _lift(other, self.n)
        if other is None:
            return NotImplemented
        return Sum((self, other))

    __radd__ = __add__

    def __invert__(self):
        return Conj(self)

    def __pow__(self, m: int):
        if not isinstance(m, int) or m < 1:
            raise InvalidInput("symbol powers must be positive integers")
        return self if m == 1 else Product((self,) * m)


def _lift(value, n):
    if isinstance(value, Symbol):
        if value.n != n:
            raise DimensionMismatch(f"variable counts differ: {value.n} vs {n}")
        return value
    if isinstance(value, LaurentPoly):
        return Laurent(value)
    if isinstance(value, (int, GaussianRational)) and not isinstance(value, bool):
        return Constant(n, GaussianRational.coerce(value))
    if isinstance(value, (float, complex)):
        return Constant(n, complex(value))
    return None


def _check_value(v):
    if isinstance(v, GaussianRational):
        return v
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return GaussianRational(v)
    if isinstance(v, (float, complex)):
        v = complex(v)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise InvalidInput("non-finite constant")
        return v
    if isinstance(v, str):
        return parse_value(v)
    raise InvalidInput(f"unsupported constant {v!r}")


@dataclass(frozen=True)
class Constant(Symbol):
    n: int
    value: object  # GaussianRational or complex

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInput("n must be >= 1")
        object.__setattr__(self, "value", _check_value(self.value))


@dataclass(frozen=True)
class Monomial(Symbol):
    k: tuple

    def __post_init__(self):
        k = tuple(int(x) for x in self.k)
        if not k:
            raise InvalidInput("monomial needs at least one exponent")
        object.__setattr__(self, "k", k)

    @property
    def n(self):
        return len(self.k)


@dataclass(frozen=True)
class Blaschke(Symbol):
    """Blaschke factor (z_var - a) / (1 - conj(a) z_var), var is 1-based."""

    n: int
    var: int
    zero: object = GaussianRational(0)

    def __post_init__(self):
        if not 1 <= self.var <= self.n:
            raise InvalidInput(f"Blaschke variable {self.var} outside 1..{self.n}")
        a = _check_value(self.zero)
        object.__setattr__(self, "zero", a)
        inside = a.abs2() < 1 if isinstance(a, GaussianRational) else abs(a) < 1
        if not inside:
            raise InvalidInput(f"Blaschke zero {a} is not inside the unit disc")

    @property
    def a(self) -> complex:
        return complex(self.zero)


@dataclass(frozen=True)
class Conj(Symbol):
    arg: Symbol

    @property
    def n(self):
        return self.arg.n


@dataclass(frozen=True)
class Product(Symbol):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        _check_children(self.factors, "Product")

    @property
    def n(self):
        return self.factors[0].n


@dataclass(frozen=True)
class Sum(Symbol):
    terms: tuple

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        _check_children(self.terms, "Sum")

    @property
    def n(self):
        return self.terms[0].n


@dataclass(frozen=True)
class Laurent(Symbol):
    poly: LaurentPoly

    @property
    def n(self):
        return self.poly.n


def _check_children(children, kind):
    if not children:
        raise InvalidInput(f"{kind} must be nonempty")
    n = children[0].n
    for c in children:
        if not isinstance(c, Symbol):
            raise InvalidInput(f"{kind} child {c!r} is not a symbol")
        if c.n != n:
            raise DimensionMismatch(f"{kind} children have different variable counts")


# ---------------------------------------------------------------- queries

@lru_cache(maxsize=None)
def is_exact(s: Symbol) -> bool:
    """True iff ``s`` has no Blaschke node and no floating constant."""
    if isinstance(s, Constant):
        return isinstance(s.value, GaussianRational)
    if isinstance(s, (Monomial, Laurent)):
        return True
    if isinstance(s, Blaschke):
        return False
    if isinstance(s, Conj):
        return is_exact(s.arg)
    return all(is_exact(c) for c in _children(s))


def _children(s):
    if isinstance(s, Product):
        return s.factors
    if isinstance(s, Sum):
        return s.terms
    if isinstance(s, Conj):
        return (s.arg,)
    return ()


@lru_cache(maxsize=None)
def to_laurent(s: Symbol) -> LaurentPoly:
    """Normalize an exact symbol to a :class:`LaurentPoly`."""
    if isinstance(s, Constant):
        if not isinstance(s.value, GaussianRational):
            raise InvalidInput("floating constant has no exact normal form")
        return LaurentPoly.constant(s.n, s.value)
    if isinstance(s, Monomial):
        return LaurentPoly.monomial(s.k)
    if isinstance(s, Laurent):
        return s.poly
    if isinstance(s, Blaschke):
        raise InvalidInput("Blaschke factors have no exact Laurent normal form")
    if isinstance(s, Conj):
        return lp_conj_torus(to_laurent(s.arg))
    if isinstance(s, Product):
        return reduce(lp_mul, (to_laurent(f) for f in s.factors))
    if isinstance(s, Sum):
        return reduce(lambda a, b: a + b, (to_laurent(t) for t in s.terms))
    raise TypeError(f"unknown symbol node {type(s).__name__}")


@lru_cache(maxsize=None)
def variables(s: Symbol) -> frozenset:
    """1-based indices of variables appearing syntactically in ``s``."""
    if isinstance(s, Constant):
        return frozenset()
    if isinstance(s, Monomial):
        return frozenset(i + 1 for i, e in enumerate(s.k) if e)
    if isinstance(s, Laurent):
        return frozenset(i + 1 for k in s.poly.support() for i, e in enumerate(k) if e)
    if isinstance(s, Blaschke):
        return frozenset({s.var})
    return frozenset().union(*(variables(c) for c in _children(s)))


def evaluate(s: Symbol, points) -> np.ndarray:
    """Evaluate ``s`` at torus points of shape (..., n)."""
    pts = np.asarray(points, dtype=complex)
    if pts.shape[-1] != s.n:
        raise DimensionMismatch(f"points have {pts.shape[-1]} coordinates, expected {s.n}")
    return _eval(s, pts)


def _eval(s, pts):
    shape = pts.shape[:-1]
    if isinstance(s, Constant):
        return np.full(shape, complex(s.value))
    if isinstance(s, Monomial):
        return _monomial_values(pts, s.k)
    if isinstance(s, Laurent):
        out = np.zeros(shape, dtype=complex)
        for k, c in s.poly.terms:
            out += complex(c) * _monomial_values(pts, k)
        return out
    if isinstance(s, Blaschke):
        z = pts[..., s.var - 1]
        a = s.a
        return (z - a) / (1 - np.conj(a) * z)
    if isinstance(s, Conj):
        return np.conj(_eval(s.arg, pts))
    if isinstance(s, Product):
        out = _eval(s.factors[0], pts)
        for f in s.factors[1:]:
            out = out * _eval(f, pts)
        return out
    if isinstance(s, Sum):
        out = _eval(s.terms[0], pts)
        for t in s.terms[1:]:
            out = out + _eval(t, pts)
        return out
    raise TypeError(f"unknown symbol node {type(s).__name__}")


def _monomial_values(pts, k):
    out = np.ones(pts.shape[:-1], dtype=complex)
    for i, e in enumerate(k):
        if e > 0:
            out = out * pts[..., i] ** e
        elif e < 0:
            out = out * np.conj(pts[..., i]) ** (-e)
    return out


@lru_cache(maxsize=None)
def sup_bound(s: Symbol) -> float:
    """Certified upper bound on the sup norm of ``s`` over the torus.

    Blaschke factors and unit monomials contribute 1, Laurent polynomials
    their l1 coefficient mass; products multiply and sums add.
    """
    if isinstance(s, Constant):
        return abs(complex(s.value))
    if isinstance(s, (Monomial, Blaschke)):
        return 1.0
    if isinstance(s, Laurent):
        return s.poly.l1_norm()
    if isinstance(s, Conj):
        return sup_bound(s.arg)
    if isinstance(s, Product):
        return math.prod(sup_bound(f) for f in s.factors)
    if isinstance(s, Sum):
        return sum(sup_bound(t) for t in s.terms)
    raise TypeError(f"unknown symbol node {type(s).__name__}")


@lru_cache(maxsize=None)
def lipschitz_bounds(s: Symbol) -> tuple:
    """Per-variable bounds on |d phi / d theta_i| over the torus.

    For a Blaschke factor, |b'(z)| = (1 - |a|^2) / |1 - conj(a) z|^2 is at most
    (1 + |a|) / (1 - |a|). Products use the Leibniz rule with :func:`sup_bound`.
    """
    n = s.n
    if isinstance(s, Constant):
        return (0.0,) * n
    if isinstance(s, Monomial):
        return tuple(float(abs(e)) for e in s.k)
    if isinstance(s, Laurent):
        out = [0.0] * n
        for k, c in s.poly.terms:
            for i, e in enumerate(k):
                out[i] += abs(e) * abs(c)
        return tuple(out)
    if isinstance(s, Blaschke):
        r = abs(s.a)
        out = [0.0] * n
        out[s.var - 1] = (1 + r) / (1 - r)
        return tuple(out)
    if isinstance(s, Conj):
        return lipschitz_bounds(s.arg)
    if isinstance(s, Sum):
        return tuple(map(sum, zip(*(lipschitz_bounds(t) for t in s.terms))))
    if isinstance(s, Product):
        sups = [sup_bound(f) for f in s.factors]
        out = [0.0] * n
        for j, f in enumerate(s.factors):
            others = math.prod(sups[:j] + sups[j + 1:])
            for i, v in enumerate(lipschitz_bounds(f)):
                out[i] += v * others
        return tuple(out)
    raise TypeError(f"unknown symbol node {type(s).__name__}")


def torus_grid(n: int, m: int) -> np.ndarray:
    """Uniform m x ... x m grid on the n-torus, shape (m, ..., m, n)."""
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    mesh = np.meshgrid(*([roots] * n), indexing="ij")
    return np.stack(mesh, axis=-1)


def sup_norm_bounds(s: Symbol, grid_m: int) -> tuple[float, float]:
    """Bracket the sup norm of ``s``: ``lower <= ||s||_inf <= upper``.

    ``lower`` is the grid maximum. Every torus point lies within pi/m of a
    grid point in each angle, so ``upper = lower + (pi/m) * sum_i L_i`` with
    L_i from :func:`lipschitz_bounds`, capped by :func:`sup_bound`.
    """
    if grid_m < 2:
        raise InvalidInput("grid_m must be >= 2")
    vals = np.abs(evaluate(s, torus_grid(s.n, grid_m)))
    lower = float(vals.max())
    slack = (math.pi / grid_m) * sum(lipschitz_bounds(s))
    upper = min(lower + slack, sup_bound(s))
    return lower, max(upper, lower)


# ---------------------------------------------------------------- JSON

_FLOAT_RE = re.compile(r"[.eE]|inf|nan", re.IGNORECASE)


def parse_value(text: str):
    """Gaussian-rational literal, or a floating complex if it has a decimal point/exponent."""
    if not isinstance(text, str):
        raise InvalidInput(f"values must be strings, got {text!r}")
    s = text.strip().replace(" ", "")
    if not _FLOAT_RE.search(s):
        try:
            return parse_gaussian(s)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from exc
    try:
        v = complex(s.replace("i", "j"))
    except ValueError as exc:
        raise InvalidInput(f"not a numeric literal: {text!r}") from exc
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise InvalidInput(f"non-finite literal: {text!r}")
    return v


def format_value(v) -> str:
    if isinstance(v, GaussianRational):
        return str(v)
    v = complex(v)
    if v.imag == 0:
        return repr(float(v.real))
    sign = "-" if v.imag < 0 else "+"
    return f"{v.real!r}{sign}{abs(v.imag)!r}i"


def symbol_from_json(obj) -> Symbol:
    """Build a symbol from the ``{"vars": n, "expr": E}`` schema."""
    if not isinstance(obj, dict) or "vars" not in obj or "expr" not in obj:
        raise InvalidInput('symbol JSON must be an object with "vars" and "expr"')
    n = obj["vars"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInput('"vars" must be a positive integer')
    return _expr_from_json(obj["expr"], n)


def _expr_from_json(e, n):
    if not isinstance(e, dict) or len(e) != 1:
        raise InvalidInput(f"expression node must be a one-key object, got {e!r}")
    (key, val), = e.items()
    if key == "const":
        return Constant(n, parse_value(val))
    if key == "monomial":
        if not isinstance(val, list) or len(val) != n or not all(
                isinstance(x, int) and not isinstance(x, bool) for x in val):
            raise InvalidInput(f"monomial must be a list of {n} integers")
        return Monomial(tuple(val))
    if key == "blaschke":
        if not isinstance(val, dict) or set(val) != {"var", "zero"}:
            raise InvalidInput('blaschke node needs exactly "var" and "zero"')
        if not isinstance(val["var"], int) or isinstance(val["var"], bool):
            raise InvalidInput("blaschke var must be an integer")
        return Blaschke(n, val["var"], parse_value(val["zero"]))
    if key == "conj":
        return Conj(_expr_from_json(val, n))
    if key in ("product", "sum"):
        if not isinstance(val, list) or not val:
            raise InvalidInput(f"{key} needs a nonempty list")
        kids = tuple(_expr_from_json(v, n) for v in val)
        return Product(kids) if key == "product" else Sum(kids)
    if key == "laurent":
        return Laurent(LaurentPoly.from_json(n, val))
    raise InvalidInput(f"unknown expression node {key!r}")


def symbol_to_json(s: Symbol) -> dict:
    return {"vars": s.n, "expr": _expr_to_json(s)}


def _expr_to_json(s):
    if isinstance(s, Constant):
        return {"const": format_value(s.value)}
    if isinstance(s, Monomial):
        return {"monomial": list(s.k)}
    if isinstance(s, Blaschke):
        return {"blaschke": {"var": s.var, "zero": format_value(s.zero)}}
    if isinstance(s, Conj):
        return {"conj": _expr_to_json(s.arg)}
    if isinstance(s, Product):
        return {"product": [_expr_to_json(f) for f in s.factors]}
    if isinstance(s, Sum):
        return {"sum": [_expr_to_json(t) for t in s.terms]}
    if isinstance(s, Laurent):
        return {"laurent": s.poly.to_json()}
    raise TypeError(f"unknown symbol node {type(s).__name__}")


def symbol_hash(s: Symbol) -> str:
    """sha256 of the canonical JSON encoding."""
    blob = json.dumps(symbol_to_json(s), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()
