"""Three-way verdicts for the checkable operator identities.

Every check returns a :class:`CheckReport`. Exact symbols are decided by
exact arithmetic (thresholds 0, no leakage). Numeric symbols are decided on
finite compressions with a certified leakage bound:

* PASS  iff residual <= threshold_pass,
* FAIL  iff residual - leakage_bound >= threshold_fail,
* INCONCLUSIVE otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInput, PreconditionError
from .laurent import LaurentPoly, lp_analytic_project, lp_conj_torus, lp_mul
from .linalg import hermitian_min_eigpair, operator_norm
from .series import working_series
from .symbol import (
    Conj, Product, Symbol, evaluate, format_value, is_exact, sup_bound,
    sup_norm_bounds, symbol_hash, to_laurent, torus_grid,
)
from .toeplitz import (
    DegreeBox, ToeplitzFactor, compression, corner_combination, gram_compression_exact,
    toeplitz_apply_exact,
)

__all__ = [
    "CheckReport",
    "PASS", "FAIL", "INCONCLUSIVE",
    "DEFAULT_EPS", "DEFAULT_TOL_PASS", "DEFAULT_TOL_FAIL",
    "check_unimodular",
    "check_partial_isometry",
    "check_power_partial_isometry",
    "check_hyponormal",
    "estimate_norm",
    "NormEstimate",
    "shift_decay",
    "check_range_invariance",
    "check_commutation",
    "check_final_projection",
    "check_doubly_commuting",
]

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"
DEFAULT_EPS = 1e-10
DEFAULT_TOL_PASS = 1e-8
DEFAULT_TOL_FAIL = 1e-2
_U = float(np.finfo(float).eps)


@dataclass
class CheckReport:
    check: str
    verdict: str
    residual: float
    threshold_pass: float
    threshold_fail: float
    leakage_bound: float = 0.0
    witness: object = None
    details: dict = field(default_factory=dict)
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict == PASS and not self.residual <= self.threshold_pass:
            raise AssertionError("PASS report with residual above threshold")
        if self.verdict == FAIL and not self.residual - self.leakage_bound >= self.threshold_fail:
            raise AssertionError("FAIL report not certified by leakage-adjusted residual")

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "verdict": self.verdict,
            "residual": float(self.residual),
            "leakage_bound": float(self.leakage_bound),
            "thresholds": {"pass": self.threshold_pass, "fail": self.threshold_fail},
            "witness": _jsonable(self.witness),
            "inputs": _jsonable(self.inputs),
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, DegreeBox):
        return list(x.d)
    if isinstance(x, Symbol):
        return {"hash": symbol_hash(x)}
    return x


def _verdict(residual, leak, tp, tf) -> str:
    if residual <= tp:
        return PASS
    if residual - leak >= tf:
        return FAIL
    return INCONCLUSIVE


def _exact_verdict(nonzero: bool) -> str:
    return FAIL if nonzero else PASS


def _norm(p: LaurentPoly) -> float:
    return math.sqrt(p.norm2())


def _vec(v: np.ndarray) -> list:
    # fix the phase so the largest entry is real positive
    j = int(np.argmax(np.abs(v)))
    if abs(v[j]) > 0:
        v = v * (abs(v[j]) / v[j])
    return [[float(z.real), float(z.imag)] for z in v]


def _box(b, n=None) -> DegreeBox:
    b = b if isinstance(b, DegreeBox) else DegreeBox(tuple(b))
    if n is not None and b.n != n:
        raise InvalidInput(f"box {b.d} does not match {n} variables")
    return b


# ---------------------------------------------------------------- unimodularity

def check_unimodular(phi: Symbol, grid_m: int = 64, tol_pass: float = DEFAULT_TOL_PASS,
                     tol_fail: float = DEFAULT_TOL_FAIL) -> CheckReport:
    """|phi| = 1 on the torus.

    Exact symbols: decided by ``phi * conj(phi) == 1``; the residual is the
    l2 norm of phi conj(phi) - 1. Numeric symbols: residual is the largest
    deviation of |phi| from 1 over the grid. Either way the witness is the
    worst grid point.
    """
    pts = torus_grid(phi.n, grid_m)
    dev = np.abs(np.abs(evaluate(phi, pts)) - 1.0)
    worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
    point = pts[worst]
    witness = {"grid_index": [int(i) for i in worst],
               "point": [[float(z.real), float(z.imag)] for z in point],
               "deviation": float(dev[worst])}
    inputs = {"symbol": symbol_hash(phi), "grid_m": grid_m}
    if is_exact(phi):
        p = to_laurent(phi)
        defect = lp_mul(p, lp_conj_torus(p)) - LaurentPoly.constant(p.n)
        verdict = _exact_verdict(not defect.is_zero())
        details = {"path": "exact", "grid_max_deviation": float(dev.max())}
        if not defect.is_zero():
            details["defect_index"] = list(defect.support()[0])
        return CheckReport("unimodular", verdict, _norm(defect), 0.0, 0.0, 0.0,
                           witness if verdict == FAIL else None, details, inputs)
    residual = float(dev.max())
    leak = 16 * _U * (sup_bound(phi) + 1.0) ** 2
    verdict = _verdict(residual, leak, tol_pass, tol_fail)
    return CheckReport("unimodular", verdict, residual, tol_pass, tol_fail, leak,
                       witness, {"path": "numeric"}, inputs)


# ---------------------------------------------------------------- partial isometry

def _exact_identity_scan(apply_lhs, apply_rhs, monomials):
    """First monomial where two exact linear maps differ, with the difference norm."""
    for k in monomials:
        e = LaurentPoly.monomial(k)
        diff = apply_lhs(e) - apply_rhs(e)
        if not diff.is_zero():
            return k, _norm(diff)
    return None, 0.0


def _power_apply(p, m):
    def f(g):
        for _ in range(m):
            g = toeplitz_apply_exact(p, g)
        return g
    return f


def check_partial_isometry(phi: Symbol, d=None, D=None, eps: float = DEFAULT_EPS,
                           tol_pass: float = DEFAULT_TOL_PASS,
                           tol_fail: float = DEFAULT_TOL_FAIL) -> CheckReport:
    """T T^* T = T.

    Exact symbols: T(T^*(T z^k)) == T z^k verified exactly for every monomial
    z^k in the outer box ``D``. Numeric symbols: the d-corner residual on the
    D-box compression, with leakage.
    """
    d = _box(d or (3,) * phi.n, phi.n)
    D = _box(D or (24,) * phi.n, phi.n)
    inputs = {"symbol": symbol_hash(phi), "d": d, "D": D, "eps": eps}
    if is_exact(phi):
        p = to_laurent(phi)
        pc = lp_conj_torus(p)
        T = lambda g: toeplitz_apply_exact(p, g)
        Ts = lambda g: toeplitz_apply_exact(pc, g)
        k, res = _exact_identity_scan(lambda e: T(Ts(T(e))), T, D.monomials())
        verdict = _exact_verdict(k is not None)
        return CheckReport("partial-isometry", verdict, res, 0.0, 0.0, 0.0,
                           list(k) if k is not None else None,
                           {"path": "exact", "monomials_checked": D.dim if k is None else None},
                           inputs)
    f = ToeplitzFactor(phi, D, eps)
    R, leak = corner_combination([(1.0, [(f, False), (f, True), (f, False)]),
                                  (-1.0, [(f, False)])], d, D)
    return _numeric_report("partial-isometry", R, leak, tol_pass, tol_fail, inputs)


def _numeric_report(name, R, leak, tol_pass, tol_fail, inputs, extra=None):
    U, s, _ = np.linalg.svd(R)
    residual = float(s[0]) if s.size else 0.0
    verdict = _verdict(residual, leak, tol_pass, tol_fail)
    witness = _vec(np.conj(U[:, 0])) if verdict == FAIL else None
    details = {"path": "numeric"}
    details.update(extra or {})
    return CheckReport(name, verdict, residual, tol_pass, tol_fail, leak, witness, details, inputs)


def check_power_partial_isometry(phi: Symbol, max_power: int = 4, d=None, D=None,
                                 eps: float = DEFAULT_EPS, tol_pass: float = DEFAULT_TOL_PASS,
                                 tol_fail: float = DEFAULT_TOL_FAIL) -> list:
    """V^m V^{*m} V^m = V^m for m = 1..max_power, one report each."""
    if max_power < 1:
        raise InvalidInput("max_power must be >= 1")
    d = _box(d or (3,) * phi.n, phi.n)
    D = _box(D or (24,) * phi.n, phi.n)
    reports = []
    if is_exact(phi):
        p = to_laurent(phi)
        pc = lp_conj_torus(p)
        monos = D.monomials()
        for m in range(1, max_power + 1):
            Vm, Vsm = _power_apply(p, m), _power_apply(pc, m)
            k, res = _exact_identity_scan(lambda e: Vm(Vsm(Vm(e))), Vm, monos)
            details = {"path": "exact", "power": m}
            if p.is_monomial():
                # T_phi^m = T_{phi^m} for monomial symbols; confirm on the box
                pm = p ** m
                k2, _ = _exact_identity_scan(Vm, lambda e: toeplitz_apply_exact(pm, e), monos)
                details["power_equals_symbol_power"] = k2 is None
            inputs = {"symbol": symbol_hash(phi), "d": d, "D": D, "power": m}
            reports.append(CheckReport("power-pi", _exact_verdict(k is not None), res, 0.0, 0.0,
                                       0.0, list(k) if k is not None else None, details, inputs))
        return reports
    f = ToeplitzFactor(phi, D, eps)
    for m in range(1, max_power + 1):
        V, Vs = [(f, False)] * m, [(f, True)] * m
        R, leak = corner_combination([(1.0, V + Vs + V), (-1.0, V)], d, D)
        inputs = {"symbol": symbol_hash(phi), "d": d, "D": D, "eps": eps, "power": m}
        reports.append(_numeric_report("power-pi", R, leak, tol_pass, tol_fail, inputs,
                                       {"power": m}))
    return reports


# ---------------------------------------------------------------- hyponormality

def check_hyponormal(phi: Symbol, d=None, D=None, eps: float = DEFAULT_EPS,
                     tol_pass: float = DEFAULT_TOL_PASS,
                     tol_fail: float = DEFAULT_TOL_FAIL) -> CheckReport:
    """Self-commutator T^*T - T T^* >= 0 on the d-box.

    The residual is max(0, -lambda_min). A FAIL is conclusive because every
    compression of a positive operator is positive; a PASS only says no
    negative direction exists inside the box.
    """
    d = _box(d or (3,) * phi.n, phi.n)
    inputs = {"symbol": symbol_hash(phi), "d": d}
    note = "FAIL is conclusive; PASS is finite-box evidence only"
    if is_exact(phi):
        p = to_laurent(phi)
        A = gram_compression_exact(p, p, d, "adjoint_first")
        B = gram_compression_exact(p, p, d, "adjoint_second")
        C = np.array([[complex(a - b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])
        leak = 8 * d.dim * _U * max(np.abs(C).sum(axis=0).max(), 1.0)
        path = "exact"
    else:
        D = _box(D or (24,) * phi.n, phi.n)
        inputs.update({"D": D, "eps": eps})
        f = ToeplitzFactor(phi, D, eps)
        C, leak = corner_combination([(1.0, [(f, True), (f, False)]),
                                      (-1.0, [(f, False), (f, True)])], d, D)
        C = 0.5 * (C + C.conj().T)
        path = "numeric"
    lam, vec = hermitian_min_eigpair(C)
    residual = max(0.0, -lam)
    verdict = _verdict(residual, leak, tol_pass, tol_fail)
    witness = _vec(vec) if verdict == FAIL else None
    return CheckReport("hyponormal", verdict, residual, tol_pass, tol_fail, leak, witness,
                       {"path": path, "min_eig": lam, "note": note}, inputs)


# ---------------------------------------------------------------- norms

@dataclass
class NormEstimate:
    """Compression norms over a box sweep next to sup-norm bounds of the symbol."""

    rows: list          # dicts: box, value, gap, leakage_bound, attained
    sup_lower: float
    sup_upper: float
    nondecreasing: bool
    bounded: bool

    def to_json(self) -> dict:
        return _jsonable({"rows": self.rows, "sup_lower": self.sup_lower,
                          "sup_upper": self.sup_upper, "nondecreasing": self.nondecreasing,
                          "bounded": self.bounded})


def _nested(a: DegreeBox, b: DegreeBox) -> bool:
    return a <= b


def estimate_norm(phi: Symbol, box_sweep, grid_m: int = 64, eps: float = DEFAULT_EPS) -> NormEstimate:
    """||P_d T_phi P_d|| for each box, compared against ||phi||_inf.

    ``gap`` is sup_lower - ||M_d||. For an exact unimodular-times-monomial
    symbol the norm and the sup norm are computed exactly and ``attained``
    records exact equality.
    """
    boxes = [_box(b, phi.n) for b in box_sweep]
    if not boxes:
        raise InvalidInput("box sweep must be nonempty")
    lower, upper = sup_norm_bounds(phi, grid_m)
    mono = is_exact(phi) and to_laurent(phi).is_monomial()
    rows = []
    for b in boxes:
        if mono:
            (k, c), = to_laurent(phi).terms
            fits = all(abs(ki) <= di for ki, di in zip(k, b.d))
            value2 = c.abs2() if fits else Fraction(0)
            value = math.sqrt(value2)
            lower = upper = abs(c)
            rows.append({"box": b, "value": value, "gap": abs(c) - value, "leakage_bound": 0.0,
                         "attained": value2 == c.abs2()})
            continue
        cm = compression(phi, b, eps)
        value = operator_norm(cm.M)
        slack = 0.0 if cm.exact else working_series(phi, eps).tail_bound
        slack += 4 * b.dim * _U * max(value, 1.0)
        rows.append({"box": b, "value": value, "gap": lower - value, "leakage_bound": slack,
                     "attained": False})
    values = [r["value"] for r in rows]
    nondecreasing = all(
        values[i] <= values[i + 1] + rows[i + 1]["leakage_bound"] + rows[i]["leakage_bound"]
        for i in range(len(rows) - 1) if _nested(boxes[i], boxes[i + 1]))
    bounded = all(r["value"] <= upper + r["leakage_bound"] for r in rows)
    return NormEstimate(rows, lower, upper, nondecreasing, bounded)


# ---------------------------------------------------------------- shift decay

def shift_decay(phi: Symbol, f, max_m: int = 20, eps: float = 1e-15) -> list:
    """``[||T_phi^{*m} f|| for m = 1..max_m]`` for analytic ``phi`` and polynomial ``f``.

    For analytic phi, T_phi^* = T_conj(phi) only lowers exponents, so the
    span of monomials inside the degree box of ``f`` is invariant and the
    iteration is exact up to the coefficient error (total <= m * eps * ||f||).
    """
    if isinstance(f, Symbol):
        f = to_laurent(f)
    if not isinstance(f, LaurentPoly) or f.n != phi.n:
        raise InvalidInput("f must be a LaurentPoly in the same variables")
    if not f.is_analytic():
        raise InvalidInput("f must be an analytic polynomial")
    if is_exact(phi):
        p = to_laurent(phi)
        if not p.is_analytic():
            raise PreconditionError("shift_decay needs an analytic symbol")
        pc = lp_conj_torus(p)
        out, g = [], f
        for _ in range(max_m):
            g = toeplitz_apply_exact(pc, g)
            out.append(_norm(g))
        return out
    if min(working_series(phi, eps).lower) < 0:
        raise PreconditionError("shift_decay needs an analytic symbol")
    bounds = f.degree_bounds()
    box = DegreeBox(bounds[1] if bounds else (0,) * f.n)
    A = compression(Conj(phi), box, eps).M
    v = np.zeros(box.dim, dtype=complex)
    for k, c in f.terms:
        v[box.position(k)] = complex(c)
    out = []
    for _ in range(max_m):
        v = A @ v
        out.append(float(np.linalg.norm(v)))
    return out


# ---------------------------------------------------------------- range invariance

def _monomial_symbol(phi) -> LaurentPoly:
    p = to_laurent(phi) if isinstance(phi, Symbol) else phi
    if not isinstance(p, LaurentPoly) or not p.is_monomial():
        raise PreconditionError("this check is restricted to constant-times-monomial symbols")
    (_, c), = p.terms
    if c.abs2() != 1:
        raise PreconditionError("the monomial coefficient must be unimodular")
    return p


def check_range_invariance(phi, D) -> CheckReport:
    """ran T_phi is invariant under each M_{z_i}, and conj(phi) f is analytic for f in the range.

    For every interior monomial z^k (margin = symbol degree), with f = T z^k:
    (a) z_i f has an explicit preimage under T, (b) P(conj(phi) f) = conj(phi) f.
    """
    if isinstance(phi, Symbol) and not is_exact(phi):
        raise PreconditionError("range invariance is checked on exact monomial symbols only")
    p = _monomial_symbol(phi)
    D = _box(D, p.n)
    (alpha, c), = p.terms
    margin = max(1, max(abs(a) for a in alpha))
    interior = [k for k in D.monomials() if all(ki <= di - margin for ki, di in zip(k, D.d))]
    if not interior:
        raise InvalidInput("outer box has no interior at this symbol degree")
    pc = lp_conj_torus(p)
    failures, witness, checked = 0, None, 0
    for k in interior:
        f = toeplitz_apply_exact(p, LaurentPoly.monomial(k))
        if f.is_zero():
            continue
        checked += 1
        ok = True
        (fk, _), = f.terms
        for i in range(p.n):
            target = f.shift(tuple(int(j == i) for j in range(p.n)))
            pre = tuple(t - a for t, a in zip(fk, alpha))
            pre = tuple(x + (1 if j == i else 0) for j, x in enumerate(pre))
            if min(pre) < 0 or toeplitz_apply_exact(p, LaurentPoly.monomial(pre)) != target:
                ok = False
        g = lp_mul(pc, f)
        if lp_analytic_project(g) != g:
            ok = False
        if not ok:
            failures += 1
            witness = witness or list(k)
    return CheckReport("range-invariance", _exact_verdict(failures > 0), float(failures), 0.0, 0.0,
                       0.0, witness, {"path": "exact", "range_vectors_checked": checked,
                                      "margin": margin},
                       {"symbol": format_value(c), "exponent": list(alpha), "D": D})


# ---------------------------------------------------------------- commutation

def _disjoint_vars(phi1, phi2, eps):
    from .structure import classify_variables

    v1 = classify_variables(phi1, eps).depends()
    v2 = classify_variables(phi2, eps).depends()
    if v1 & v2:
        raise PreconditionError(f"symbols share variables {sorted(v1 & v2)}")


def check_commutation(phi1: Symbol, phi2: Symbol, d=None, D=None, eps: float = DEFAULT_EPS,
                      tol_pass: float = DEFAULT_TOL_PASS, tol_fail: float = DEFAULT_TOL_FAIL):
    """``(report for T1 T2 - T2 T1, report for T1 T2^* - T2^* T1)``."""
    if phi1.n != phi2.n:
        raise InvalidInput("symbols have different variable counts")
    _disjoint_vars(phi1, phi2, eps)
    d = _box(d or (3,) * phi1.n, phi1.n)
    D = _box(D or (24,) * phi1.n, phi1.n)
    inputs = {"phi1": symbol_hash(phi1), "phi2": symbol_hash(phi2), "d": d, "D": D, "eps": eps}
    if is_exact(phi1) and is_exact(phi2):
        p1, p2 = to_laurent(phi1), to_laurent(phi2)
        T1 = lambda g: toeplitz_apply_exact(p1, g)
        T2 = lambda g: toeplitz_apply_exact(p2, g)
        T2s = lambda g: toeplitz_apply_exact(lp_conj_torus(p2), g)
        out = []
        for name, lhs, rhs in (("commutation", lambda e: T1(T2(e)), lambda e: T2(T1(e))),
                               ("double-commutation", lambda e: T1(T2s(e)), lambda e: T2s(T1(e)))):
            k, res = _exact_identity_scan(lhs, rhs, D.monomials())
            out.append(CheckReport(name, _exact_verdict(k is not None), res, 0.0, 0.0, 0.0,
                                   list(k) if k is not None else None, {"path": "exact"}, inputs))
        return tuple(out)
    f1, f2 = ToeplitzFactor(phi1, D, eps), ToeplitzFactor(phi2, D, eps)
    R1, l1 = corner_combination([(1.0, [(f1, False), (f2, False)]),
                                 (-1.0, [(f2, False), (f1, False)])], d, D)
    R2, l2 = corner_combination([(1.0, [(f1, False), (f2, True)]),
                                 (-1.0, [(f2, True), (f1, False)])], d, D)
    return (_numeric_report("commutation", R1, l1, tol_pass, tol_fail, inputs),
            _numeric_report("double-commutation", R2, l2, tol_pass, tol_fail, inputs))


def check_final_projection(phi1: Symbol, phi2: Symbol, d=None, D=None, eps: float = DEFAULT_EPS,
                           tol_pass: float = DEFAULT_TOL_PASS,
                           tol_fail: float = DEFAULT_TOL_FAIL) -> CheckReport:
    """T_phi T_phi^* = T_phi2 T_phi2^* for phi = conj(phi1) phi2 (projection onto ran T_phi2)."""
    if phi1.n != phi2.n:
        raise InvalidInput("symbols have different variable counts")
    _disjoint_vars(phi1, phi2, eps)
    d = _box(d or (3,) * phi1.n, phi1.n)
    D = _box(D or (24,) * phi1.n, phi1.n)
    phi = Product((Conj(phi1), phi2))
    inputs = {"phi1": symbol_hash(phi1), "phi2": symbol_hash(phi2), "d": d, "D": D, "eps": eps}
    if is_exact(phi):
        p, p2 = to_laurent(phi), to_laurent(phi2)
        A = gram_compression_exact(p, p, d, "adjoint_second")
        B = gram_compression_exact(p2, p2, d, "adjoint_second")
        diff = np.array([[complex(a - b) for a, b in zip(ra, rb)] for ra, rb in zip(A, B)])
        nonzero = any(a != b for ra, rb in zip(A, B) for a, b in zip(ra, rb))
        witness = None
        if nonzero:
            j = next(i for i, (ra, rb) in enumerate(zip(A, B)) if ra != rb)
            witness = list(d.monomials()[j])
        return CheckReport("final-projection", _exact_verdict(nonzero), operator_norm(diff),
                           0.0, 0.0, 0.0, witness, {"path": "exact"}, inputs)
    f, f2 = ToeplitzFactor(phi, D, eps), ToeplitzFactor(phi2, D, eps)
    R, leak = corner_combination([(1.0, [(f, False), (f, True)]),
                                  (-1.0, [(f2, False), (f2, True)])], d, D)
    return _numeric_report("final-projection", R, leak, tol_pass, tol_fail, inputs)


# ---------------------------------------------------------------- Beurling criterion

def check_doubly_commuting(generators, box, guard: int = 1) -> CheckReport:
    """P_S M_{z_i}^* M_{z_j} h = M_{z_j} P_S M_{z_i}^* h for a monomial ideal S.

    S is spanned by the monomials z^k with k >= g for some generator g. Every
    basis monomial h of S whose exponents are at most ``box - guard`` is
    tested for all i != j; the identity holds exactly when S is generated by
    a single monomial.
    """
    gens = [tuple(int(x) for x in g) for g in generators]
    if not gens:
        raise InvalidInput("need at least one generator")
    n = len(gens[0])
    if any(len(g) != n or min(g) < 0 for g in gens):
        raise InvalidInput("generators must be nonnegative multi-indices of equal length")
    box = _box(box, n)
    if guard < 1:
        raise InvalidInput("guard must be >= 1")

    def in_S(k):
        return k is not None and min(k) >= 0 and any(all(a >= b for a, b in zip(k, g)) for g in gens)

    def step(k, i, delta):
        out = list(k)
        out[i] += delta
        return tuple(out) if out[i] >= 0 else None

    interior = [k for k in box.monomials()
                if in_S(k) and all(ki <= di - guard for ki, di in zip(k, box.d))]
    if not interior:
        raise InvalidInput("empty interior: no monomial of the ideal inside the guarded box")
    mismatches, witness = 0, None
    for h in interior:
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                lhs = step(step(h, j, 1), i, -1)
                lhs = lhs if in_S(lhs) else None
                r = step(h, i, -1)
                rhs = step(r, j, 1) if in_S(r) else None
                if lhs != rhs:
                    mismatches += 1
                    if witness is None:
                        witness = {"h": list(h), "i": i + 1, "j": j + 1,
                                   "lhs": list(lhs) if lhs else None,
                                   "rhs": list(rhs) if rhs else None}
    return CheckReport("doubly-commuting", _exact_verdict(mismatches > 0), float(mismatches),
                       0.0, 0.0, 0.0, witness,
                       {"path": "exact", "basis_checked": len(interior),
                        "principal": len(_minimal(gens)) == 1},
                       {"generators": [list(g) for g in gens], "box": box, "guard": guard})


def _minimal(gens):
    return {g for g in gens if not any(h != g and all(a >= b for a, b in zip(g, h)) for h in gens)}
