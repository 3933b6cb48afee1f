import numpy as np
import pytest
from hypothesis import given, strategies as st

from polydisc_toeplitz.checkers import (
    FAIL, INCONCLUSIVE, PASS, CheckReport, check_commutation, check_doubly_commuting,
    check_final_projection, check_hyponormal, check_partial_isometry,
    check_power_partial_isometry, check_range_invariance, check_unimodular, estimate_norm,
    shift_decay,
)
from polydisc_toeplitz.errors import InvalidInput, PreconditionError
from polydisc_toeplitz.gaussian import GaussianRational, parse_gaussian
from polydisc_toeplitz.laurent import LaurentPoly
from polydisc_toeplitz.structure import MIXED, classify_variables
from polydisc_toeplitz.symbol import Blaschke, Conj, Constant, Laurent, Monomial

from oracles import (
    blaschke_hat, box_indices, ideal_projector, monomial_matrix, shift_matrix, toeplitz_1d,
)

half, third = parse_gaussian("1/2"), parse_gaussian("1/3")
z1, z2 = Monomial((1, 0)), Monomial((0, 1))
UNITS = [GaussianRational(1), GaussianRational(0, 1), GaussianRational(-1),
         parse_gaussian("3/5+4/5i"), parse_gaussian("-5/13+12/13i")]
coef = st.builds(GaussianRational, st.integers(-3, 3), st.integers(-3, 3))
expo = st.tuples(st.integers(-2, 2), st.integers(-2, 2))


def audit(rep: CheckReport):
    """Every verdict must be justified by the report's own numbers."""
    if rep.verdict == PASS:
        assert rep.residual <= rep.threshold_pass
    elif rep.verdict == FAIL:
        assert rep.residual - rep.leakage_bound >= rep.threshold_fail
    js = rep.to_json()
    assert set(js) >= {"check", "verdict", "residual", "leakage_bound", "thresholds", "witness",
                       "inputs"}
    return rep


def test_report_invariant_is_enforced():
    with pytest.raises(AssertionError):
        CheckReport("x", PASS, 1.0, 1e-8, 1e-2)
    with pytest.raises(AssertionError):
        CheckReport("x", FAIL, 0.02, 1e-8, 1e-2, leakage_bound=0.015)


# ---------------------------------------------------------------- unimodular

def test_unimodular_examples(blaschke_pair):
    r = audit(check_unimodular(Laurent(LaurentPoly(2, {(-2, 1): GaussianRational(0, 1)}))))
    assert r.verdict == PASS and r.residual == 0
    r = audit(check_unimodular(Monomial((1,)) + Conj(Monomial((1,)))))
    assert r.verdict == FAIL
    assert r.witness is not None
    r = audit(check_unimodular(blaschke_pair, 64))
    assert r.verdict == PASS and r.residual <= 1e-10


def test_unimodular_numeric_fail_has_worst_point():
    phi = Blaschke(1, 1, half) + Blaschke(1, 1, third)
    r = audit(check_unimodular(phi, 32))
    assert r.verdict == FAIL
    w = complex(*r.witness["point"][0])
    b = lambda a: (w - a) / (1 - a * w)
    assert abs(abs(b(0.5) + b(1 / 3)) - 1) == pytest.approx(r.residual)


@given(st.dictionaries(expo, coef, min_size=1, max_size=4))
def test_exact_unimodular_iff_single_unimodular_term(t):
    p = LaurentPoly(2, t)
    if p.is_zero():
        return
    rep = check_unimodular(Laurent(p), 16)
    single = p.is_monomial() and p.terms[0][1].abs2() == 1
    assert (rep.verdict == PASS) == single


# ---------------------------------------------------------------- partial isometry

def test_partial_isometry_examples(blaschke_pair):
    r = audit(check_partial_isometry(Conj(z1) * z2, (3, 3), (8, 8)))
    assert r.verdict == PASS and r.residual == 0
    r = audit(check_partial_isometry(blaschke_pair, (3, 3), (32, 32)))
    assert r.verdict == PASS and r.residual < 1e-6
    r = audit(check_partial_isometry(Conj(Monomial((1,))) * Blaschke(1, 1, half), (3,), (64,)))
    assert r.verdict == FAIL and r.witness is not None


def test_exact_non_pi_reports_witness():
    r = audit(check_partial_isometry(Monomial((1,)) + Monomial((2,)), (2,), (4,)))
    assert r.verdict == FAIL
    assert r.witness == [0]


@given(st.sampled_from(UNITS), expo, st.booleans(), st.dictionaries(expo, coef, max_size=3))
def test_exact_pi_iff_unimodular_iff_no_mixed(u, k, mono, extra):
    """On exact symbols the three tests agree, and a mixed variable forces failure."""
    p = LaurentPoly(2, {k: u}) if mono else LaurentPoly(2, {k: u, **extra})
    if p.is_zero():
        return
    phi = Laurent(p)
    pi = check_partial_isometry(phi, (1, 1), (4, 4)).verdict
    uni = check_unimodular(phi, 16).verdict
    single = p.is_monomial() and p.terms[0][1].abs2() == 1
    assert (pi == PASS) == (uni == PASS) == single
    if classify_variables(phi).has_mixed:
        assert pi == FAIL


def test_power_pi_examples(blaschke_pair):
    reps = check_power_partial_isometry(Conj(z1) * z2, 5, (3, 3), (8, 8))
    assert [r.verdict for r in reps] == [PASS] * 5
    assert all(r.details["power_equals_symbol_power"] for r in reps)
    reps = check_power_partial_isometry(Monomial((1,)), 4, (3,), (10,))
    assert all(audit(r).verdict == PASS for r in reps)
    reps = check_power_partial_isometry(blaschke_pair, 3, (3, 3), (32, 32))
    assert [audit(r).verdict for r in reps] == [PASS] * 3
    assert max(r.residual for r in reps) <= 1e-5
    with pytest.raises(InvalidInput):
        check_power_partial_isometry(z1, 0)


def test_power_pi_fails_for_non_power_pi():
    # T = z1 + z1^2 is not a partial isometry, so already m = 1 fails
    reps = check_power_partial_isometry(Monomial((1,)) + Monomial((2,)), 2, (2,), (6,))
    assert reps[0].verdict == FAIL


# ---------------------------------------------------------------- hyponormal

def test_hyponormal_examples():
    r = audit(check_hyponormal(Monomial((1,)), (3,)))
    assert r.verdict == PASS and r.details["min_eig"] >= -1e-10
    r = audit(check_hyponormal(Conj(Monomial((1,))), (3,)))
    assert r.verdict == FAIL
    assert r.details["min_eig"] == pytest.approx(-1, abs=1e-10)
    np.testing.assert_allclose(np.abs([complex(*x) for x in r.witness]), [1, 0, 0, 0], atol=1e-12)
    assert "conclusive" in r.details["note"]


HYPO_FLOOR = -1.0  # 9x9 brute force on a (10,10) outer matrix, see test below


def test_hyponormal_mixed_monomial_matches_brute_force():
    T = monomial_matrix((-1, 1), (10, 10))
    C = T.conj().T @ T - T @ T.conj().T
    idx = [box_indices((10, 10)).index(k) for k in box_indices((2, 2))]
    brute = np.linalg.eigvalsh(C[np.ix_(idx, idx)]).min()
    assert brute == pytest.approx(HYPO_FLOOR)
    r = audit(check_hyponormal(Conj(z1) * z2, (2, 2)))
    assert r.verdict == FAIL
    assert r.details["min_eig"] == pytest.approx(brute, abs=1e-12)
    assert r.details["min_eig"] < -0.5


def test_hyponormal_numeric(blaschke_pair):
    assert check_hyponormal(Blaschke(1, 1, half), (3,), (40,)).verdict == PASS
    assert audit(check_hyponormal(blaschke_pair, (2, 2), (24, 24))).verdict == FAIL


# ---------------------------------------------------------------- norms

def test_norm_sweep_sum_of_shifts():
    est = estimate_norm(z1 + z2, [(4, 4), (8, 8), (16, 16)], 64)
    vals = [r["value"] for r in est.rows]
    # closed form for the compression of S (x) I + I (x) S on (d+1)^2
    np.testing.assert_allclose(vals, [2 * np.cos(np.pi / (2 * d + 2)) for d in (4, 8, 16)],
                               atol=1e-12)
    assert est.nondecreasing and est.bounded
    assert all(v <= 2 + 1e-12 for v in vals)
    assert est.rows[-1]["gap"] < est.rows[0]["gap"]


@pytest.mark.parametrize("phi", [
    Constant(2, GaussianRational(1)),
    Laurent(LaurentPoly(2, {(-1, 1): parse_gaussian("3/5-4/5i")})),
    Conj(z1) * z2,
])
def test_norm_attained_for_monomials(phi):
    est = estimate_norm(phi, [(1, 1), (2, 2), (5, 5)])
    assert all(r["attained"] and r["value"] == 1.0 and r["gap"] == 0 for r in est.rows)


def test_norm_not_attained_when_box_too_small():
    row, = estimate_norm(Conj(z1) * z2, [(0, 0)]).rows
    assert row["value"] == 0.0 and not row["attained"]


def test_norm_monomial_outside_box_and_errors():
    est = estimate_norm(Monomial((3,)), [(2,), (3,)])
    assert [r["value"] for r in est.rows] == [0.0, 1.0]
    with pytest.raises(InvalidInput):
        estimate_norm(z1, [])


def test_norm_numeric_symbol(blaschke_pair):
    est = estimate_norm(blaschke_pair, [(1, 1), (3, 3), (6, 6)])
    assert est.nondecreasing and est.bounded
    assert est.rows[-1]["value"] <= 1 + 1e-9


# ---------------------------------------------------------------- shift decay

def test_shift_decay_blaschke_closed_form():
    norms = shift_decay(Blaschke(1, 1, half), LaurentPoly.constant(1), 20)
    np.testing.assert_allclose(norms, 0.5 ** np.arange(1, 21), rtol=0, atol=1e-12)


def test_shift_decay_brute_force_oracle():
    """T^{*m} f against a large direct matrix for a non-constant f."""
    a = 0.3 + 0.4j
    f = LaurentPoly(1, {(0,): 1, (2,): parse_gaussian("1/2-i")})
    norms = shift_decay(Blaschke(1, 1, a), f, 6)
    T = toeplitz_1d(lambda k: blaschke_hat(a, k), 60)
    v = np.zeros(60, dtype=complex)
    v[0], v[2] = 1, 0.5 - 1j
    ref = []
    for _ in range(6):
        v = T.conj().T @ v
        ref.append(np.linalg.norm(v))
    np.testing.assert_allclose(norms, ref, atol=1e-12)
    assert all(x >= y - 1e-10 for x, y in zip(norms, norms[1:]))


def test_shift_decay_examples():
    assert shift_decay(Monomial((1,)), LaurentPoly.monomial((3,)), 6) == [1, 1, 1, 0, 0, 0]
    assert shift_decay(Constant(1, GaussianRational(1)), LaurentPoly.constant(1), 5) == [1.0] * 5
    with pytest.raises(PreconditionError):
        shift_decay(Conj(Monomial((1,))), LaurentPoly.constant(1), 3)
    with pytest.raises(PreconditionError):
        shift_decay(Conj(Blaschke(1, 1, half)), LaurentPoly.constant(1), 3)
    with pytest.raises(InvalidInput):
        shift_decay(Monomial((1,)), LaurentPoly.monomial((-1,)), 3)


@given(st.floats(0.05, 0.9), st.floats(0, 6.28))
def test_shift_decay_equals_modulus_power(r, t):
    a = complex(r * np.exp(1j * t))
    norms = shift_decay(Blaschke(1, 1, a), LaurentPoly.constant(1), 10)
    np.testing.assert_allclose(norms, r ** np.arange(1, 11), atol=1e-12)


# ---------------------------------------------------------------- range invariance

def test_range_invariance_examples():
    r = audit(check_range_invariance(Conj(z1) * z2, (5, 5)))
    assert r.verdict == PASS
    assert check_range_invariance(Constant(1, GaussianRational(1)), (3,)).verdict == PASS
    r = check_range_invariance(Laurent(LaurentPoly(2, {(-2, 1): 1})), (6, 6))
    assert r.verdict == PASS and r.details["range_vectors_checked"] > 0


def test_range_invariance_brute_force():
    """Preimages exist: compare against column spans of a big monomial matrix."""
    T = monomial_matrix((-2, 1), (8, 8))
    idx = box_indices((8, 8))
    ran = {idx[int(np.nonzero(T[:, c])[0][0])] for c in range(T.shape[1]) if T[:, c].any()}
    for k in ran:
        if max(k) <= 5:
            assert (k[0] + 1, k[1]) in ran and (k[0], k[1] + 1) in ran


def test_range_invariance_rejects():
    with pytest.raises(PreconditionError):
        check_range_invariance(z1 + z2, (4, 4))
    with pytest.raises(PreconditionError):
        check_range_invariance(Blaschke(1, 1, half), (4,))
    with pytest.raises(PreconditionError):
        check_range_invariance(Laurent(LaurentPoly(1, {(1,): 2})), (4,))


# ---------------------------------------------------------------- commutation

def test_commutation_examples():
    a, b = check_commutation(z1, z2)
    assert (a.verdict, b.verdict, a.residual, b.residual) == (PASS, PASS, 0.0, 0.0)
    a, b = check_commutation(Monomial((2, 0)), z2)
    assert a.verdict == b.verdict == PASS
    a, b = check_commutation(Blaschke(2, 1, half), Blaschke(2, 2, third), (3, 3), (32, 32))
    assert audit(a).verdict == audit(b).verdict == PASS
    assert max(a.residual, b.residual) <= 1e-6


def test_commutation_rejects_shared_variables():
    with pytest.raises(PreconditionError):
        check_commutation(z1, z1 * z2)


def test_final_projection_examples():
    r = audit(check_final_projection(z1, z2))
    assert r.verdict == PASS and r.residual == 0
    r = check_final_projection(Constant(2, GaussianRational(0, 1)), z2)
    assert r.verdict == PASS
    r = audit(check_final_projection(Blaschke(2, 1, half), Blaschke(2, 2, third), (3, 3), (32, 32)))
    assert r.verdict == PASS and r.residual <= 1e-6


# ---------------------------------------------------------------- Beurling

def _brute_dc(generators, box, guard):
    """Max violation of P_S R_i* R_j = R_j P_S R_i* on interior monomials, by matrices."""
    big = tuple(b + 1 for b in box)
    P = ideal_projector(generators, big)
    idx = box_indices(big)
    worst = 0.0
    for i in range(len(box)):
        for j in range(len(box)):
            if i == j:
                continue
            Mi, Mj = shift_matrix(i, big), shift_matrix(j, big)
            L = P @ Mi.T @ Mj
            R = Mj @ P @ Mi.T
            for c, k in enumerate(idx):
                if P[c, c] and all(x <= b - guard for x, b in zip(k, box)):
                    worst = max(worst, np.abs((L - R)[:, c]).max())
    return worst


@pytest.mark.parametrize("gens,expect", [
    ([(1, 1)], PASS),
    ([(1, 0), (0, 1)], FAIL),
    ([(0, 0)], PASS),
    ([(2, 0), (1, 1)], FAIL),
    ([(2, 1), (3, 1)], PASS),
])
def test_doubly_commuting(gens, expect):
    r = audit(check_doubly_commuting(gens, (4, 4), 1))
    assert r.verdict == expect
    assert (_brute_dc(gens, (4, 4), 1) > 0) == (expect == FAIL)
    if expect == FAIL:
        h = tuple(r.witness["h"])
        assert any(all(a >= b for a, b in zip(h, g)) for g in gens)


def test_doubly_commuting_errors():
    with pytest.raises(InvalidInput):
        check_doubly_commuting([(4, 4)], (4, 4), 1)
    with pytest.raises(InvalidInput):
        check_doubly_commuting([], (4, 4))
    with pytest.raises(InvalidInput):
        check_doubly_commuting([(1, -1)], (4, 4))


def test_mixed_tag_on_sum():
    assert classify_variables(Monomial((1,)) + Conj(Monomial((1,)))).tags == (MIXED,)
    assert INCONCLUSIVE == "INCONCLUSIVE"
