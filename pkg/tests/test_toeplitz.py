import numpy as np
import pytest
from hypothesis import given, strategies as st

from polydisc_toeplitz.errors import InvalidInput
from polydisc_toeplitz.gaussian import GaussianRational, parse_gaussian
from polydisc_toeplitz.laurent import LaurentPoly
from polydisc_toeplitz.symbol import Blaschke, Conj, Laurent, Monomial
from polydisc_toeplitz.toeplitz import (
    DegreeBox, ToeplitzFactor, compression, corner_combination, gram_compression,
    gram_compression_exact, pi_residual, suggest_outer_box, toeplitz_apply_exact,
)

from oracles import blaschke_hat, box_indices, monomial_matrix, toeplitz_1d, toeplitz_from_coeffs

half, third = parse_gaussian("1/2"), parse_gaussian("1/3")
coef = st.builds(GaussianRational, st.integers(-3, 3), st.integers(-3, 3))
terms = st.dictionaries(st.tuples(st.integers(-2, 2), st.integers(-2, 2)), coef, max_size=4)


def test_degree_box_ordering():
    box = DegreeBox((1, 2))
    assert box.dim == 6
    assert box.monomials() == [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2)]
    assert box.position((1, 0)) == 3
    assert box.contains((1, 2)) and not box.contains((2, 0))
    np.testing.assert_array_equal(DegreeBox((1, 1)).positions_in(DegreeBox((2, 2))), [0, 1, 3, 4])
    with pytest.raises(InvalidInput):
        DegreeBox((-1,))
    with pytest.raises(InvalidInput):
        DegreeBox((3,)).positions_in(DegreeBox((2,)))


@given(terms)
def test_exact_compression_matches_brute_force(t):
    p = LaurentPoly(2, t)
    cm = compression(Laurent(p), DegreeBox((2, 3)))
    oracle = toeplitz_from_coeffs({k: complex(c) for k, c in p.terms}, (2, 3))
    np.testing.assert_array_equal(cm.M, oracle)
    assert cm.entry_err == 0 and cm.exact


def test_blaschke_compression_example():
    cm = compression(Blaschke(1, 1, half), DegreeBox((2,)))
    np.testing.assert_allclose(cm.M, [[-.5, 0, 0], [.75, -.5, 0], [.375, .75, -.5]], atol=1e-12)
    assert cm.header() == {"box": [2], "entry_err": cm.entry_err}
    assert cm.entry_err <= 1e-10


def test_conj_blaschke_pair_compression_is_kron():
    phi = Conj(Blaschke(2, 1, half)) * Blaschke(2, 2, third)
    M = compression(phi, DegreeBox((3, 3)), 1e-13).M
    T1 = toeplitz_1d(lambda k: np.conj(blaschke_hat(0.5, -k)), 4)
    T2 = toeplitz_1d(lambda k: blaschke_hat(1 / 3, k), 4)
    np.testing.assert_allclose(M, np.kron(T1, T2), atol=1e-12)


@given(terms, st.tuples(st.integers(0, 3), st.integers(0, 3)))
def test_apply_exact_matches_matrix(t, k):
    p = LaurentPoly(2, t)
    g = toeplitz_apply_exact(p, LaurentPoly.monomial(k))
    box = DegreeBox((6, 6))
    col = compression(Laurent(p), box).M[:, box.position(k)]
    for j, c in g.terms:
        assert col[box.position(j)] == complex(c)
    assert np.count_nonzero(col) == len(g)


def test_apply_exact_rejects_non_analytic_vector():
    with pytest.raises(InvalidInput):
        toeplitz_apply_exact(LaurentPoly.monomial((1,)), LaurentPoly.monomial((-1,)))


@given(terms)
def test_gram_exact_equals_large_box_products(t):
    """Gram compressions are the corners of products of large compressions."""
    p = LaurentPoly(2, t)
    d, big = DegreeBox((2, 2)), (6, 6)
    M = toeplitz_from_coeffs({k: complex(c) for k, c in p.terms}, big)
    idx = [box_indices(big).index(k) for k in d.monomials()]
    first = (M.conj().T @ M)[np.ix_(idx, idx)]
    second = (M @ M.conj().T)[np.ix_(idx, idx)]
    np.testing.assert_allclose(gram_compression(p, p, d, "adjoint_first"), first, atol=1e-12)
    np.testing.assert_allclose(gram_compression(p, p, d, "adjoint_second"), second, atol=1e-12)


def test_gram_mixed_pair_and_bad_kind():
    phi, psi = LaurentPoly.monomial((1,)), LaurentPoly(1, {(0,): 1, (-1,): 1})
    G = gram_compression_exact(phi, psi, DegreeBox((2,)), "adjoint_first")
    # <P(z^{k+1}), P(z^j + z^{j-1})> = [k+1 == j] + [k+1 == j-1]
    for j in range(3):
        for k in range(3):
            assert G[j][k] == int(k + 1 == j) + int(k + 2 == j)
    with pytest.raises(InvalidInput):
        gram_compression_exact(phi, psi, DegreeBox((2,)), "sideways")


def test_pi_residual_exact_monomial():
    r, leak = pi_residual(Monomial((-1, 1)), DegreeBox((2, 2)), DegreeBox((8, 8)))
    assert r == 0.0
    assert leak < 1e-12


def test_pi_residual_blaschke_pair_converged():
    phi = Conj(Blaschke(2, 1, half)) * Blaschke(2, 2, third)
    r, leak = pi_residual(phi, DegreeBox((3, 3)), DegreeBox((32, 32)))
    assert r <= 1e-12
    assert leak <= 1e-8


MIXED_FLOOR = 0.2160830732178019  # d=3 corner of T T* T - T from a 400x400 direct matrix


def test_pi_residual_mixed_floor():
    phi = Conj(Monomial((1,))) * Blaschke(1, 1, half)
    r, leak = pi_residual(phi, DegreeBox((3,)), DegreeBox((64,)))
    assert r == pytest.approx(MIXED_FLOOR, abs=1e-9)
    assert leak < 1e-9


@pytest.mark.parametrize("D", [4, 6, 10])
def test_leakage_bound_is_honest_1d(D):
    """Corner at small D vs a 400x400 reference for T T* T."""
    phi = Conj(Monomial((1,))) * Blaschke(1, 1, half)
    d = DegreeBox((2,))
    f = ToeplitzFactor(phi, DegreeBox((D,)), 1e-12)
    word = [(f, False), (f, True), (f, False)]
    C, leak = corner_combination([(1.0, word)], d, DegreeBox((D,)))
    T = toeplitz_1d(lambda k: blaschke_hat(0.5, k + 1), 400)
    ref = (T @ T.conj().T @ T)[:3, :3]
    err = np.linalg.norm(C - ref, 2)
    assert err <= leak
    assert leak < 10


@pytest.mark.parametrize("D", [5, 8])
def test_leakage_bound_is_honest_2d(D, blaschke_pair):
    d = DegreeBox((1, 1))
    f = ToeplitzFactor(blaschke_pair, DegreeBox((D, D)), 1e-12)
    word = [(f, False), (f, True), (f, False), (f, True)]
    C, leak = corner_combination([(1.0, word)], d, DegreeBox((D, D)))
    N = 40
    T1 = toeplitz_1d(lambda k: np.conj(blaschke_hat(0.5, -k)), N)
    T2 = toeplitz_1d(lambda k: blaschke_hat(1 / 3, k), N)
    T = np.kron(T1, T2)
    idx = [i * N + j for i in range(2) for j in range(2)]
    ref = (T @ T.conj().T @ T @ T.conj().T)[np.ix_(idx, idx)]
    assert np.linalg.norm(C - ref, 2) <= leak


def test_monomial_compression_is_partial_permutation():
    M = compression(Monomial((-1, 1)), DegreeBox((2, 2))).M
    np.testing.assert_array_equal(M, monomial_matrix((-1, 1), (2, 2)))


def test_suggest_outer_box():
    phi = Conj(Blaschke(2, 1, half)) * Blaschke(2, 2, third)
    D = suggest_outer_box(phi, DegreeBox((3, 3)))
    assert DegreeBox((3, 3)) <= D
    r, leak = pi_residual(phi, DegreeBox((3, 3)), D)
    assert leak < 1e-8
    assert suggest_outer_box(Monomial((2,)), DegreeBox((3,))).d == (9,)
