import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coneeig.approx import approx_eigendecompose
from coneeig.cone import (
    BlockSplit,
    SearchConfig,
    VerifyConfig,
    EigenEnclosure,
    b_epsilon,
    check_condition,
    co_bound,
    enclose_eigenvector,
    epsilon_search,
    ex_bound,
    is_dominating,
    rayleigh_enclosure,
    rnorm,
    similarity,
    verify_all,
)
from coneeig.errors import ExBoundUnavailable, VerificationFailure
from coneeig.interval import CInterval, Interval
from coneeig.linalg import IMatrix, IVector, mat_mul, sup_norm
from oracles import certified_representative, enclosure_holds, mp_eigs, vector_in_box

A3 = [[2, 1.5], [1, 5]]
A4 = [["1", "0.4", "0.5"], ["0.4", "4", "0.4"], ["0.5", "0.4", "8"]]
S11 = BlockSplit.leading(1, 2)
S12 = BlockSplit.leading(1, 3)


# -- block bounds -------------------------------------------------------------


def test_split_validation():
    with pytest.raises(ValueError):
        BlockSplit((), (0, 1))
    with pytest.raises(ValueError):
        BlockSplit((0,), (2,))
    with pytest.raises(ValueError):
        co_bound(np.eye(3), S11)
    assert BlockSplit.around(1, 3) == BlockSplit((1,), (0, 2))


def test_small_example_bounds():
    assert co_bound(A3, S11) == 3.5
    assert 4 - 1e-12 <= ex_bound(A3, S11) <= 4
    assert is_dominating(A3, S11).satisfied


def test_three_by_three_example_bounds():
    co = co_bound(A4, S12, "1.1")
    ex = ex_bound(A4, S12, "1.1")
    assert Fraction(20, 11) <= Fraction(co) <= Fraction(18182, 10000)
    exact = Fraction(3184, 840) - Fraction(55, 100)
    assert Fraction(3240, 1000) <= Fraction(ex) <= exact
    assert is_dominating(A4, S12, "1.1").satisfied


def test_diagonal_bounds():
    d = np.diag([1.0, 5.0])
    assert co_bound(d, S11) == 1.0
    # 1/5 is not a float, so the reciprocal of its enclosure's upper end sits just below 5
    assert 5.0 - 4 * math.ulp(5.0) <= ex_bound(d, S11) <= 5.0


def test_identity_is_not_dominating():
    rep = is_dominating(np.eye(3), S12)
    assert rep.co_bound == 1.0 and rep.ex_bound == 1.0
    assert not rep.satisfied and rep.reason


def test_ex_bound_clamps_and_reports():
    a = [[1, 0], [10, 0.5]]
    assert ex_bound(a, S11) == 0.0
    assert "vacuous" in is_dominating(a, S11).reason
    singular = [[1, 0, 0], [0, 1, 1], [0, 1, 1]]
    with pytest.raises(ExBoundUnavailable):
        ex_bound(singular, S12)
    rep = is_dominating(singular, S12)
    assert not rep.satisfied and "invert" in rep.reason


def test_rnorm_examples():
    assert rnorm(A3, S11) == 6.0
    assert rnorm(np.zeros((3, 3)), S12, 2.0) == 0.0


def _scaled(a, split, r):
    # R A R^-1 with R = diag(1 on E1, r on E2); r is a power of two so this is exact
    d = np.ones(a.shape[0])
    d[list(split.second)] = r
    return a * d[:, None] / d[None, :]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(-6, 6))
def test_rnorm_is_scaled_sup_norm_for_single_coordinates(seed, e):
    a = np.random.default_rng(seed).uniform(-1, 1, (2, 2))
    r = 2.0**e
    got = rnorm(a, S11, r)
    ref = sup_norm(IMatrix.from_point(_scaled(a, S11, r)))
    assert abs(got - ref) <= 4 * math.ulp(max(got, ref))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6), st.integers(-6, 6))
def test_rnorm_bounds_scaled_sup_norm_for_blocks(seed, n, e):
    rng = np.random.default_rng(seed)
    a = rng.uniform(-1, 1, (n, n))
    split = BlockSplit.leading(int(rng.integers(1, n)), n)
    r = 2.0**e
    # both are upper bounds on sums taken in different groupings
    got = rnorm(a, split, r)
    assert got >= sup_norm(IMatrix.from_point(_scaled(a, split, r))) - 4 * math.ulp(got)


# -- pipeline pieces ------------------------------------------------------------


def test_similarity_with_identity():
    a = IMatrix.hull(A4)
    j, pinv = similarity(a, np.eye(3))
    assert j == a and pinv == IMatrix.identity(3)


def test_similarity_with_permutation():
    j, _ = similarity(np.diag([1.0, 2.0]), [[0, 1], [1, 0]])
    assert j.contains(np.diag([2.0, 1.0]))


def test_similarity_of_eigenbasis_is_nearly_diagonal():
    a = IMatrix.hull(A4)
    s = approx_eigendecompose(a.mid())
    j, _ = similarity(a, s.vectors)
    mags = np.maximum(np.abs(j.re_lo), np.abs(j.re_hi)) + np.maximum(np.abs(j.im_lo), np.abs(j.im_hi))
    assert (mags[~np.eye(3, dtype=bool)] <= 1e-6).all()


def test_similarity_of_singular_basis_fails():
    with pytest.raises(VerificationFailure):
        similarity(np.eye(2), [[1, 1], [1, 1]])


@pytest.mark.parametrize("eps", [2.0**-10, 0.3, 1.0])
def test_b_epsilon_of_diagonal(eps):
    b = b_epsilon(IMatrix.from_point(np.diag([2.0, 7.0])), 0, 2.0, eps)
    assert b == IMatrix.from_point(np.diag([0.0, 5.0]))


def test_b_epsilon_scaling_law():
    rng = np.random.default_rng(2)
    m = rng.uniform(-1, 1, (4, 4)) + 1j * rng.uniform(-1, 1, (4, 4))
    eps, k, lam = 2.0**-8, 2, 0.5 + 0.25j
    b = b_epsilon(IMatrix.from_point(m), k, lam, eps).mid()
    shifted = m - lam * np.eye(4)
    for i in range(4):
        for l in range(4):
            f = eps if i == k and l != k else (1 / eps if l == k and i != k else 1.0)
            assert b[i, l] == shifted[i, l] * f


def _triple(j, k, lam, eps):
    n = j.rows
    d = np.full(n, eps)
    d[k] = 1.0
    # 1/eps enclosed from its exact rational value
    inv = [Fraction(1) if i == k else 1 / Fraction(eps) for i in range(n)]
    dinv = IMatrix.hull([[inv[i] if i == l else 0 for l in range(n)] for i in range(n)])
    eye = np.eye(n)
    shifted = IMatrix(
        j.re_lo - lam.real * eye,
        j.re_hi - lam.real * eye,
        j.im_lo - lam.imag * eye,
        j.im_hi - lam.imag * eye,
    )
    return mat_mul(mat_mul(dinv, shifted), IMatrix.from_point(np.diag(d)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 5), st.integers(1, 40), st.data())
def test_b_epsilon_matches_triple_product(seed, n, e, data):
    rng = np.random.default_rng(seed)
    k = data.draw(st.integers(0, n - 1))
    # dyadic entries keep the explicit shift exact, so both routes see the same matrix
    m = np.round(rng.uniform(-1, 1, (n, n)) * 64) / 64
    j = IMatrix.from_point(m + 0.5j * np.eye(n))
    lam = complex(0.25, 0.5)
    eps = 2.0**-e
    b = b_epsilon(j, k, lam, eps)
    t = _triple(j, k, lam, eps)
    assert b.encloses(t) and t.encloses(b)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-6, 0.9))
def test_b_epsilon_inside_triple_product_for_any_eps(seed, eps):
    m = np.round(np.random.default_rng(seed).uniform(-1, 1, (3, 3)) * 64) / 64
    j = IMatrix.from_point(m)
    assert _triple(j, 1, 0j, eps).encloses(b_epsilon(j, 1, 0j, eps))


def test_b_epsilon_rejects_bad_arguments():
    with pytest.raises(ValueError):
        b_epsilon(np.eye(2), 0, 0, 0.0)
    with pytest.raises(IndexError):
        b_epsilon(np.eye(2), 2, 0, 0.5)


def test_check_condition_examples():
    rep = check_condition(np.diag([0.0, 3.0]), 0)
    assert rep.satisfied and rep.lhs == 0.0
    assert 3.0 - 4 * math.ulp(3.0) <= rep.ex_bound <= 3.0
    rep = check_condition([["0.1", "0.2"], ["0.3", "2"]], 0)
    assert rep.satisfied
    assert Fraction(3, 10) <= Fraction(rep.lhs) <= Fraction(3, 10) + Fraction(1, 10**15)
    assert Fraction(17, 10) - Fraction(1, 10**15) <= Fraction(rep.ex_bound) <= Fraction(17, 10)
    rep = check_condition(np.eye(2), 0)
    assert not rep.satisfied and rep.lhs == 1.0 and rep.ex_bound == 1.0


def test_check_condition_singular_block():
    rep = check_condition(np.zeros((3, 3)), 0)
    assert not rep.satisfied and "invertible" in rep.reason


def test_search_on_separated_diagonal_reaches_eps_min():
    cfg = SearchConfig()
    eps, rep = epsilon_search(IMatrix.from_point(np.diag([1.0, 3.0])), 0, 1.0, cfg)
    assert eps == cfg.eps_min and rep.satisfied


def test_search_fails_on_jordan_block():
    with pytest.raises(VerificationFailure) as info:
        epsilon_search(IMatrix.from_point([[1.0, 1.0], [0.0, 1.0]]), 0, 1.0)
    assert info.value.k == 0


def test_search_ascends_when_start_fails():
    j = IMatrix.from_point([[0.0, 1.0], [0.3, 2.0]])
    cfg = SearchConfig(eps_start=2.0**-8)
    eps, rep = epsilon_search(j, 0, 0.0, cfg)
    assert rep.satisfied and eps > cfg.eps_start
    assert check_condition(b_epsilon(j, 0, 0.0, eps), 0).satisfied


def test_refine_never_loosens():
    a = np.random.default_rng(11).uniform(-1, 1, (5, 5))
    base = verify_all(a)
    fine = verify_all(a, VerifyConfig(search=SearchConfig(refine=True)))
    for x, y in zip(base, fine):
        assert y.epsilon <= x.epsilon


def test_search_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(factor=1.5)
    with pytest.raises(ValueError):
        SearchConfig(eps_start=1.0, eps_max=0.5)


def test_eigenvector_box_with_identity_basis():
    eps = 2.0**-10
    v = enclose_eigenvector(np.eye(3), 0, eps)
    assert v[0] == CInterval(Interval(1, 1), Interval(0, 0))
    for i in (1, 2):
        assert v[i] == CInterval(Interval(-eps, eps), Interval(-eps, eps))


def test_eigenvector_box_degenerates_to_column():
    p = approx_eigendecompose(np.random.default_rng(5).uniform(-1, 1, (4, 4))).vectors
    v = enclose_eigenvector(p, 2, 2.0**-1074)
    assert v.contains(p[:, 2])
    # only the rounding of the point products remains
    assert (v.radius() <= 4 * np.spacing(np.abs(p).max(axis=1))).all()


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 30), st.integers(1, 10))
def test_eigenvector_box_monotone_in_eps(seed, e, gap):
    p = np.random.default_rng(seed).uniform(-1, 1, (4, 4))
    small = enclose_eigenvector(p, 1, 2.0 ** -(e + gap))
    big = enclose_eigenvector(p, 1, 2.0**-e)
    assert big.encloses(small)


def test_rayleigh_examples():
    x = IVector.from_point([1.0, 0.0])
    assert rayleigh_enclosure(np.diag([2.0, 3.0]), x) == CInterval(Interval(2, 2), Interval(0, 0))
    assert 1j in rayleigh_enclosure(np.array([[1j]]), IVector.from_point([1.0]))


def test_rayleigh_zero_denominator():
    from coneeig.errors import ZeroDenominator

    with pytest.raises(ZeroDenominator):
        rayleigh_enclosure(np.eye(2), IVector([-1.0, 0.0], [1.0, 0.0], [0.0, 0.0], [0.0, 0.0]))


# -- whole pipeline -------------------------------------------------------------


def test_verify_diagonal():
    res = verify_all(np.diag([1.0, 2.0, 3.0]))
    cfg = SearchConfig()
    for r in res:
        assert isinstance(r, EigenEnclosure)
        assert r.epsilon == cfg.eps_min
        e = np.zeros(3)
        e[int(round(r.lambda_tilde.real)) - 1] = 1.0
        assert r.vector.contains(e)
    assert sorted(round(r.lambda_tilde.real) for r in res) == [1, 2, 3]


def test_verify_jordan_block_fails_everywhere():
    res = verify_all([[2.0, 1.0, 0.0], [0.0, 2.0, 1.0], [0.0, 0.0, 2.0]])
    assert len(res) == 3 and all(isinstance(r, VerificationFailure) for r in res)
    assert [r.k for r in res] == [0, 1, 2]


def test_verify_scalar():
    (r,) = verify_all([["0.1"]])
    assert Fraction(1, 10) in r.value.re


def test_verify_indices():
    a = np.random.default_rng(0).uniform(-1, 1, (4, 4))
    full = verify_all(a)
    (one,) = verify_all(a, indices=[2])
    assert one.k == 2 and one.value == full[2].value
    with pytest.raises(IndexError):
        verify_all(a, indices=[4])
    with pytest.raises(ValueError):
        verify_all(np.ones((2, 3)))


def test_cone_membership_of_three_by_three_example():
    # the eigenvector for the smallest eigenvalue satisfies max(|x2|, |x3|) <= 10/11 |x1|
    a = IMatrix.hull(A4)
    x_ref = [mp.mpf("-15.686641"), mp.mpf("1.9070447"), mp.mpf(1)]
    assert max(abs(x_ref[1]), abs(x_ref[2])) <= mp.mpf(10) / 11 * abs(x_ref[0])
    res = verify_all(a)
    enc = min(res, key=lambda r: abs(r.lambda_tilde))
    lam, v = min(mp_eigs([[float(x) for x in row] for row in [[1, 0.4, 0.5], [0.4, 4, 0.4], [0.5, 0.4, 8]]]), key=lambda p: abs(p[0]))
    assert enclosure_holds(enc, lam, v)
    x, _ = certified_representative(enc, v)
    assert vector_in_box(x, enc.vector)
    assert max(abs(x[1]), abs(x[2])) <= mp.mpf(10) / 11 * abs(x[0])
    # the representative is parallel to the closed-form direction
    ratio = [x[i] / x[2] for i in range(3)]
    assert all(abs(ratio[i] - x_ref[i]) < 1e-6 for i in range(3))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_threads_match_sequential(seed, n):
    a = np.random.default_rng(seed).uniform(-1, 1, (n, n))
    seq = verify_all(a, VerifyConfig(threads=1))
    par = verify_all(a, VerifyConfig(threads=4))
    for x, y in zip(seq, par):
        assert type(x) is type(y)
        if isinstance(x, EigenEnclosure):
            assert x.epsilon == y.epsilon and x.value == y.value and x.vector == y.vector


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_verify_is_deterministic(seed):
    a = np.random.default_rng(seed).uniform(-1, 1, (4, 4))
    r1, r2 = verify_all(a), verify_all(a)
    for x, y in zip(r1, r2):
        if isinstance(x, EigenEnclosure):
            assert x.value == y.value and x.vector == y.vector
