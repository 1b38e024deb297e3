import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from deflated_heteropca.errors import ContractError, DimensionError, SingularityError
from deflated_heteropca.linalg import (
    diag_project,
    dist_spectral,
    dist_two_inf,
    incoherence,
    offdiag_project,
    optimal_rotation,
    orthonormality_error,
    sign_matrix,
    thin_svd,
    top_r_eigs,
)

from .helpers import random_orthogonal, random_orthonormal, subspace_gap

seeds = st.integers(0, 2**32 - 1)


# projections

def test_diag_project_examples():
    assert np.array_equal(diag_project([[1, 2], [3, 4]]), [[1, 0], [0, 4]])
    assert np.array_equal(diag_project(np.eye(5)), np.eye(5))
    assert np.array_equal(diag_project([[0, 5], [7, 0]]), np.zeros((2, 2)))


def test_offdiag_project_examples():
    assert np.array_equal(offdiag_project([[1, 2], [3, 4]]), [[0, 2], [3, 0]])
    assert np.array_equal(offdiag_project(np.eye(4)), np.zeros((4, 4)))


def test_projections_reject_non_square():
    with pytest.raises(DimensionError):
        diag_project(np.ones((2, 3)))
    with pytest.raises(DimensionError):
        offdiag_project(np.ones((3, 2)))


@given(seed=seeds, n=st.integers(1, 12))
def test_partition_and_idempotence(seed, n):
    rng = np.random.default_rng(seed)
    M = rng.standard_normal((n, n)) * 10.0 ** rng.integers(-5, 5)
    D, O = diag_project(M), offdiag_project(M)
    assert np.array_equal(D + O, M)
    assert np.array_equal(diag_project(D), D)
    assert np.array_equal(offdiag_project(O), O)
    assert np.array_equal(diag_project(O), np.zeros_like(M))
    # bit-exact subtraction
    assert np.array_equal(O, M - D)


# top_r_eigs

def test_top_r_eigs_diagonal():
    res = top_r_eigs(np.diag([5.0, -3.0, 1.0]), 2)
    assert np.array_equal(res.values, [5.0, -3.0])
    assert np.array_equal(res.basis, np.eye(3)[:, :2])


def test_top_r_eigs_two_by_two_closed_form():
    res = top_r_eigs([[0, 0.5], [0.5, 0]], 1)
    assert res.values[0] == pytest.approx(0.5, abs=1e-15)
    assert np.allclose(res.basis[:, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


def test_top_r_eigs_full_rank_residual():
    A = np.random.default_rng(1).standard_normal((8, 8))
    M = A + A.T
    res = top_r_eigs(M, 8)
    assert np.linalg.norm(res.reconstruct() - M, 2) <= 1e-9


def test_top_r_eigs_tie_order():
    # equal magnitudes: positive first, then index order
    res = top_r_eigs(np.diag([-2.0, 2.0, 1.0, -2.0]), 3)
    assert np.array_equal(res.values, [2.0, -2.0, -2.0])
    assert np.array_equal(np.abs(res.basis).argmax(axis=0), [1, 0, 3])


def test_top_r_eigs_errors():
    with pytest.raises(ContractError):
        top_r_eigs([[1.0, 2.0], [0.0, 1.0]], 1)
    with pytest.raises(DimensionError):
        top_r_eigs(np.eye(3), 0)
    with pytest.raises(DimensionError):
        top_r_eigs(np.eye(3), 4)
    with pytest.raises(DimensionError):
        top_r_eigs(np.ones((2, 3)), 1)


def test_top_r_eigs_symmetrizes_within_tolerance():
    A = np.random.default_rng(2).standard_normal((6, 6))
    M = A + A.T
    M[0, 1] += 1e-14
    res = top_r_eigs(M, 2)
    assert orthonormality_error(res.basis) <= 1e-12


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(2, 50), data=st.data())
def test_top_r_eigs_residual_matches_next_eigenvalue(seed, n, data):
    r = data.draw(st.integers(1, n - 1))
    A = np.random.default_rng(seed).standard_normal((n, n))
    M = A + A.T
    res = top_r_eigs(M, r)
    # full-decomposition oracle via singular values of M (|eigenvalues| of symmetric M)
    sv = np.linalg.svd(M, compute_uv=False)
    resid = np.linalg.svd(M - res.reconstruct(), compute_uv=False)[0]
    assert abs(resid - sv[r]) <= 1e-8 * max(1.0, sv[0])
    assert np.all(np.diff(np.abs(res.values)) <= 0)
    assert orthonormality_error(res.basis) <= 1e-10


def test_sign_convention_dominant_entry_positive():
    A = np.random.default_rng(3).standard_normal((7, 7))
    res = top_r_eigs(A + A.T, 7)
    V = res.basis
    lead = np.abs(V).argmax(axis=0)
    assert np.all(V[lead, np.arange(7)] > 0)
    assert np.array_equal(top_r_eigs(A + A.T, 7).basis, V)


# thin_svd

def test_thin_svd_diag_embedded():
    M = np.zeros((2, 4))
    M[0, 0], M[1, 1] = 3.0, 2.0
    _, s, _ = thin_svd(M, 2)
    assert np.allclose(s, [3.0, 2.0], rtol=0, atol=1e-15)


def test_thin_svd_rank_one():
    rng = np.random.default_rng(4)
    u = rng.standard_normal(5)
    u /= np.linalg.norm(u)
    v = rng.standard_normal(7)
    v /= np.linalg.norm(v)
    L, s, R = thin_svd(2.5 * np.outer(u, v), 1)
    assert s[0] == pytest.approx(2.5, rel=1e-14)
    sign = np.sign(L[:, 0] @ u)
    assert np.allclose(L[:, 0], sign * u, atol=1e-14)
    assert np.allclose(R[:, 0], sign * v, atol=1e-14)


def test_thin_svd_matches_gram_eigenspace():
    M = np.random.default_rng(5).standard_normal((6, 9))
    L, s, R = thin_svd(M, 3)
    # independent oracle: eigenvectors of M M^T
    w, V = np.linalg.eigh(M @ M.T)
    Vtop = V[:, np.argsort(w)[::-1][:3]]
    assert subspace_gap(L, Vtop) <= 1e-8
    assert orthonormality_error(L) <= 1e-12 and orthonormality_error(R) <= 1e-12


def test_thin_svd_errors():
    with pytest.raises(DimensionError):
        thin_svd(np.ones((3, 4)), 4)
    with pytest.raises(DimensionError):
        thin_svd(np.ones((3, 4)), 0)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n1=st.integers(2, 20), n2=st.integers(2, 20), data=st.data())
def test_thin_svd_reconstruction_error_is_next_singular_value(seed, n1, n2, data):
    r = data.draw(st.integers(1, min(n1, n2)))
    M = np.random.default_rng(seed).standard_normal((n1, n2))
    L, s, R = thin_svd(M, r)
    full = np.linalg.svd(M, compute_uv=False)
    nxt = full[r] if r < full.size else 0.0
    err = np.linalg.norm(M - (L * s) @ R.T, 2)
    assert abs(err - nxt) <= 1e-10 * full[0]
    assert np.all(np.diff(s) <= 0) and np.all(s >= 0)


@settings(max_examples=40, deadline=None)
@given(seed=seeds, n1=st.integers(3, 15), extra=st.integers(0, 15), data=st.data())
def test_thin_svd_gram_consistency(seed, n1, extra, data):
    n2 = n1 + extra
    r = data.draw(st.integers(1, n1 - 1))
    Y = np.random.default_rng(seed).standard_normal((n1, n2))
    sv = np.linalg.svd(Y, compute_uv=False)
    if sv[r - 1] - sv[r] < 1e-6 * sv[0]:
        return
    L = thin_svd(Y, r)[0]
    G = top_r_eigs(Y @ Y.T, r).basis
    assert subspace_gap(L, G) <= 1e-8


# sign_matrix / rotations / distances

def test_sign_matrix_examples():
    assert np.allclose(sign_matrix(np.eye(3)), np.eye(3), atol=1e-15)
    Q = random_orthogonal(np.random.default_rng(6), 4)
    assert np.allclose(sign_matrix(Q), Q, atol=1e-13)
    assert np.allclose(sign_matrix(np.diag([2.0, -3.0])), np.diag([1.0, -1.0]), atol=1e-15)


def test_sign_matrix_singular():
    with pytest.raises(SingularityError):
        sign_matrix(np.diag([1.0, 0.0]))
    with pytest.raises(SingularityError):
        sign_matrix(np.diag([1.0, 1e-14]))
    with pytest.raises(SingularityError):
        sign_matrix(np.zeros((2, 2)))


@given(seed=seeds, n=st.integers(1, 8))
def test_sign_matrix_is_orthogonal_polar_factor(seed, n):
    H = np.random.default_rng(seed).standard_normal((n, n))
    if np.linalg.cond(H) > 1e8:
        return
    S = sign_matrix(H)
    assert orthonormality_error(S) <= 1e-12
    # polar factor: S^T H symmetric positive definite
    P = S.T @ H
    assert np.allclose(P, P.T, atol=1e-10 * np.abs(H).max())
    assert np.linalg.eigvalsh(0.5 * (P + P.T)).min() > 0


def test_optimal_rotation_examples():
    rng = np.random.default_rng(7)
    Us = random_orthonormal(rng, 10, 3)
    assert np.allclose(optimal_rotation(Us, Us), np.eye(3), atol=1e-14)
    Q = random_orthogonal(rng, 3)
    assert np.allclose(optimal_rotation(Us @ Q, Us), Q.T, atol=1e-13)


def test_optimal_rotation_errors():
    U = np.eye(4)[:, :2]
    with pytest.raises(DimensionError):
        optimal_rotation(U, np.eye(4)[:, :3])
    with pytest.raises(SingularityError):
        optimal_rotation(U, np.eye(4)[:, 2:])


@settings(max_examples=30, deadline=None)
@given(seed=seeds, r=st.integers(1, 5))
def test_procrustes_beats_random_rotations(seed, r):
    rng = np.random.default_rng(seed)
    n = r + 6
    U, Us = random_orthonormal(rng, n, r), random_orthonormal(rng, n, r)
    best = np.linalg.norm(U @ optimal_rotation(U, Us) - Us)
    for _ in range(100):
        Q = random_orthogonal(rng, r)
        assert best <= np.linalg.norm(U @ Q - Us) + 1e-12


def test_distance_examples():
    Us = random_orthonormal(np.random.default_rng(8), 9, 2)
    assert dist_spectral(Us, Us) <= 1e-15
    assert dist_two_inf(Us, Us) <= 1e-15
    u = np.array([[1.0], [0.0], [0.0]])
    v = np.array([[0.0], [1.0], [0.0]])
    assert dist_spectral(u, v) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert dist_spectral(-u, u) <= 1e-15


@settings(max_examples=60, deadline=None)
@given(seed=seeds, n=st.integers(2, 30), data=st.data())
def test_distance_norm_ordering_and_invariance(seed, n, data):
    r = data.draw(st.integers(1, n - 1))
    rng = np.random.default_rng(seed)
    U, Us = random_orthonormal(rng, n, r), random_orthonormal(rng, n, r)
    d2, dinf = dist_spectral(U, Us), dist_two_inf(U, Us)
    assert 0 <= dinf <= d2 + 1e-12
    assert d2 <= math.sqrt(n) * dinf + 1e-12
    assert d2 <= 2 + 1e-12
    Q = random_orthogonal(rng, r)
    assert abs(dist_spectral(U @ Q, Us) - d2) <= 1e-10


# incoherence

def test_incoherence_examples():
    assert incoherence(np.eye(4)[:, :2]) == pytest.approx(2.0)
    H = np.array([[1, 1], [1, -1], [1, 1], [1, -1]]) / 2.0  # all row norms^2 = 1/2 = r/n
    assert incoherence(H) == pytest.approx(1.0)
    U = random_orthonormal(np.random.default_rng(9), 200, 2)
    mu = incoherence(U)
    direct = 200 / 2 * max(float(U[i] @ U[i]) for i in range(200))
    assert mu == pytest.approx(direct, rel=1e-14)
    assert 1 < mu < 100
