import math
from math import comb

import numpy as np
import pytest

from fcireduce import (
    NaturalBasis,
    Seed,
    correlation_entropy,
    descending_eigenbasis,
    make_tensor,
    natural_basis,
    random_tensor,
    retained_weight,
    subset_contributions,
    truncated_rdm1,
    truncated_rdm2,
)

from oracles import dense_rdm1, dense_rdm2, dense_tensor


def test_rdm1_full_basis_example(t_overlap):
    g = truncated_rdm1(t_overlap, 3)
    want = np.array([
        [0.64, 0.0, -0.48],
        [0.0, 1.0, 0.0],
        [-0.48, 0.0, 0.36],
    ])
    np.testing.assert_allclose(g.matrix, want, atol=1e-15)


def test_rdm1_truncated_example(t_overlap):
    # with the internal index restricted to {1, 2}, orbital 2 loses the
    # contribution it picked up from the (2, 3) determinant
    g = truncated_rdm1(t_overlap, 2)
    np.testing.assert_allclose(g.matrix[0, 0], 0.64, atol=1e-15)
    np.testing.assert_allclose(g.matrix[1, 1], 0.64, atol=1e-15)
    np.testing.assert_allclose(g.matrix[2, 2], 0.36, atol=1e-15)
    np.testing.assert_allclose(g.matrix[0, 2], -0.48, atol=1e-15)
    assert g.m == 2


@pytest.mark.parametrize("M,N", [(5, 2), (6, 3), (6, 4)])
def test_rdm1_matches_dense_contraction(M, N):
    t = random_tensor(M, N, Seed(1200 + M + N))
    c = dense_tensor(t)
    for m in range(N, M + 1):
        g = truncated_rdm1(t, m)
        np.testing.assert_allclose(g.matrix, dense_rdm1(c, m), atol=1e-13)


def test_rdm1_kept_trace_is_n_times_retained_weight():
    t = random_tensor(7, 3, Seed(52))
    for m in range(3, 8):
        g = truncated_rdm1(t, m)
        np.testing.assert_allclose(
            np.trace(g.matrix[:m, :m]), 3 * retained_weight(t, m), rtol=1e-13)
        np.testing.assert_allclose(g.matrix, g.matrix.T, atol=1e-15)


def test_rdm1_is_positive_semidefinite():
    t = random_tensor(7, 4, Seed(53))
    for m in (4, 5, 7):
        vals = np.linalg.eigvalsh(truncated_rdm1(t, m).matrix)
        assert vals.min() > -1e-12


def test_rdm1_m_range(t_overlap):
    with pytest.raises(ValueError):
        truncated_rdm1(t_overlap, 1)
    with pytest.raises(ValueError):
        truncated_rdm1(t_overlap, 4)


@pytest.mark.parametrize("M,N", [(5, 2), (6, 3), (6, 4)])
def test_rdm2_matches_dense_contraction(M, N):
    t = random_tensor(M, N, Seed(2400 + M + N))
    c = dense_tensor(t)
    for m in (N, M - 1, M):
        G = truncated_rdm2(t, m)
        assert G.pair_stack.shape == (comb(m, N - 2), M, M)
        np.testing.assert_allclose(G.to_array(), dense_rdm2(c, m), atol=1e-13)


def test_rdm2_sheets_are_antisymmetric():
    t = random_tensor(6, 3, Seed(71))
    G = truncated_rdm2(t, 5)
    for sheet in G.pair_stack:
        np.testing.assert_allclose(sheet, -sheet.T, atol=1e-15)


def test_rdm2_element_agrees_with_dense_array():
    t = random_tensor(5, 3, Seed(72))
    G = truncated_rdm2(t, 4)
    arr = G.to_array()
    rng = np.random.default_rng(0)
    for _ in range(20):
        k, l, b, a = rng.integers(0, 5, size=4)
        np.testing.assert_allclose(G.element(k, l, b, a), arr[k, l, b, a],
                                   atol=1e-15)


def test_rdm2_partial_trace_recovers_rdm1():
    t = random_tensor(6, 4, Seed(73))
    for m in (4, 5, 6):
        G = truncated_rdm2(t, m)
        g = truncated_rdm1(t, m)
        np.testing.assert_allclose(G.partial_trace(), 3 * g.matrix, atol=1e-13)


def test_rdm2_two_particle_case_is_rank_one_in_sheets(t_overlap):
    G = truncated_rdm2(t_overlap, 3)
    assert G.pair_stack.shape == (1, 3, 3)
    sheet = G.pair_stack[0]
    np.testing.assert_allclose(sheet[0, 1], 0.8, atol=1e-15)
    np.testing.assert_allclose(sheet[1, 2], 0.6, atol=1e-15)
    np.testing.assert_allclose(sheet[1, 0], -0.8, atol=1e-15)


def test_rdm2_validation(t_overlap):
    with pytest.raises(ValueError, match="two particles"):
        truncated_rdm2(make_tensor(3, 1, {(1,): 1.0}), 2)
    with pytest.raises(ValueError, match="m must lie"):
        truncated_rdm2(t_overlap, 1)


def test_descending_eigenbasis_orders_and_reconstructs():
    rng = np.random.default_rng(14)
    a = rng.standard_normal((6, 6))
    mat = a + a.T
    vals, vecs = descending_eigenbasis(mat)
    assert np.all(np.diff(vals) <= 0)
    np.testing.assert_allclose(vecs @ np.diag(vals) @ vecs.T, mat, atol=1e-12)
    for j in range(6):
        col = vecs[:, j]
        assert col[np.argmax(np.abs(col))] > 0


def test_descending_eigenbasis_degenerate_tiebreak():
    # identical eigenvalues: columns must come out ordered by anchor row
    vals, vecs = descending_eigenbasis(np.eye(4))
    np.testing.assert_allclose(vals, np.ones(4))
    np.testing.assert_allclose(vecs, np.eye(4), atol=1e-15)

    vals, vecs = descending_eigenbasis(np.diag([0.0, 1.0, 1.0]))
    np.testing.assert_allclose(vals, [1.0, 1.0, 0.0])
    np.testing.assert_allclose(np.abs(vecs[:, 0]), [0, 1, 0], atol=1e-15)
    np.testing.assert_allclose(np.abs(vecs[:, 1]), [0, 0, 1], atol=1e-15)


def test_natural_basis_example(t_overlap):
    nb = natural_basis(truncated_rdm1(t_overlap, 3))
    assert isinstance(nb, NaturalBasis)
    np.testing.assert_allclose(nb.occupations, [1.0, 1.0, 0.0], atol=1e-15)
    # the doubly occupied eigenspace is degenerate, so only its span is
    # pinned down; the empty natural orbital is unique up to sign
    v = nb.orbitals
    occupied_projector = v[:, :2] @ v[:, :2].T
    want = np.eye(3) - np.outer([0.6, 0.0, 0.8], [0.6, 0.0, 0.8])
    np.testing.assert_allclose(occupied_projector, want, atol=1e-14)
    np.testing.assert_allclose(v[:, 2], [0.6, 0.0, 0.8], atol=1e-14)


def test_natural_basis_is_deterministic(t_overlap):
    a = natural_basis(truncated_rdm1(t_overlap, 3))
    b = natural_basis(truncated_rdm1(t_overlap, 3))
    np.testing.assert_array_equal(a.occupations, b.occupations)
    np.testing.assert_array_equal(a.orbitals, b.orbitals)


def test_natural_basis_accepts_plain_matrix():
    nb = natural_basis(np.diag([0.25, 0.75]))
    np.testing.assert_allclose(nb.occupations, [0.75, 0.25])
    with pytest.raises(ValueError, match="symmetric"):
        natural_basis(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_full_basis_occupations_sum_to_particle_number():
    t = random_tensor(7, 3, Seed(90))
    nb = natural_basis(truncated_rdm1(t, 7))
    np.testing.assert_allclose(nb.occupations.sum(), 3.0, rtol=1e-13)
    assert nb.occupations.min() > -1e-12
    assert nb.occupations.max() < 1.0 + 1e-12


def test_correlation_entropy_values():
    assert correlation_entropy([1.0, 1.0, 0.0]) == 0.0
    # evenly spread occupations: S = ln(M / N)
    np.testing.assert_allclose(
        correlation_entropy([0.5] * 6), math.log(2.0), rtol=1e-14)
    np.testing.assert_allclose(
        correlation_entropy([0.5, 0.5], num_particles=1),
        math.log(2.0), rtol=1e-14)


def test_correlation_entropy_validation():
    with pytest.raises(ValueError, match="0, 1"):
        correlation_entropy([1.5, 0.5])
    with pytest.raises(ValueError, match="0, 1"):
        correlation_entropy([-0.5, 0.5])
    with pytest.raises(ValueError, match="positive"):
        correlation_entropy([0.0, 0.0])
    # tiny negative values from eigensolvers are clipped, not rejected
    assert correlation_entropy([1.0, -1e-12, 1.0]) == 0.0


def test_subset_contributions_examples(t_overlap):
    got = subset_contributions(t_overlap, {1})
    np.testing.assert_allclose(got[(1,)], 0.64)
    np.testing.assert_allclose(got[()], 0.36)

    got = subset_contributions(t_overlap, {1, 3})
    assert set(got) == {(), (1,), (3,), (1, 3)}
    np.testing.assert_allclose(got[(1,)], 0.64)
    np.testing.assert_allclose(got[(3,)], 0.36)
    assert got[()] == 0.0 and got[(1, 3)] == 0.0


def test_subset_contributions_sum_to_one():
    t = random_tensor(6, 3, Seed(61))
    got = subset_contributions(t, (2, 4, 5))
    assert len(got) == 8
    np.testing.assert_allclose(sum(got.values()), 1.0, rtol=1e-14)
    assert all(v >= 0.0 for v in got.values())
    with pytest.raises(ValueError, match="1..M"):
        subset_contributions(t, {0, 2})
