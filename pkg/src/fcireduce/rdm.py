"""Truncated reduced density matrices, natural orbitals, entropy, norm splits.

The truncated 1-RDM restricts the internal contraction indices to the m
kept orbitals while keeping the external indices on the full basis:

    g^(m)_{kl} = N sum_{i2..iN <= m} c_{k i2..iN} c_{l i2..iN}.

On ordered-tuple storage this becomes B^T B with B[J, k] the coefficient
of the determinant J + {k} times the insertion sign, J running over the
(N-1)-subsets of the kept orbitals. The kept-block trace of g^(m) equals
N times the retained norm, and its kept-removed cross block is (up to a
constant) the norm's gradient with respect to cross rotations.

The truncated 2-RDM is kept in factored form: one antisymmetric M x M
coefficient sheet A_J per (N-2)-subset J of the kept orbitals, with
G^(m)_{klba} = sum_J A_J[k,l] A_J[a,b]. The full 4-index array is never
materialized unless explicitly requested; the optimizer's Hessian only
contracts sheet blocks.
"""

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .subsets import pair_attach_tables, single_attach_tables


@dataclass(frozen=True)
class TruncatedRDM1:
    m: int
    matrix: np.ndarray  # (M, M) symmetric


@dataclass(frozen=True)
class TruncatedRDM2:
    m: int
    num_orbitals: int
    pair_stack: np.ndarray  # (C(m, N-2), M, M), sheet J antisymmetric

    def element(self, k, l, b, a):
        """G^(m)_{klba} with 0-based orbital indices."""
        return float(self.pair_stack[:, k, l] @ self.pair_stack[:, a, b])

    def to_array(self):
        """Dense (M, M, M, M) array G[k, l, b, a]; meant for small M only."""
        return np.einsum("jkl,jab->klba", self.pair_stack, self.pair_stack)

    def partial_trace(self):
        """(M, M) array sum_{l <= m} G^(m)_{klla}; equals (N-1) g^(m)."""
        kept = self.pair_stack[:, :, :self.m]
        return np.einsum("jkl,jal->ka", kept, kept)


@dataclass(frozen=True)
class NaturalBasis:
    occupations: np.ndarray  # descending
    orbitals: np.ndarray     # columns, same order


def truncated_rdm1(t, m):
    if not t.num_particles <= m <= t.num_orbitals:
        raise ValueError(f"m must lie in [{t.num_particles}, {t.num_orbitals}]")
    ranks, signs = single_attach_tables(t.num_orbitals, t.num_particles)
    nj = comb(m, t.num_particles - 1)
    b = signs[:nj, :] * t.coeffs[ranks[:nj, :]]
    return TruncatedRDM1(m, b.T @ b)


def truncated_rdm2(t, m):
    if t.num_particles < 2:
        raise ValueError("2-RDM requires at least two particles")
    if not t.num_particles <= m <= t.num_orbitals:
        raise ValueError(f"m must lie in [{t.num_particles}, {t.num_orbitals}]")
    ranks, signs = pair_attach_tables(t.num_orbitals, t.num_particles)
    nj = comb(m, t.num_particles - 2)
    stack = signs[:nj] * t.coeffs[ranks[:nj]]
    return TruncatedRDM2(m, t.num_orbitals, stack)


def descending_eigenbasis(matrix, degeneracy_tol=1e-10):
    """Eigendecomposition sorted by descending eigenvalue, deterministically.

    Every eigenvector is sign-fixed so its largest-magnitude component is
    positive; within a degenerate cluster (adjacent gaps < degeneracy_tol)
    vectors are ordered by the row index of that component. Returns
    (values, vectors).
    """
    vals, vecs = np.linalg.eigh(matrix)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    size = len(vals)
    anchors = np.empty(size, dtype=np.int64)
    for j in range(size):
        a = int(np.argmax(np.abs(vecs[:, j])))
        anchors[j] = a
        if vecs[a, j] < 0.0:
            vecs[:, j] *= -1.0
    start = 0
    while start < size:
        end = start + 1
        while end < size and vals[end - 1] - vals[end] < degeneracy_tol:
            end += 1
        if end - start > 1:
            order = start + np.argsort(anchors[start:end], kind="stable")
            vals[start:end] = vals[order]
            vecs[:, start:end] = vecs[:, order]
        start = end
    return vals, vecs


def natural_basis(g):
    """Natural occupations and orbitals of a (truncated) 1-RDM.

    Accepts a TruncatedRDM1 or a plain symmetric matrix. Occupation sums
    and [0, 1] bounds only hold for the full contraction (m = M).
    """
    matrix = g.matrix if isinstance(g, TruncatedRDM1) else np.asarray(g, float)
    if np.abs(matrix - matrix.T).max() > 1e-10:
        raise ValueError("density matrix is not symmetric")
    vals, vecs = descending_eigenbasis(matrix)
    return NaturalBasis(vals, vecs)


def correlation_entropy(occupations, num_particles=None):
    """S = -(1/N) sum_k n_k ln n_k with 0 ln 0 = 0.

    N defaults to round(sum(occupations)), which is exact for full-basis
    occupation spectra.
    """
    occs = np.asarray(occupations, dtype=np.float64)
    if occs.min(initial=0.0) < -1e-8 or occs.max(initial=0.0) > 1.0 + 1e-8:
        raise ValueError("occupations must lie in [0, 1]")
    occs = np.clip(occs, 0.0, 1.0)
    if num_particles is None:
        num_particles = int(round(float(occs.sum())))
    if num_particles < 1:
        raise ValueError("particle number must be positive")
    positive = occs[occs > 0.0]
    return float(-(positive * np.log(positive)).sum() / num_particles)


def subset_contributions(t, orbital_set):
    """Squared-coefficient mass per intersection pattern with ``orbital_set``.

    For every T subseteq S (1-based orbitals) the result maps tuple(T) to
    the summed d_K**2 over determinants K with K intersect S == T. The
    values are nonnegative and sum to 1.
    """
    selected = sorted(set(orbital_set))
    if any(not 1 <= i <= t.num_orbitals for i in selected):
        raise ValueError("orbital set outside 1..M")
    out = {}
    for r in range(len(selected) + 1):
        for sub in combinations(selected, r):
            out[sub] = 0.0
    lookup = set(selected)
    for tup, value in t.items():
        key = tuple(i for i in tup if i in lookup)
        out[key] += value * value
    return out
