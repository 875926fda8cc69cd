"""Ranked-subset combinatorics shared by the tensor and RDM code.

Coefficients of an antisymmetric N-particle tensor over M orbitals are
stored on strictly increasing index tuples, ordered colexicographically.
Colex order has the property that all subsets of {0, ..., m-1} occupy a
contiguous prefix of length C(m, N), which makes "restrict to the first m
orbitals" a cheap slice everywhere downstream.

All orbital indices in this module are 0-based.
"""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np


def colex_rank(subset):
    """Rank of a strictly increasing index tuple in colex order.

    Uses the combinatorial number system: rank = sum_i C(s_i, i+1) where
    s_0 < s_1 < ... are the 0-based elements.
    """
    return sum(comb(s, i + 1) for i, s in enumerate(subset))


def colex_unrank(rank, size):
    """Inverse of :func:`colex_rank` for subsets of the given size."""
    out = []
    for i in range(size, 0, -1):
        # Largest s with C(s, i) <= rank.
        s = i - 1
        while comb(s + 1, i) <= rank:
            s += 1
        out.append(s)
        rank -= comb(s, i)
    out.reverse()
    return tuple(out)


@lru_cache(maxsize=None)
def subset_array(n, k):
    """All k-subsets of {0..n-1} in colex order as an (C(n,k), k) int array."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    subs = sorted(combinations(range(n), k), key=lambda t: t[::-1])
    return np.asarray(subs, dtype=np.int64)


def sort_sign(indices):
    """Sign of the permutation that sorts ``indices`` ascending.

    Counts inversions directly; tuples here have at most ~10 entries so the
    quadratic scan is fine.
    """
    inv = 0
    for i in range(len(indices)):
        for j in range(i + 1, len(indices)):
            if indices[i] > indices[j]:
                inv += 1
    return -1 if inv & 1 else 1


@lru_cache(maxsize=None)
def laplace_tables(ncols, size):
    """Gather tables for Laplace expansion of size-column minors by last row.

    For every size-subset T of {0..ncols-1} (colex rank t) and position r,
    det(rows, T) = sum_r sgn[t, r] * U[last_row, col[t, r]] * minor(src[t, r])
    where src is the colex rank of T with its r-th element removed, among
    (size-1)-subsets. The tables depend only on the column count, not on
    which rows are being expanded.
    """
    subs = subset_array(ncols, size)
    nt = subs.shape[0]
    src = np.zeros((nt, size), dtype=np.int64)
    col = np.ascontiguousarray(subs)
    sgn = np.zeros((nt, size), dtype=np.float64)
    for t in range(nt):
        row = tuple(subs[t])
        for r in range(size):
            src[t, r] = colex_rank(row[:r] + row[r + 1:])
            sgn[t, r] = -1.0 if (size - 1 - r) & 1 else 1.0
    return src, col, sgn


@lru_cache(maxsize=None)
def flat_laplace_tables(ncols, n_particles):
    """Concatenated Laplace tables for sizes 2..N, for the compiled kernel.

    Returns (src, col, sgn, offsets, counts) where level j (j = 2..N) starts
    at offsets[j-2] and holds counts[j-2] = C(ncols, j) rows of width j,
    flattened row-major.
    """
    src_parts, col_parts, sgn_parts = [], [], []
    offsets = []
    counts = []
    pos = 0
    for size in range(2, n_particles + 1):
        src, col, sgn = laplace_tables(ncols, size)
        offsets.append(pos)
        counts.append(src.shape[0])
        pos += src.size
        src_parts.append(src.ravel())
        col_parts.append(col.ravel())
        sgn_parts.append(sgn.ravel())
    if not src_parts:
        empty_i = np.zeros(0, dtype=np.int64)
        return empty_i, empty_i.copy(), np.zeros(0), empty_i.copy(), empty_i.copy()
    return (
        np.concatenate(src_parts),
        np.concatenate(col_parts),
        np.concatenate(sgn_parts),
        np.asarray(offsets, dtype=np.int64),
        np.asarray(counts, dtype=np.int64),
    )


@lru_cache(maxsize=None)
def single_attach_tables(num_orbitals, n_particles):
    """Tables for attaching one orbital to an (N-1)-subset.

    ranks[J, k] is the colex rank of J + {k} and signs[J, k] the sign
    (-1)**|{j in J : j < k}| picked up by inserting k into sorted position.
    Entries with k already in J have sign 0 (and rank 0, never used).
    """
    subs = subset_array(num_orbitals, n_particles - 1)
    nj = subs.shape[0]
    ranks = np.zeros((nj, num_orbitals), dtype=np.int64)
    signs = np.zeros((nj, num_orbitals), dtype=np.float64)
    for j in range(nj):
        row = tuple(subs[j])
        members = set(row)
        for k in range(num_orbitals):
            if k in members:
                continue
            merged = tuple(sorted(row + (k,)))
            ranks[j, k] = colex_rank(merged)
            below = sum(1 for x in row if x < k)
            signs[j, k] = -1.0 if below & 1 else 1.0
    return ranks, signs


@lru_cache(maxsize=None)
def pair_attach_tables(num_orbitals, n_particles):
    """Tables for attaching an ordered orbital pair to an (N-2)-subset.

    For p < q not in J, signs[J, p, q] = (-1)**|{j in J : p < j < q}| is the
    sign of sorting (p, q, J); the (q, p) entry carries the opposite sign so
    the resulting coefficient sheet is antisymmetric in (p, q). Invalid
    entries (p == q or overlap with J) have sign 0.
    """
    if n_particles < 2:
        raise ValueError("pair tables need at least two particles")
    subs = subset_array(num_orbitals, n_particles - 2)
    nj = subs.shape[0]
    ranks = np.zeros((nj, num_orbitals, num_orbitals), dtype=np.int64)
    signs = np.zeros((nj, num_orbitals, num_orbitals), dtype=np.float64)
    for j in range(nj):
        row = tuple(subs[j])
        members = set(row)
        for p in range(num_orbitals):
            if p in members:
                continue
            for q in range(p + 1, num_orbitals):
                if q in members:
                    continue
                merged = tuple(sorted(row + (p, q)))
                rank = colex_rank(merged)
                between = sum(1 for x in row if p < x < q)
                sign = -1.0 if between & 1 else 1.0
                ranks[j, p, q] = rank
                ranks[j, q, p] = rank
                signs[j, p, q] = sign
                signs[j, q, p] = -sign
    return ranks, signs


@lru_cache(maxsize=None)
def lex_to_colex_permutation(num_orbitals, n_particles):
    """perm[i] = colex storage rank of the i-th subset in lexicographic order."""
    lex = combinations(range(num_orbitals), n_particles)
    return np.asarray([colex_rank(t) for t in lex], dtype=np.int64)
