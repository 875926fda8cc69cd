"""Pure-numpy implementation of the compound-matrix kernel.

Semantics are identical to the Cython version in ``_kernels_cy.pyx``; see
``kernels.apply_compound`` for the contract. The recursion is vectorised
over all source subsets K at once, one minor size per pass, and the last
expansion level is fused with the d_K weighting so the (nK, C(ncols, N))
intermediate never materialises.
"""

import numpy as np

from .subsets import laplace_tables, subset_array


def apply_compound(U, d, n_particles, ncols):
    n = n_particles
    num_orbitals = U.shape[0]
    subs = subset_array(num_orbitals, n)
    if n == 1:
        return d @ U[:, :ncols]

    # Level 1: 1x1 minors, i.e. the first row of each subset.
    w = U[subs[:, 0], :ncols]
    for size in range(2, n):
        src, col, sgn = laplace_tables(ncols, size)
        rows = U[subs[:, size - 1], :ncols]
        acc = sgn[:, 0] * w[:, src[:, 0]] * rows[:, col[:, 0]]
        for r in range(1, size):
            acc += sgn[:, r] * w[:, src[:, r]] * rows[:, col[:, r]]
        w = acc

    # Final level: fold in d_K before expanding, so the sum over K becomes
    # a single matrix product of shape (C(ncols, N-1), ncols).
    src, col, sgn = laplace_tables(ncols, n)
    rows = U[subs[:, n - 1], :ncols]
    partial = (w * d[:, None]).T @ rows
    out = sgn[:, 0] * partial[src[:, 0], col[:, 0]]
    for r in range(1, n):
        out += sgn[:, r] * partial[src[:, r], col[:, r]]
    return np.ascontiguousarray(out)
