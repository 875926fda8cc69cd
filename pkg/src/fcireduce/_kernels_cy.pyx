# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the compound-matrix kernel.

Per source subset K the minors det(U[K[:j], T]) are grown one row at a
time over all column subsets T via Laplace expansion along the last row,
sharing sub-minors between overlapping T. The gather tables come
precomputed from ``subsets.flat_laplace_tables``.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_compound(double[:, ::1] U,
                   double[::1] d,
                   cnp.int64_t[:, ::1] subs,
                   cnp.int64_t[::1] src,
                   cnp.int64_t[::1] col,
                   double[::1] sgn,
                   cnp.int64_t[::1] offsets,
                   cnp.int64_t[::1] counts,
                   Py_ssize_t ncols,
                   double[::1] w_a,
                   double[::1] w_b,
                   double[::1] out):
    cdef Py_ssize_t n_particles = subs.shape[1]
    cdef Py_ssize_t nk = subs.shape[0]
    cdef Py_ssize_t nlev = n_particles - 1
    cdef Py_ssize_t k, l, lev, size, t, r, row, base, cnt, idx
    cdef double dk, acc
    cdef double[::1] wp, wc, tmp

    out[:] = 0.0
    if n_particles == 1:
        for k in range(nk):
            dk = d[k]
            if dk == 0.0:
                continue
            row = subs[k, 0]
            for l in range(ncols):
                out[l] += dk * U[row, l]
        return

    for k in range(nk):
        dk = d[k]
        if dk == 0.0:
            continue
        wp = w_a
        wc = w_b
        row = subs[k, 0]
        for l in range(ncols):
            wp[l] = U[row, l]
        for lev in range(nlev - 1):
            size = lev + 2
            row = subs[k, size - 1]
            base = offsets[lev]
            cnt = counts[lev]
            for t in range(cnt):
                acc = 0.0
                for r in range(size):
                    idx = base + t * size + r
                    acc += sgn[idx] * wp[src[idx]] * U[row, col[idx]]
                wc[t] = acc
            tmp = wp
            wp = wc
            wc = tmp
        size = n_particles
        row = subs[k, size - 1]
        base = offsets[nlev - 1]
        cnt = counts[nlev - 1]
        for t in range(cnt):
            acc = 0.0
            for r in range(size):
                idx = base + t * size + r
                acc += sgn[idx] * wp[src[idx]] * U[row, col[idx]]
            out[t] += dk * acc
