"""Backend dispatch for the hot rotation kernel.

The one genuinely expensive operation in this package is applying an
orbital rotation U to a coefficient tensor, which by the Cauchy-Binet
theorem means contracting against all N x N minors of U:

    d'_L = sum_K d_K * det(U[K, L])

A Cython implementation is used when the compiled module is importable;
otherwise a vectorised numpy fallback takes over. Setting the environment
variable ``FCIREDUCE_PURE_PYTHON=1`` before import forces the fallback,
which is how the benchmark and the cross-checking tests get at both.
"""

import os
from math import comb

import numpy as np

from . import _kernels_py
from .subsets import flat_laplace_tables, subset_array

if os.environ.get("FCIREDUCE_PURE_PYTHON", "0") not in ("", "0"):
    _compiled = None
else:
    try:
        from . import _kernels_cy as _compiled
    except ImportError:
        _compiled = None

BACKEND = "python" if _compiled is None else "compiled"


def backend_name():
    """Name of the kernel backend selected at import: compiled or python."""
    return BACKEND


def apply_compound(U, d, n_particles, ncols=None):
    """Contract coefficients against all N x N minors of U.

    Parameters
    ----------
    U : (M, M) array
        Orbital rotation (columns are the new orbitals). Only the first
        ``ncols`` columns are referenced.
    d : (C(M, N),) array
        Coefficients on strictly increasing tuples in colex order.
    n_particles : int
        Minor size N.
    ncols : int, optional
        Restrict target subsets to columns 0..ncols-1. Defaults to M,
        i.e. the full rotated tensor. Passing m < M yields exactly the
        coefficients of the retained block after rotation.

    Returns
    -------
    (C(ncols, N),) array of rotated coefficients in colex order.
    """
    U = np.ascontiguousarray(U, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    num_orbitals = U.shape[0]
    if U.ndim != 2 or U.shape[1] != num_orbitals:
        raise ValueError("rotation matrix must be square")
    if not 1 <= n_particles <= num_orbitals:
        raise ValueError("particle number out of range")
    if d.shape != (comb(num_orbitals, n_particles),):
        raise ValueError(
            f"coefficient vector has length {d.shape[0]}, "
            f"expected C({num_orbitals}, {n_particles})")
    if ncols is None:
        ncols = num_orbitals
    if not n_particles <= ncols <= num_orbitals:
        raise ValueError("column restriction must lie in [N, M]")

    if _compiled is None:
        return _kernels_py.apply_compound(U, d, n_particles, ncols)

    subs = subset_array(num_orbitals, n_particles)
    src, col, sgn, offsets, counts = flat_laplace_tables(ncols, n_particles)
    scratch = max(comb(ncols, j) for j in range(1, n_particles)) if n_particles > 1 else 1
    w_a = np.empty(scratch)
    w_b = np.empty(scratch)
    out = np.empty(comb(ncols, n_particles))
    _compiled.apply_compound(U, d, subs, src, col, sgn, offsets, counts,
                             ncols, w_a, w_b, out)
    return out
