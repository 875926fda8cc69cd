"""Orthogonal orbital rotations and the reduced-basis norm.

Rotating the one-particle basis by U (columns = new orbitals) acts on
ordered-tuple coefficients through all N x N minors of U,

    d'_L = sum_K d_K * det(U[K, L]),

which is what ``kernels.apply_compound`` computes. Restricting the target
columns to the first m immediately gives the coefficient block of the
truncated state, hence the reduced norm, without forming the rest.
"""

import numpy as np
import scipy.linalg

from .kernels import apply_compound
from .tensors import CITensor

#: Orthogonality defect allowed on rotation inputs. Products of many exact
#: rotations accumulate roundoff well below this.
ORTHO_TOL = 1e-9


def _check_orthogonal(u, num_orbitals):
    u = np.ascontiguousarray(u, dtype=np.float64)
    if u.shape != (num_orbitals, num_orbitals):
        raise ValueError(
            f"rotation has shape {u.shape}, expected ({num_orbitals}, {num_orbitals})")
    defect = np.abs(u.T @ u - np.eye(num_orbitals)).max()
    if defect > ORTHO_TOL:
        raise ValueError(f"matrix is not orthogonal (defect {defect:.3g})")
    return u


def exp_antisymmetric(x):
    """Orthogonal U = exp(X) for real antisymmetric X.

    Raises if X deviates from antisymmetry by more than 1e-12 in any entry.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("X must be square")
    if np.abs(x + x.T).max() > 1e-12:
        raise ValueError("X is not antisymmetric")
    return scipy.linalg.expm(x)


def rotate_tensor(t, u):
    """Tensor re-expressed in the rotated basis with columns of U."""
    u = _check_orthogonal(u, t.num_orbitals)
    coeffs = apply_compound(u, t.coeffs, t.num_particles)
    return CITensor(t.num_orbitals, t.num_particles, coeffs)


def reduced_norm(t, u, m):
    """Coefficient weight retained by the first m rotated orbitals.

    Equals sum of d'_L**2 over tuples L within 1..m after rotating by U;
    the full-basis value (m = M) is 1 for any orthogonal U.
    """
    if not t.num_particles <= m <= t.num_orbitals:
        raise ValueError(
            f"m must lie in [{t.num_particles}, {t.num_orbitals}]")
    u = _check_orthogonal(u, t.num_orbitals)
    kept = apply_compound(u, t.coeffs, t.num_particles, ncols=m)
    return float(kept @ kept)
