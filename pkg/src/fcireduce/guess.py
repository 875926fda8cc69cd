"""Initial-guess rotations for the retained-norm maximization.

Two general schemes: keep the m highest-occupied natural orbitals, or
eliminate the least-occupied orbital of the retained subspace one at a
time (re-diagonalizing the shrinking subblock after every drop, which is
exactly the optimal single-removal step applied repeatedly). For N = 2
the problem has a closed-form global optimum via the 2x2-block canonical
form of the antisymmetric coefficient matrix; it doubles as a test oracle
for the optimizer.
"""

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .optimizer import gradient, newton_trust_region
from .rdm import descending_eigenbasis, natural_basis, truncated_rdm1
from .rotation import reduced_norm, rotate_tensor
from .subsets import colex_rank


def _proper(u):
    """Flip the last column if needed so det(u) = +1 (pure gauge)."""
    if np.linalg.det(u) < 0.0:
        u = u.copy()
        u[:, -1] *= -1.0
    return u


def highest_no_guess(t, m):
    """Rotation whose first m columns are the m highest-occupied NOs.

    The column order does not depend on m; the argument is kept so all
    guess generators share a signature.
    """
    if not t.num_particles <= m <= t.num_orbitals:
        raise ValueError(f"m must lie in [{t.num_particles}, {t.num_orbitals}]")
    basis = natural_basis(truncated_rdm1(t, t.num_orbitals))
    return _proper(basis.orbitals)


def one_by_one_chain(t, m_min):
    """Elimination rotations for every retained count from M down to m_min.

    Returns {i: U_i} where the first i columns of U_i span the subspace
    retained after M - i single-orbital drops. Computing the whole chain
    costs the same as the final entry alone, which is what the ensemble
    harness exploits.
    """
    num_orbitals = t.num_orbitals
    if not t.num_particles <= m_min <= num_orbitals:
        raise ValueError(f"m must lie in [{t.num_particles}, {num_orbitals}]")
    u = np.eye(num_orbitals)
    work = t
    chain = {num_orbitals: u.copy()}
    for i in range(num_orbitals, m_min, -1):
        block = truncated_rdm1(work, i).matrix[:i, :i]
        vecs = _proper(descending_eigenbasis(block)[1])
        step = np.eye(num_orbitals)
        step[:i, :i] = vecs
        u = u @ step
        work = rotate_tensor(t, u)
        chain[i - 1] = u.copy()
    return chain


def one_by_one_elimination(t, m):
    """Guess from repeated optimal single-orbital removal down to m orbitals."""
    return one_by_one_chain(t, m)[m]


def two_particle_optimal(t, m):
    """Globally optimal rotation and retained norm for two-particle tensors.

    Brings the antisymmetric coefficient matrix to its canonical form of
    2x2 blocks [[0, s], [-s, 0]] (real Schur), orders blocks by decreasing
    s**2, and keeps whole blocks. Each block j contributes 2*s_j**2 when
    both its orbitals are kept and nothing otherwise, so for odd m the
    split block adds zero; the returned norm is the retained norm of the
    returned rotation in all cases.
    """
    if t.num_particles != 2:
        raise ValueError("closed form requires exactly two particles")
    num_orbitals = t.num_orbitals
    if not 2 <= m <= num_orbitals:
        raise ValueError(f"m must lie in [2, {num_orbitals}]")

    c = np.zeros((num_orbitals, num_orbitals))
    inv_sqrt2 = 1.0 / math.sqrt(2.0)
    for k in range(num_orbitals):
        for l in range(k + 1, num_orbitals):
            value = t.coeffs[colex_rank((k, l))] * inv_sqrt2
            c[k, l] = value
            c[l, k] = -value
    tmat, q = scipy.linalg.schur(c, output="real")

    strengths = []  # (s, first column of the 2x2 block)
    singles = []
    tol = 1e-12 * max(1.0, float(np.abs(tmat).max()))
    i = 0
    while i < num_orbitals:
        if i + 1 < num_orbitals and abs(tmat[i + 1, i]) > tol:
            s = 0.5 * (abs(tmat[i, i + 1]) + abs(tmat[i + 1, i]))
            strengths.append((s, i))
            i += 2
        else:
            singles.append(i)
            i += 1

    strengths.sort(key=lambda pair: -pair[0] ** 2)
    order = [col for _, start in strengths for col in (start, start + 1)]
    order.extend(singles)
    u = _proper(q[:, order])

    norm = sum(2.0 * s * s for j, (s, _) in enumerate(strengths)
               if 2 * (j + 1) <= m)
    return u, norm


@dataclass
class SingleRemovalReport:
    max_cross_entry: float
    gradient_max_entry: float
    newton_accepted_steps: int
    newton_status: str


def verify_single_removal_optimality(t):
    """Check that dropping the least-occupied NO is already stationary.

    In the NO basis the kept-removed column of the (M-1)-truncated 1-RDM
    coincides with the corresponding column of the full 1-RDM, which the
    diagonalization zeroed out; Newton refinement from that start should
    accept no steps. Returns the measured maxima and the Newton outcome.
    """
    if t.num_particles < 2:
        raise ValueError("single-removal check needs at least two particles")
    num_orbitals = t.num_orbitals
    m = num_orbitals - 1
    u = highest_no_guess(t, m)
    work = rotate_tensor(t, u)
    cross = truncated_rdm1(work, m).matrix[:m, m]
    report = newton_trust_region(t, m, u)
    grad = gradient(work, m)
    return SingleRemovalReport(
        max_cross_entry=float(np.abs(cross).max()),
        gradient_max_entry=float(np.abs(grad).max()),
        newton_accepted_steps=report.accepted_steps,
        newton_status=report.status,
    )
