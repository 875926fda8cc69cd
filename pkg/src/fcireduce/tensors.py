"""Antisymmetric CI coefficient tensors: construction, I/O, elementary functionals.

A wave function expanded over all N-particle determinants of an M-orbital
basis is stored through its coefficients d_K on strictly increasing index
tuples K = (i_1 < ... < i_N), normalized to sum_K d_K**2 = 1. The implied
full antisymmetric tensor is c_{i_1...i_N} = sign(pi) * d_{sort(i)} / sqrt(N!),
zero whenever two indices coincide.

Internally the d_K live in a dense vector over all C(M, N) tuples in
colexicographic order, so that the determinants built from the first m
orbitals always occupy the leading C(m, N) slots. Public tuple-facing
APIs use 1-based orbital indices (matching the file format); numpy arrays
are indexed 0-based as usual.
"""

import json
import math
import warnings
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .subsets import colex_rank, lex_to_colex_permutation, sort_sign

FORMAT_VERSION = 1


class CIFileError(ValueError):
    """Raised when a CI coefficient file is malformed."""


@dataclass(frozen=True)
class Seed:
    """Deterministic per-sample seed: a pure function of (master, index)."""

    master_seed: int
    sample_index: int = 0

    def __post_init__(self):
        if self.master_seed < 0 or self.sample_index < 0:
            raise ValueError("seed components must be non-negative")

    def generator(self):
        return np.random.default_rng([self.master_seed, self.sample_index])


@dataclass(frozen=True, eq=False)
class CITensor:
    """Normalized antisymmetric coefficient tensor on ordered-tuple storage."""

    num_orbitals: int
    num_particles: int
    coeffs: np.ndarray  # colex order over all C(M, N) increasing tuples

    def __post_init__(self):
        m_orb, n_par = self.num_orbitals, self.num_particles
        if m_orb < 1:
            raise ValueError("need at least one orbital")
        if not 1 <= n_par <= m_orb:
            raise ValueError(
                f"particle number {n_par} outside 1..{m_orb}")
        c = np.ascontiguousarray(self.coeffs, dtype=np.float64)
        if c.shape != (comb(m_orb, n_par),):
            raise ValueError(
                f"coefficient vector has length {c.shape}, "
                f"expected C({m_orb}, {n_par})")
        norm = math.sqrt(float(c @ c))
        if norm == 0.0:
            raise ValueError("all coefficients are zero")
        object.__setattr__(self, "coeffs", c / norm)

    def __eq__(self, other):
        if not isinstance(other, CITensor):
            return NotImplemented
        return (self.num_orbitals == other.num_orbitals
                and self.num_particles == other.num_particles
                and np.array_equal(self.coeffs, other.coeffs))

    def items(self):
        """Yield (1-based ascending tuple, d_K) for nonzero coefficients, in
        lexicographic tuple order."""
        perm = lex_to_colex_permutation(self.num_orbitals, self.num_particles)
        tuples = combinations(range(self.num_orbitals), self.num_particles)
        for i, tup in enumerate(tuples):
            value = self.coeffs[perm[i]]
            if value != 0.0:
                yield tuple(x + 1 for x in tup), float(value)


def make_tensor(num_orbitals, num_particles, entries):
    """Build a normalized CITensor from {increasing 1-based tuple: value}.

    ``entries`` may be a mapping or an iterable of (tuple, value) pairs.
    Tuples must be strictly increasing within 1..M; at least one value must
    be nonzero.
    """
    if num_particles > num_orbitals:
        raise ValueError("more particles than orbitals")
    pairs = entries.items() if hasattr(entries, "items") else entries
    coeffs = np.zeros(comb(num_orbitals, num_particles))
    seen = set()
    for tup, value in pairs:
        tup = tuple(tup)
        if len(tup) != num_particles:
            raise ValueError(f"tuple {tup} has wrong length")
        if any(not 1 <= i <= num_orbitals for i in tup):
            raise ValueError(f"tuple {tup}: index out of range 1..{num_orbitals}")
        if any(a >= b for a, b in zip(tup, tup[1:])):
            raise ValueError(f"tuple {tup} is not strictly increasing")
        if tup in seen:
            raise ValueError(f"duplicate tuple {tup}")
        seen.add(tup)
        coeffs[colex_rank(tuple(i - 1 for i in tup))] = value
    if not np.any(coeffs):
        raise ValueError("all coefficients are zero")
    return CITensor(num_orbitals, num_particles, coeffs)


def tensor_element(t, idx):
    """Full-tensor element c_{idx} = sign(pi) * d_{sort(idx)} / sqrt(N!).

    ``idx`` is a tuple of N 1-based indices in any order; repeated indices
    give 0 by antisymmetry.
    """
    if len(idx) != t.num_particles:
        raise ValueError("index tuple has wrong length")
    if any(not 1 <= i <= t.num_orbitals for i in idx):
        raise ValueError(f"index tuple {tuple(idx)} out of range")
    if len(set(idx)) != len(idx):
        return 0.0
    sign = sort_sign(idx)
    rank = colex_rank(tuple(sorted(i - 1 for i in idx)))
    return sign * float(t.coeffs[rank]) / math.sqrt(math.factorial(t.num_particles))


def random_tensor(num_orbitals, num_particles, seed):
    """Random tensor with heavy-tailed coefficients, deterministic in the seed.

    Every increasing tuple, visited in lexicographic order, consumes four
    consecutive uniform [0, 1) draws r1..r4 and receives
    (r1 - r2) / (r3 - r4); a zero denominator (probability ~0) redraws that
    tuple's four numbers. The result is normalized.
    """
    if isinstance(seed, int):
        seed = Seed(seed)
    rng = seed.generator()
    count = comb(num_orbitals, num_particles)
    values = np.empty(count)
    for i in range(count):
        while True:
            r = rng.random(4)
            if r[2] != r[3]:
                break
        values[i] = (r[0] - r[1]) / (r[2] - r[3])
    coeffs = np.empty(count)
    coeffs[lex_to_colex_permutation(num_orbitals, num_particles)] = values
    return CITensor(num_orbitals, num_particles, coeffs)


def retained_weight(t, m):
    """Squared coefficient mass on determinants within the first m orbitals."""
    if not t.num_particles <= m <= t.num_orbitals:
        raise ValueError(f"m must lie in [{t.num_particles}, {t.num_orbitals}]")
    kept = t.coeffs[:comb(m, t.num_particles)]
    return float(kept @ kept)


def truncate_and_renormalize(t, m):
    """Drop orbitals m+1..M and renormalize.

    Returns (tensor over m orbitals, retained norm). The truncated state
    keeps the original coefficients scaled by 1/sqrt(norm); its overlap
    with the original state is sqrt(norm), so writing that overlap as
    1 - lam gives norm = (1 - lam)**2.
    """
    norm = retained_weight(t, m)
    if norm == 0.0:
        raise ValueError(f"no determinant survives truncation to m={m}")
    kept = t.coeffs[:comb(m, t.num_particles)]
    return CITensor(m, t.num_particles, kept / math.sqrt(norm)), norm


def distance_from_norm(norm, tol=1e-9):
    """Squared distance 2 - 2*sqrt(norm) between the state and its truncation."""
    if norm < -tol or norm > 1.0 + tol:
        raise ValueError(f"retained norm {norm} outside [0, 1]")
    return 2.0 - 2.0 * math.sqrt(min(max(norm, 0.0), 1.0))


def save_ci_file(t, path):
    """Write a tensor as a CI coefficient file (JSON, stable formatting).

    Coefficients appear sorted lexicographically by tuple with 17
    significant digits; zero coefficients are omitted.
    """
    rows = [
        f'  {{"orbitals": {list(tup)}, "value": {value:.17g}}}'
        for tup, value in t.items()
    ]
    body = ",\n".join(rows)
    text = (
        "{\n"
        f'"format_version": {FORMAT_VERSION},\n'
        f'"num_orbitals": {t.num_orbitals},\n'
        f'"num_particles": {t.num_particles},\n'
        '"coefficients": [\n' + body + "\n]\n}\n"
    )
    with open(path, "w", encoding="ascii") as handle:
        handle.write(text)


def load_ci_file(path):
    """Read a CI coefficient file, validating structure and invariants.

    Unnormalized coefficient sets load fine but emit a warning before being
    normalized. Structural problems raise CIFileError with the offending
    entry identified.
    """
    with open(path, "r", encoding="ascii") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise CIFileError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(doc, dict):
        raise CIFileError(f"{path}: top level must be an object")
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        raise CIFileError(f"{path}: unsupported format_version {version!r}")
    for key in ("num_orbitals", "num_particles", "coefficients"):
        if key not in doc:
            raise CIFileError(f"{path}: missing key {key!r}")
    m_orb = doc["num_orbitals"]
    n_par = doc["num_particles"]
    if not (isinstance(m_orb, int) and isinstance(n_par, int)):
        raise CIFileError(f"{path}: orbital/particle counts must be integers")
    if not 1 <= n_par <= m_orb:
        raise CIFileError(
            f"{path}: invalid counts M={m_orb}, N={n_par}")
    raw = doc["coefficients"]
    if not isinstance(raw, list):
        raise CIFileError(f"{path}: coefficients must be an array")

    coeffs = np.zeros(comb(m_orb, n_par))
    seen = set()
    for pos, entry in enumerate(raw):
        where = f"{path}: coefficients[{pos}]"
        if not isinstance(entry, dict) or set(entry) != {"orbitals", "value"}:
            raise CIFileError(f"{where}: expected orbitals/value object")
        orbitals = entry["orbitals"]
        value = entry["value"]
        if (not isinstance(orbitals, list) or len(orbitals) != n_par
                or not all(isinstance(i, int) for i in orbitals)):
            raise CIFileError(f"{where}: orbitals must be {n_par} integers")
        if any(not 1 <= i <= m_orb for i in orbitals):
            raise CIFileError(f"{where}: orbital index out of range 1..{m_orb}")
        if any(a >= b for a, b in zip(orbitals, orbitals[1:])):
            raise CIFileError(f"{where}: orbitals {orbitals} not strictly ascending")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise CIFileError(f"{where}: value must be a real number")
        tup = tuple(orbitals)
        if tup in seen:
            raise CIFileError(f"{where}: duplicate tuple {orbitals}")
        seen.add(tup)
        coeffs[colex_rank(tuple(i - 1 for i in orbitals))] = float(value)

    total = float(coeffs @ coeffs)
    if total == 0.0:
        raise CIFileError(f"{path}: all coefficients are zero")
    if abs(total - 1.0) > 1e-12:
        warnings.warn(
            f"{path}: coefficients have squared norm {total:.6g}, normalizing")
    return CITensor(m_orb, n_par, coeffs)
