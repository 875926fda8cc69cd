"""Random-ensemble experiments: generate, optimize twice, record, aggregate.

Each sample draws a random tensor from a per-sample sub-seed, builds both
initial guesses, Newton-optimizes from each at every requested retained
count m, and records one row per (sample, m, method). Samples are
independent, so they may run across worker processes; every worker
derives its randomness from the sample's own seed and rows are ordered by
(sample_id, m, method), which makes the CSV output byte-identical
regardless of worker count.
"""

import csv
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .guess import highest_no_guess, one_by_one_chain
from .optimizer import NewtonOptions, newton_trust_region
from .rdm import correlation_entropy, natural_basis, truncated_rdm1, subset_contributions
from .rotation import reduced_norm, rotate_tensor
from .tensors import Seed, random_tensor, save_ci_file, load_ci_file

METHODS = ("no", "one-by-one")

#: A final Hessian counts as not negative definite above this eigenvalue.
NONDEFINITE_TOL = 1e-8

RECORD_COLUMNS = ("sample_id", "m", "method", "n_initial", "n_final",
                  "iterations", "status", "grad_norm_final",
                  "hessian_max_eig", "entropy")
AGGREGATE_COLUMNS = ("m", "method", "n_init_min", "n_init_mean", "n_init_max",
                     "n_final_min", "n_final_mean", "n_final_max",
                     "sig_better_count", "nondefinite_count")


@dataclass(frozen=True)
class ExperimentConfig:
    num_orbitals: int = 12
    num_particles: int = 4
    num_samples: int = 200
    master_seed: int = 0
    keep_list: tuple = None  # default: every m from N to M-1
    newton: NewtonOptions = field(default_factory=NewtonOptions)
    significance_threshold: float = 1e-6
    workers: int = 1
    tensor_dir: str = None  # persist sampled tensors here when set

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("need at least one sample")
        if not 1 <= self.num_particles <= self.num_orbitals:
            raise ValueError("invalid particle number")
        if self.keep_list is None:
            object.__setattr__(
                self, "keep_list",
                tuple(range(self.num_particles, self.num_orbitals)))
        else:
            object.__setattr__(self, "keep_list",
                               tuple(sorted(set(self.keep_list))))
        if not self.keep_list:
            raise ValueError("keep list is empty")
        if (self.keep_list[0] < self.num_particles
                or self.keep_list[-1] > self.num_orbitals):
            raise ValueError("keep list outside [N, M]")
        if self.workers < 1:
            raise ValueError("need at least one worker")


@dataclass(frozen=True)
class SampleRecord:
    sample_id: int
    m: int
    method: str
    n_initial: float
    n_final: float
    iterations: int
    status: str
    grad_norm_final: float
    hessian_max_eig: float
    entropy: float


@dataclass(frozen=True)
class AggregateRow:
    m: int
    method: str
    n_init_min: float
    n_init_mean: float
    n_init_max: float
    n_final_min: float
    n_final_mean: float
    n_final_max: float
    sig_better_count: int
    nondefinite_count: int


def sample_tensor(cfg, sample_id):
    """The tensor belonging to a sample id (pure function of the config seed)."""
    return random_tensor(cfg.num_orbitals, cfg.num_particles,
                         Seed(cfg.master_seed, sample_id))


def _run_one_sample(cfg, sample_id):
    t = sample_tensor(cfg, sample_id)
    occs = natural_basis(truncated_rdm1(t, cfg.num_orbitals)).occupations
    entropy = correlation_entropy(occs, cfg.num_particles)
    guesses = {
        "no": dict.fromkeys(cfg.keep_list,
                            highest_no_guess(t, cfg.keep_list[0])),
        "one-by-one": one_by_one_chain(t, cfg.keep_list[0]),
    }
    records = []
    for m in cfg.keep_list:
        for method in METHODS:
            u0 = guesses[method][m]
            n_init = reduced_norm(t, u0, m)
            report = newton_trust_region(t, m, u0, cfg.newton)
            records.append(SampleRecord(
                sample_id, m, method, n_init, report.n_final,
                report.iterations, report.status, report.grad_norm_final,
                report.hessian_max_eig, entropy))
    return records


def run_sample_experiment(cfg):
    """Run the full ensemble; returns (records, aggregate rows)."""
    ids = range(cfg.num_samples)
    if cfg.workers == 1:
        batches = [_run_one_sample(cfg, i) for i in ids]
    else:
        serial_cfg = replace(cfg, workers=1, tensor_dir=None)
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            chunk = max(1, cfg.num_samples // (cfg.workers * 4))
            batches = list(pool.map(_run_one_sample,
                                    [serial_cfg] * cfg.num_samples, ids,
                                    chunksize=chunk))
    records = [rec for batch in batches for rec in batch]
    if cfg.tensor_dir is not None:
        os.makedirs(cfg.tensor_dir, exist_ok=True)
        for i in ids:
            save_ci_file(sample_tensor(cfg, i),
                         os.path.join(cfg.tensor_dir, _tensor_name(i)))
    return records, aggregate_records(records, cfg.significance_threshold)


def _tensor_name(sample_id):
    return f"sample_{sample_id:05d}.json"


def significance_counts(records, threshold=1e-6):
    """Per m: how often each method's final norm significantly beats the other.

    Method A wins a sample iff n_A - n_B > threshold * max(n_A, n_B);
    ties and sub-threshold gaps count for neither.
    """
    finals = {}
    for rec in records:
        finals.setdefault((rec.m, rec.sample_id), {})[rec.method] = rec.n_final
    counts = {}
    for (m, _), pair in finals.items():
        if len(pair) != len(METHODS):
            raise ValueError("records must contain every method per sample")
        tally = counts.setdefault(m, dict.fromkeys(METHODS, 0))
        n_no, n_obo = pair["no"], pair["one-by-one"]
        margin = threshold * max(n_no, n_obo)
        if n_no - n_obo > margin:
            tally["no"] += 1
        elif n_obo - n_no > margin:
            tally["one-by-one"] += 1
    return counts


def aggregate_records(records, threshold=1e-6):
    """Collapse records into one AggregateRow per (m, method)."""
    sig = significance_counts(records, threshold)
    grouped = {}
    for rec in records:
        grouped.setdefault((rec.m, rec.method), []).append(rec)
    rows = []
    for m in sorted({rec.m for rec in records}):
        for method in METHODS:
            group = grouped[(m, method)]
            inits = [rec.n_initial for rec in group]
            finals = [rec.n_final for rec in group]
            rows.append(AggregateRow(
                m, method,
                min(inits), sum(inits) / len(inits), max(inits),
                min(finals), sum(finals) / len(finals), max(finals),
                sig[m][method],
                sum(rec.hessian_max_eig > NONDEFINITE_TOL for rec in group)))
    return rows


def entropy_scatter(records):
    """Rows (entropy, delta_initial, delta_final) per (sample, m).

    Deltas are n(no-guess) minus n(one-by-one), so a positive value means
    the natural-orbital start won.
    """
    cells = {}
    for rec in records:
        key = (rec.sample_id, rec.m)
        cells.setdefault(key, {})[rec.method] = rec
    rows = []
    for key in sorted(cells):
        pair = cells[key]
        if len(pair) != len(METHODS):
            raise ValueError("records must contain every method per sample")
        no, obo = pair["no"], pair["one-by-one"]
        rows.append((no.entropy,
                     no.n_initial - obo.n_initial,
                     no.n_final - obo.n_final))
    return rows


@dataclass(frozen=True)
class WorstCaseReport:
    sample_id: int
    m: int
    n_final: float
    occupations: np.ndarray
    contributions: dict


def worst_case_report(records, tensor_store, top_set_size=4):
    """Analyze the sample where the NO guess ended worst at maximal removal.

    Loads that sample's tensor from ``tensor_store`` (the directory the
    experiment persisted into), re-expresses it in its NO basis, and
    decomposes the coefficient mass over intersection patterns with the
    ``top_set_size`` highest-occupied NOs.
    """
    if not records:
        raise ValueError("no records to analyze")
    m_star = min(rec.m for rec in records)
    candidates = [rec for rec in records
                  if rec.m == m_star and rec.method == "no"]
    worst = min(candidates, key=lambda rec: (rec.n_final, rec.sample_id))
    t = load_ci_file(os.path.join(tensor_store, _tensor_name(worst.sample_id)))
    basis = natural_basis(truncated_rdm1(t, t.num_orbitals))
    rotated = rotate_tensor(t, basis.orbitals)
    contributions = subset_contributions(
        rotated, range(1, top_set_size + 1))
    return WorstCaseReport(worst.sample_id, m_star, worst.n_final,
                           basis.occupations, contributions)


def _format_value(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_records_csv(records, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow([_format_value(getattr(rec, col))
                             for col in RECORD_COLUMNS])


def read_records_csv(path):
    records = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames) != RECORD_COLUMNS:
            raise ValueError(f"{path}: unexpected columns {reader.fieldnames}")
        for row in reader:
            records.append(SampleRecord(
                int(row["sample_id"]), int(row["m"]), row["method"],
                float(row["n_initial"]), float(row["n_final"]),
                int(row["iterations"]), row["status"],
                float(row["grad_norm_final"]), float(row["hessian_max_eig"]),
                float(row["entropy"])))
    return records


def write_aggregate_csv(rows, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(AGGREGATE_COLUMNS)
        for row in rows:
            writer.writerow([_format_value(getattr(row, col))
                             for col in AGGREGATE_COLUMNS])
