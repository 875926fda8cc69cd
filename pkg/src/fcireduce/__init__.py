"""Orbital-space reduction of full CI wave functions with maximal retained norm."""

from .guess import (
    SingleRemovalReport,
    highest_no_guess,
    one_by_one_chain,
    one_by_one_elimination,
    two_particle_optimal,
    verify_single_removal_optimality,
)
from .harness import (
    AggregateRow,
    ExperimentConfig,
    SampleRecord,
    WorstCaseReport,
    aggregate_records,
    entropy_scatter,
    read_records_csv,
    run_sample_experiment,
    significance_counts,
    worst_case_report,
    write_aggregate_csv,
    write_records_csv,
)
from .kernels import backend_name
from .optimizer import (
    FixedPointOptions,
    NewtonOptions,
    OptimizationReport,
    finite_difference_hessian,
    gradient,
    hessian,
    naive_fixed_point,
    newton_trust_region,
)
from .rdm import (
    NaturalBasis,
    TruncatedRDM1,
    TruncatedRDM2,
    correlation_entropy,
    descending_eigenbasis,
    natural_basis,
    subset_contributions,
    truncated_rdm1,
    truncated_rdm2,
)
from .rotation import exp_antisymmetric, reduced_norm, rotate_tensor
from .tensors import (
    CIFileError,
    CITensor,
    Seed,
    distance_from_norm,
    load_ci_file,
    make_tensor,
    random_tensor,
    retained_weight,
    save_ci_file,
    tensor_element,
    truncate_and_renormalize,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
