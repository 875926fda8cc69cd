"""Command-line interface.

Subcommands: gen (emit a random CI file), optimize (single tensor, one or
both guesses), sample (random ensemble to CSV), analyze (worst-case and
entropy reports from a records CSV), entropy (occupations of one file).
"""

import argparse
import csv
import sys

import numpy as np

from . import harness
from .guess import highest_no_guess, one_by_one_elimination
from .optimizer import NewtonOptions, newton_trust_region
from .rdm import correlation_entropy, natural_basis, truncated_rdm1
from .rotation import reduced_norm
from .tensors import Seed, load_ci_file, random_tensor, save_ci_file


def _fmt(value):
    return format(float(value), ".17g")


def _cmd_gen(args):
    t = random_tensor(args.orbitals, args.particles,
                      Seed(args.seed, args.sample_index))
    save_ci_file(t, args.out)
    print(f"wrote {args.out}: M={args.orbitals} N={args.particles} "
          f"coefficients={t.coeffs.size}")
    return 0


def _guess_rotation(t, name, m):
    if name == "identity":
        return np.eye(t.num_orbitals)
    if name == "no":
        return highest_no_guess(t, m)
    if name == "one-by-one":
        return one_by_one_elimination(t, m)
    raise ValueError(f"unknown guess {name!r}")


def _cmd_optimize(args):
    t = load_ci_file(args.infile)
    opts = NewtonOptions(tol=args.tol, max_iter=args.max_iter)
    names = ["no", "one-by-one"] if args.guess == "both" else [args.guess]
    trajectory = []
    for name in names:
        u0 = _guess_rotation(t, name, args.keep)
        n_init = reduced_norm(t, u0, args.keep)
        report = newton_trust_region(t, args.keep, u0, opts)
        print(f"guess={name} m={args.keep} n_initial={_fmt(n_init)} "
              f"n_final={_fmt(report.n_final)} iterations={report.iterations} "
              f"status={report.status} "
              f"grad_norm_final={_fmt(report.grad_norm_final)} "
              f"hessian_max_eig={_fmt(report.hessian_max_eig)}")
        trajectory.extend(
            (name, i + 1, step.norm_value, step.grad_norm, step.trust_radius,
             step.step_norm, int(step.accepted))
            for i, step in enumerate(report.history))
    if args.report is not None:
        with open(args.report, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(("guess", "iteration", "n_value", "grad_norm",
                             "trust_radius", "step_norm", "accepted"))
            for row in trajectory:
                writer.writerow([x if isinstance(x, (str, int)) else _fmt(x)
                                 for x in row])
    return 0


def _cmd_sample(args):
    keep_list = None
    if args.keep_list:
        keep_list = tuple(int(x) for x in args.keep_list.split(","))
    tensor_dir = f"{args.out_records}.tensors" if args.keep_tensors else None
    cfg = harness.ExperimentConfig(
        num_orbitals=args.orbitals,
        num_particles=args.particles,
        num_samples=args.samples,
        master_seed=args.seed,
        keep_list=keep_list,
        newton=NewtonOptions(tol=args.tol, max_iter=args.max_iter),
        significance_threshold=args.significance_threshold,
        workers=args.workers,
        tensor_dir=tensor_dir,
    )
    records, aggregates = harness.run_sample_experiment(cfg)
    harness.write_records_csv(records, args.out_records)
    harness.write_aggregate_csv(aggregates, args.out_aggregate)
    print(f"wrote {len(records)} records to {args.out_records}")
    print(f"wrote {len(aggregates)} aggregate rows to {args.out_aggregate}")
    if tensor_dir:
        print(f"tensors kept in {tensor_dir}")
    return 0


def _print_worst_case(report):
    print(f"worst case: sample {report.sample_id} at m={report.m}, "
          f"n_final={_fmt(report.n_final)}")
    print("occupations:")
    for k, occ in enumerate(report.occupations, start=1):
        print(f"  n_{k:<2d} = {_fmt(occ)}")
    print("coefficient mass by overlap with the top-occupied set:")
    ordered = sorted(report.contributions.items(),
                     key=lambda item: (-item[1], item[0]))
    for subset, value in ordered:
        label = "{" + ",".join(map(str, subset)) + "}" if subset else "(none)"
        print(f"  {label:<12s} {_fmt(value)}")


def _cmd_analyze(args):
    records = harness.read_records_csv(args.records)
    did_something = False
    if args.worst_case:
        store = args.tensors or f"{args.records}.tensors"
        _print_worst_case(harness.worst_case_report(records, store,
                                                    args.top_set))
        did_something = True
    if args.entropy_scatter is not None:
        source = records
        if args.scatter_m is not None:
            source = [rec for rec in records if rec.m == args.scatter_m]
        rows = harness.entropy_scatter(source)
        with open(args.entropy_scatter, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(("entropy", "delta_initial", "delta_final"))
            for row in rows:
                writer.writerow([_fmt(x) for x in row])
        print(f"wrote {len(rows)} scatter rows to {args.entropy_scatter}")
        did_something = True
    if not did_something:
        print("nothing to do: pass --worst-case and/or --entropy-scatter",
              file=sys.stderr)
        return 2
    return 0


def _cmd_entropy(args):
    t = load_ci_file(args.infile)
    occs = natural_basis(truncated_rdm1(t, t.num_orbitals)).occupations
    for k, occ in enumerate(occs, start=1):
        print(f"n_{k:<2d} = {_fmt(occ)}")
    print(f"S_cor = {_fmt(correlation_entropy(occs, t.num_particles))}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="fcireduce",
        description="Reduce the orbital basis of full CI wave functions "
                    "with maximal retained norm.")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="emit a random CI coefficient file")
    gen.add_argument("--orbitals", type=int, required=True)
    gen.add_argument("--particles", type=int, required=True)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--sample-index", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=_cmd_gen)

    opt = sub.add_parser("optimize", help="optimize one tensor at one m")
    opt.add_argument("--in", dest="infile", required=True)
    opt.add_argument("--keep", type=int, required=True,
                     help="number of orbitals to retain")
    opt.add_argument("--guess", default="both",
                     choices=("no", "one-by-one", "identity", "both"))
    opt.add_argument("--tol", type=float, default=1.5e-8)
    opt.add_argument("--max-iter", type=int, default=200)
    opt.add_argument("--report", help="write per-iteration trajectory CSV")
    opt.set_defaults(func=_cmd_optimize)

    smp = sub.add_parser("sample", help="random-ensemble experiment")
    smp.add_argument("--orbitals", type=int, default=12)
    smp.add_argument("--particles", type=int, default=4)
    smp.add_argument("--samples", type=int, default=200)
    smp.add_argument("--seed", type=int, required=True)
    smp.add_argument("--keep-list",
                     help="comma-separated m values (default: N..M-1)")
    smp.add_argument("--keep-tensors", action="store_true",
                     help="persist sampled tensors next to the records CSV")
    smp.add_argument("--out-records", required=True)
    smp.add_argument("--out-aggregate", required=True)
    smp.add_argument("--workers", type=int, default=1)
    smp.add_argument("--tol", type=float, default=1.5e-8)
    smp.add_argument("--max-iter", type=int, default=200)
    smp.add_argument("--significance-threshold", type=float, default=1e-6)
    smp.set_defaults(func=_cmd_sample)

    ana = sub.add_parser("analyze", help="reports from a records CSV")
    ana.add_argument("--records", required=True)
    ana.add_argument("--worst-case", action="store_true")
    ana.add_argument("--top-set", type=int, default=4)
    ana.add_argument("--tensors",
                     help="tensor directory (default: RECORDS.tensors)")
    ana.add_argument("--entropy-scatter", metavar="FILE",
                     help="write (entropy, delta_initial, delta_final) CSV")
    ana.add_argument("--scatter-m", type=int,
                     help="restrict the scatter to one m")
    ana.set_defaults(func=_cmd_analyze)

    ent = sub.add_parser("entropy", help="print occupations and S_cor")
    ent.add_argument("--in", dest="infile", required=True)
    ent.set_defaults(func=_cmd_entropy)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
