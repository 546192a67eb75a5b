"""Command-line interface.

Subcommands: `solve` one instance, `bench` a full experiment from a config
file, `profile` and `stats` post-process a results CSV, and `oracle`
brute-forces a tiny instance into a best-known-solution line.
"""

import argparse
import os
import sys

from .core import EvalTally, RngStream, TimeBudget
from .harness import (
    RESULTS_HEADER,
    ExperimentConfig,
    ResultRow,
    default_time_limit,
    parse_config,
    profile_csv_from_rows,
    read_bks,
    read_results,
    run_experiment,
    solver_params,
    wilcoxon_csv_from_rows,
    write_traces,
)
from .pool import init_pool
from .problems import brute_force, load_instance, make_decoder
from .qlearning import QController
from .solvers import SOLVER_NAMES, SOLVERS, control_grid, run_portfolio


def _add_instance_args(parser):
    parser.add_argument("--problem", required=True,
                        help="tsp, setcover, pmedian, partition, or hubtree")
    parser.add_argument("--instance", required=True, help="instance file path")
    parser.add_argument("--alpha", type=int, default=1,
                        help="neighbor count for pmedian instances")


def _cmd_solve(args) -> int:
    instance = load_instance(args.problem, args.instance, alpha=args.alpha)
    decoder = make_decoder(args.problem, instance)
    seconds = args.time
    if seconds is None and args.max_evals is None:
        seconds = default_time_limit(args.problem, instance)

    params = solver_params_from_args(args)
    q_control = args.params == "qlearning"
    trace_results = None
    if args.method == "portfolio":
        outcome = run_portfolio(
            decoder, list(SOLVER_NAMES), params, args.seed,
            seconds=seconds, max_evals=args.max_evals,
            pool_capacity=args.pool_size, q_control=q_control,
        )
        result = outcome.best
        trace_results = [outcome.best, *outcome.per_solver.values()]
    else:
        budget = TimeBudget(seconds=seconds, max_evals=args.max_evals)
        pool = init_pool(args.pool_size, decoder, RngStream(args.seed, 0), budget=budget)
        rng = RngStream(args.seed, 1)
        controller = (
            QController(control_grid(args.method, params[args.method]), rng)
            if q_control else None
        )
        result = SOLVERS[args.method](
            decoder, params[args.method], pool, rng, budget,
            tally=EvalTally(), controller=controller,
        )

    _, artifact = decoder.decode(result.best_keys)
    clock_unit = "evals" if args.time is None and args.max_evals is not None else "s"
    print(f"instance: {os.path.basename(args.instance)}")
    print(f"method: {args.method}")
    print(f"objective: {result.best_fitness.objective!r}")
    print(f"feasible: {result.best_fitness.feasible}")
    print(f"time_to_best: {result.time_to_best!r} {clock_unit}")
    print(f"evaluations: {result.evaluations}")
    print(f"solution: {artifact}")

    if args.out:
        row = ResultRow(
            instance=os.path.basename(args.instance), method=args.method,
            run=0, objective=result.best_fitness.objective,
            time_to_best=result.time_to_best, evaluations=result.evaluations,
        )
        with open(args.out, "w") as fh:
            fh.write(RESULTS_HEADER + ",solution\n")
            fh.write(row.csv() + f",\"{artifact}\"\n")
    if args.trace:
        write_traces(trace_results if trace_results else [result], args.trace)
    return 0


def solver_params_from_args(args):
    config = ExperimentConfig(
        problem=args.problem, instances=[], methods=[args.method],
        seed=args.seed, alpha=args.alpha, params_mode=args.params,
    )
    return solver_params(config)


def _cmd_bench(args) -> int:
    config = parse_config(args.config)
    report = run_experiment(config)
    for name, path in sorted(report.files.items()):
        print(f"{name}: {path}")
    if report.failures:
        for name, reason in report.failures:
            print(f"failed: {name}: {reason}", file=sys.stderr)
        return 1
    return 0


def _cmd_profile(args) -> int:
    rows = read_results(args.results)
    bks = read_bks(args.bks)
    if not profile_csv_from_rows(rows, bks, args.tolerance, args.out):
        print("need at least two methods with best-known values", file=sys.stderr)
        return 1
    print(f"profile: {args.out}")
    return 0


def _cmd_stats(args) -> int:
    rows = read_results(args.results)
    bks = read_bks(args.bks) if args.bks else None
    if not wilcoxon_csv_from_rows(rows, bks, args.out):
        print("need at least two methods and five instances", file=sys.stderr)
        return 1
    print(f"stats: {args.out}")
    return 0


def _cmd_oracle(args) -> int:
    instance = load_instance(args.problem, args.instance, alpha=args.alpha)
    optimum, certificate = brute_force(args.problem, instance)
    print(f"{os.path.basename(args.instance)} {optimum!r}")
    if args.show_certificate:
        print(f"certificate: {certificate}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="keyopt",
        description="Random-key search with a portfolio of metaheuristics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve one instance")
    _add_instance_args(solve)
    solve.add_argument("--method", default="portfolio",
                       choices=["portfolio", *SOLVER_NAMES])
    solve.add_argument("--time", type=float, default=None,
                       help="wall-clock limit in seconds (default: per-problem rule)")
    solve.add_argument("--max-evals", type=int, default=None,
                       help="evaluation budget; used alone it makes runs reproducible")
    solve.add_argument("--seed", type=int, default=1)
    solve.add_argument("--pool-size", type=int, default=20)
    solve.add_argument("--params", default="table", choices=["table", "qlearning"])
    solve.add_argument("--out", default=None, help="write a one-row result CSV")
    solve.add_argument("--trace", default=None, help="write the improvement trace CSV")
    solve.set_defaults(fn=_cmd_solve)

    bench = sub.add_parser("bench", help="run a full experiment from a config file")
    bench.add_argument("--config", required=True)
    bench.set_defaults(fn=_cmd_bench)

    profile = sub.add_parser("profile", help="performance-profile CSV from results")
    profile.add_argument("--results", required=True)
    profile.add_argument("--bks", required=True)
    profile.add_argument("--tolerance", type=float, default=1.0)
    profile.add_argument("--out", required=True)
    profile.set_defaults(fn=_cmd_profile)

    stats = sub.add_parser("stats", help="Wilcoxon p-value matrix from results")
    stats.add_argument("--results", required=True)
    stats.add_argument("--bks", default=None)
    stats.add_argument("--out", required=True)
    stats.set_defaults(fn=_cmd_stats)

    oracle = sub.add_parser("oracle", help="brute-force a tiny instance")
    _add_instance_args(oracle)
    oracle.add_argument("--show-certificate", action="store_true")
    oracle.set_defaults(fn=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
