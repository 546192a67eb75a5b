"""Experiment runner: executes (instance, method, run) cells with derived
seeds, collects result rows, and writes the report files (results, summary,
performance profile, Wilcoxon matrix)."""

import concurrent.futures
import hashlib
import math
import os
from dataclasses import dataclass, field

from .core import EvalTally, RngStream, TimeBudget
from .metrics import performance_profile, rpd, wilcoxon_one_sided
from .pool import init_pool
from .problems import load_instance, make_decoder
from .qlearning import QController
from .solvers import SOLVERS, SOLVER_NAMES, control_grid, defaults_for, run_portfolio, with_overrides

# Relative tolerance when calling an objective equal to the best-known value.
BKS_MATCH_TOL = 1e-9

RESULTS_HEADER = "instance,method,run,objective,time_to_best,evaluations"
SUMMARY_HEADER = "method,best_avg,rpd_best,rpd_avg,time_to_best_avg,n_bks"
PROFILE_HEADER = "method,log2_tau,rho"


@dataclass
class ResultRow:
    instance: str
    method: str
    run: int
    objective: float
    time_to_best: float
    evaluations: int

    def csv(self) -> str:
        return (
            f"{self.instance},{self.method},{self.run},"
            f"{self.objective!r},{self.time_to_best!r},{self.evaluations}"
        )


@dataclass
class ExperimentConfig:
    problem: str
    instances: list
    methods: list
    runs: int = 5
    time_limit: float | None = None  # None applies the per-problem rule
    max_evals: int | None = None
    seed: int = 1
    output_dir: str = "results"
    alpha: int = 1
    pool_capacity: int = 20
    params_mode: str = "table"  # "table" or "qlearning"
    overrides: dict = field(default_factory=dict)  # solver -> {param: value}
    bks_path: str | None = None
    workers: int = 1
    profile_tolerance: float = 1.0

    def __post_init__(self):
        if self.runs < 1:
            raise ValueError(f"runs must be >= 1, got {self.runs}")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError(f"time limit must be > 0, got {self.time_limit}")
        if self.params_mode not in ("table", "qlearning"):
            raise ValueError(f"unknown parameter source: {self.params_mode}")


def default_time_limit(problem_id: str, instance) -> float:
    """Per-problem wall-clock rule: a tenth of the vertex count for the
    p-median, the station count for partitioning, the node count for hub
    trees, and a tenth of the dimension otherwise."""
    if problem_id == "pmedian":
        return 0.1 * instance.n
    if problem_id == "partition":
        return float(instance.stations)
    if problem_id == "hubtree":
        return float(instance.n)
    if problem_id == "tsp":
        return 0.1 * instance.n
    if problem_id == "setcover":
        return 0.1 * instance.n
    raise ValueError(f"no time-limit rule for problem {problem_id}")


def cell_seed(master_seed: int, instance_name: str, method: str, run: int) -> int:
    """Stable 64-bit seed per cell; adding instances or methods never shifts
    the seeds of other cells."""
    text = f"{master_seed}|{instance_name}|{method}|{run}"
    digest = hashlib.blake2b(text.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def solver_params(config: ExperimentConfig) -> dict:
    params = defaults_for(config.problem)
    for solver, fields in config.overrides.items():
        if solver not in params:
            raise ValueError(f"override for unknown solver: {solver}")
        params[solver] = with_overrides(params[solver], fields)
    return params


def run_cell(
    problem_id: str,
    decoder,
    method: str,
    params: dict,
    seed: int,
    seconds: float | None,
    max_evals: int | None,
    pool_capacity: int,
    q_control: bool,
):
    """One (instance, method, run) execution; returns a RunResult."""
    if method == "portfolio":
        outcome = run_portfolio(
            decoder, list(SOLVER_NAMES), params, seed,
            seconds=seconds, max_evals=max_evals,
            pool_capacity=pool_capacity, q_control=q_control,
        )
        return outcome.best
    if method not in SOLVERS:
        raise ValueError(f"unknown method: {method}")
    budget = TimeBudget(seconds=seconds, max_evals=max_evals)
    pool = init_pool(pool_capacity, decoder, RngStream(seed, 0), budget=budget)
    rng = RngStream(seed, 1)
    controller = QController(control_grid(method, params[method]), rng) if q_control else None
    return SOLVERS[method](
        decoder, params[method], pool, rng, budget,
        tally=EvalTally(), controller=controller,
    )


@dataclass
class ExperimentReport:
    rows: list
    failures: list  # (instance, reason)
    files: dict     # logical name -> written path


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Execute every (instance, method, run) cell and write the report
    files.  Unparseable instances are recorded as failed cells and the run
    continues."""
    os.makedirs(config.output_dir, exist_ok=True)
    params = solver_params(config)
    q_control = config.params_mode == "qlearning"

    cells = []
    failures = []
    for path in config.instances:
        name = os.path.basename(str(path))
        try:
            instance = load_instance(config.problem, path, alpha=config.alpha)
            decoder = make_decoder(config.problem, instance)
        except Exception as exc:  # noqa: BLE001 - recorded, run continues
            failures.append((name, str(exc)))
            continue
        seconds = config.time_limit
        if seconds is None and config.max_evals is None:
            seconds = default_time_limit(config.problem, instance)
        for method in config.methods:
            for run in range(config.runs):
                cells.append((name, decoder, method, run, seconds))

    def execute(cell):
        name, decoder, method, run, seconds = cell
        seed = cell_seed(config.seed, name, method, run)
        result = run_cell(
            config.problem, decoder, method, params, seed,
            seconds, config.max_evals, config.pool_capacity, q_control,
        )
        return ResultRow(
            instance=name, method=method, run=run,
            objective=result.best_fitness.objective,
            time_to_best=result.time_to_best,
            evaluations=result.evaluations,
        )

    rows = []
    if config.workers > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=config.workers) as pool_exec:
            rows = list(pool_exec.map(execute, cells))
    else:
        rows = [execute(cell) for cell in cells]

    files = {}
    results_path = os.path.join(config.output_dir, "results.csv")
    write_results(rows, results_path)
    files["results"] = results_path

    bks = read_bks(config.bks_path) if config.bks_path else None
    if bks:
        summary_path = os.path.join(config.output_dir, "summary.csv")
        write_summary(rows, bks, summary_path)
        files["summary"] = summary_path
        profile_path = os.path.join(config.output_dir, "profile.csv")
        if profile_csv_from_rows(rows, bks, config.profile_tolerance, profile_path):
            files["profile"] = profile_path
        stats_path = os.path.join(config.output_dir, "wilcoxon.csv")
        if wilcoxon_csv_from_rows(rows, bks, stats_path):
            files["stats"] = stats_path
    return ExperimentReport(rows=rows, failures=failures, files=files)


def write_results(rows, path) -> None:
    with open(path, "w") as fh:
        fh.write(RESULTS_HEADER + "\n")
        for row in rows:
            fh.write(row.csv() + "\n")


def read_results(path):
    rows = []
    with open(path) as fh:
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise ValueError(f"unexpected results header: {header!r}")
        for ln in fh:
            ln = ln.strip()
            if not ln:
                continue
            inst, method, run, obj, ttb, evals = ln.split(",")
            rows.append(ResultRow(inst, method, int(run), float(obj),
                                  float(ttb), int(evals)))
    return rows


def read_bks(path) -> dict:
    """Best-known-solution file: one "instance value" pair per line."""
    out = {}
    with open(path) as fh:
        for ln in fh:
            ln = ln.strip()
            if not ln or ln.startswith("#"):
                continue
            name, value = ln.split()
            out[name] = float(value)
    return out


def matches_bks(objective: float, bks: float) -> bool:
    scale = max(1.0, abs(bks))
    return objective <= bks + BKS_MATCH_TOL * scale


def _group(rows):
    """rows -> {(instance, method): [ResultRow, ...]}"""
    grouped = {}
    for row in rows:
        grouped.setdefault((row.instance, row.method), []).append(row)
    return grouped


def write_summary(rows, bks: dict, path) -> None:
    grouped = _group(rows)
    methods = sorted({m for _, m in grouped})
    with open(path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for method in methods:
            pairs = {inst: cells for (inst, m), cells in grouped.items() if m == method}
            bests, rpd_bests, rpd_all, times, n_bks = [], [], [], [], 0
            for inst, cells in sorted(pairs.items()):
                best = min(c.objective for c in cells)
                bests.append(best)
                times.append(sum(c.time_to_best for c in cells) / len(cells))
                if inst in bks:
                    rpd_bests.append(rpd(best, bks[inst]))
                    rpd_all.extend(rpd(c.objective, bks[inst]) for c in cells)
                    if matches_bks(best, bks[inst]):
                        n_bks += 1
            def mean(vals):
                return sum(vals) / len(vals) if vals else math.nan
            fh.write(
                f"{method},{mean(bests)!r},{mean(rpd_bests)!r},"
                f"{mean(rpd_all)!r},{mean(times)!r},{n_bks}\n"
            )


def profile_csv_from_rows(rows, bks: dict, tolerance: float, path) -> bool:
    grouped = _group(rows)
    times, rpd_best = {}, {}
    for (inst, method), cells in grouped.items():
        if inst not in bks:
            continue
        times[(inst, method)] = sum(c.time_to_best for c in cells) / len(cells)
        rpd_best[(inst, method)] = rpd(min(c.objective for c in cells), bks[inst])
    methods = {m for _, m in times}
    if len(methods) < 2 or not times:
        return False
    profile = performance_profile(times, rpd_best, tolerance)
    with open(path, "w") as fh:
        fh.write(PROFILE_HEADER + "\n")
        for method, log_tau, value in profile.rows():
            fh.write(f"{method},{log_tau!r},{value!r}\n")
    return True


def wilcoxon_csv_from_rows(rows, bks: dict | None, path) -> bool:
    """Pairwise one-sided p-value matrix over per-instance best results
    (RPD when best-known values are available, raw objectives otherwise)."""
    grouped = _group(rows)
    methods = sorted({m for _, m in grouped})
    instances = sorted({i for i, _ in grouped})
    if len(methods) < 2 or len(instances) < 5:
        return False
    series = {}
    for method in methods:
        values = []
        for inst in instances:
            cells = grouped.get((inst, method))
            if cells is None:
                return False
            best = min(c.objective for c in cells)
            if bks and inst in bks:
                values.append(rpd(best, bks[inst]))
            else:
                values.append(best)
        series[method] = values
    with open(path, "w") as fh:
        fh.write("method," + ",".join(methods) + "\n")
        for row_m in methods:
            cells = [row_m]
            for col_m in methods:
                if row_m == col_m:
                    cells.append("")
                else:
                    res = wilcoxon_one_sided(series[row_m], series[col_m])
                    cells.append(repr(res.p_value))
            fh.write(",".join(cells) + "\n")
    return True


def write_trace(result, path) -> None:
    """Improvement trace rows: solver, budget-clock seconds, objective."""
    write_traces([result], path)


def write_traces(results, path) -> None:
    """Trace rows for several runs in one file, solver column first."""
    with open(path, "w") as fh:
        fh.write("solver,seconds,objective\n")
        for result in results:
            for t, obj in result.trace:
                fh.write(f"{result.solver},{t!r},{obj!r}\n")


def parse_config(path) -> ExperimentConfig:
    """Plain key-value config: `key = value` lines, '#' comments, repeated
    `instance` lines accumulate, and dotted keys like `sa.t0 = 500` override
    solver parameters."""
    raw = {}
    instances = []
    overrides = {}
    with open(path) as fh:
        for lineno, ln in enumerate(fh, start=1):
            ln = ln.split("#", 1)[0].strip()
            if not ln:
                continue
            if "=" not in ln:
                raise ValueError(f"{path} line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in ln.split("=", 1))
            if key == "instance":
                instances.append(value)
            elif key == "instances":
                instances.extend(value.split())
            elif "." in key:
                solver, param = key.split(".", 1)
                overrides.setdefault(solver, {})[param] = float(value)
            else:
                raw[key] = value

    def get(key, cast, default):
        return cast(raw[key]) if key in raw else default

    methods = raw.get("methods", "portfolio").split()
    return ExperimentConfig(
        problem=raw["problem"],
        instances=instances,
        methods=methods,
        runs=get("runs", int, 5),
        time_limit=get("time_limit", float, None),
        max_evals=get("max_evals", int, None),
        seed=get("seed", int, 1),
        output_dir=raw.get("output_dir", "results"),
        alpha=get("alpha", int, 1),
        pool_capacity=get("pool_size", int, 20),
        params_mode=raw.get("params", "table"),
        overrides=overrides,
        bks_path=raw.get("bks"),
        workers=get("workers", int, 1),
        profile_tolerance=get("profile_tolerance", float, 1.0),
    )
