"""Benchmark metrics: relative percentage deviation, time performance
profiles with a quality-tolerance convergence test, and the one-sided
Wilcoxon signed-rank test."""

import itertools
import math
from dataclasses import dataclass, field

# Floor for time-to-best values entering performance ratios, so instant
# bests (0.0 s) do not divide by zero.
TIME_FLOOR = 1e-9


class UndefinedBaselineError(ValueError):
    """RPD against a non-positive best-known value is undefined."""


def rpd(z: float, bks: float) -> float:
    """Relative percentage deviation of a solution value from the
    best-known solution: (Z - BKS) / BKS * 100."""
    if bks <= 0:
        raise UndefinedBaselineError(f"best-known value must be > 0, got {bks}")
    return (z - bks) / bks * 100.0


@dataclass
class PerformanceProfile:
    """Per-method cumulative distribution of time ratios to the fastest
    method."""

    methods: list
    instances: list
    breakpoints: list          # sorted tau values
    rho: dict = field(default_factory=dict)  # method -> values aligned to breakpoints
    ratios: dict = field(default_factory=dict)  # (instance, method) -> ratio

    def value(self, method, tau: float) -> float:
        """Step-function value rho_method(tau)."""
        out = 0.0
        for bp, v in zip(self.breakpoints, self.rho[method]):
            if bp <= tau:
                out = v
            else:
                break
        return out

    def rows(self):
        """Plot-ready rows: (method, log2 tau, rho)."""
        for method in self.methods:
            for bp, v in zip(self.breakpoints, self.rho[method]):
                yield method, math.log2(bp), v


def performance_profile(times: dict, rpd_best: dict, tolerance: float) -> PerformanceProfile:
    """Build the profile from mean time-to-best and best-run RPD per
    (instance, method) pair.

    Pairs whose RPD exceeds the tolerance fail the convergence test: their
    time becomes infinite.  Ratios divide by the per-instance fastest
    method; rho_h(tau) is the fraction of instances where method h stayed
    within a factor tau of that fastest time.
    """
    instances = sorted({key[0] for key in times})
    methods = sorted({key[1] for key in times})
    if not instances or len(methods) < 2:
        raise ValueError("profile needs at least one instance and two methods")

    adjusted = {}
    for inst in instances:
        for m in methods:
            t = times.get((inst, m), math.inf)
            if rpd_best.get((inst, m), math.inf) > tolerance:
                t = math.inf
            adjusted[(inst, m)] = max(t, TIME_FLOOR) if math.isfinite(t) else math.inf

    ratios = {}
    for inst in instances:
        fastest = min(adjusted[(inst, m)] for m in methods)
        for m in methods:
            t = adjusted[(inst, m)]
            if math.isfinite(t) and math.isfinite(fastest):
                ratios[(inst, m)] = t / fastest
            else:
                ratios[(inst, m)] = math.inf

    finite = sorted({r for r in ratios.values() if math.isfinite(r)} | {1.0})
    rho = {}
    total = len(instances)
    for m in methods:
        values = []
        for bp in finite:
            hit = sum(1 for inst in instances if ratios[(inst, m)] <= bp)
            values.append(hit / total)
        rho[m] = values
    return PerformanceProfile(
        methods=methods, instances=instances, breakpoints=finite, rho=rho, ratios=ratios
    )


@dataclass
class WilcoxonResult:
    p_value: float
    statistic: float  # sum of positive-difference ranks
    n_effective: int
    exact: bool
    degenerate: bool = False


# Exact enumeration is cheap up to this many non-zero differences.
EXACT_LIMIT = 12


def _ranks_with_ties(values):
    """Average ranks (1-based) of values, ties sharing their mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _phi(z: float) -> float:
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


def wilcoxon_one_sided(x, y) -> WilcoxonResult:
    """Signed-rank test of the alternative "x is stochastically smaller than
    y" on paired samples.

    Zero differences are discarded; tied absolute differences share average
    ranks.  The null distribution is enumerated exactly for up to
    EXACT_LIMIT effective pairs, otherwise a normal approximation with tie
    and continuity corrections is used.
    """
    x = list(x)
    y = list(y)
    if len(x) != len(y):
        raise ValueError(f"paired samples differ in length: {len(x)} vs {len(y)}")
    if len(x) < 5:
        raise ValueError(f"need at least 5 pairs, got {len(x)}")
    diffs = [a - b for a, b in zip(x, y) if a != b]
    n = len(diffs)
    if n == 0:
        return WilcoxonResult(p_value=1.0, statistic=0.0, n_effective=0,
                              exact=True, degenerate=True)

    abs_diffs = [abs(d) for d in diffs]
    ranks = _ranks_with_ties(abs_diffs)
    w_pos = sum(r for d, r in zip(diffs, ranks) if d > 0)

    if n <= EXACT_LIMIT:
        hits = 0
        for signs in itertools.product((0, 1), repeat=n):
            w = sum(r for s, r in zip(signs, ranks) if s)
            if w <= w_pos + 1e-9:
                hits += 1
        return WilcoxonResult(p_value=hits / 2**n, statistic=w_pos,
                              n_effective=n, exact=True)

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    # Tie correction over groups of equal absolute differences.
    groups = {}
    for d in abs_diffs:
        groups[d] = groups.get(d, 0) + 1
    var -= sum(t**3 - t for t in groups.values()) / 48.0
    if var <= 0:
        return WilcoxonResult(p_value=1.0, statistic=w_pos, n_effective=n,
                              exact=False, degenerate=True)
    z = (w_pos + 0.5 - mean) / math.sqrt(var)
    return WilcoxonResult(p_value=min(1.0, _phi(z)), statistic=w_pos,
                          n_effective=n, exact=False)
