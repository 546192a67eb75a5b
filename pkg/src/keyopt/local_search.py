"""Descent heuristics over the key space: a randomized VND coordinator on
top of four problem-independent neighborhoods (swap, Farey, mirror,
Nelder-Mead).

Every function here is a descent method: the returned vector never has a
worse objective than the incumbent it started from.  All of them honor an
optional time budget, checked between candidate evaluations every
BUDGET_CHECK_EVERY decodes, returning the incumbent on expiry.
"""

import math

import numpy as np

from .core import (
    Decoder,
    DimensionError,
    EvalTally,
    Fitness,
    RngStream,
    TimeBudget,
    evaluate,
    mirror_key,
)
from .variation import BlendParams, blend

# Ordered fractions of the order-7 Farey sequence; the 18 gaps between
# consecutive terms are the sampling intervals used for key refinement.
FAREY_ORDER7 = np.array(
    [
        0 / 1, 1 / 7, 1 / 6, 1 / 5, 1 / 4, 2 / 7, 1 / 3, 2 / 5, 3 / 7, 1 / 2,
        4 / 7, 3 / 5, 2 / 3, 5 / 7, 3 / 4, 4 / 5, 5 / 6, 6 / 7, 1 / 1,
    ]
)

BUDGET_CHECK_EVERY = 64

SWAP = "swap"
FAREY = "farey"
MIRROR = "mirror"
NELDER_MEAD = "nelder_mead"
ALL_NEIGHBORHOODS = (SWAP, FAREY, MIRROR, NELDER_MEAD)


def draw_in_interval(rng: RngStream, lo: float, hi: float) -> float:
    """Uniform draw strictly inside (lo, hi)."""
    v = float(rng.gen.uniform(lo, hi))
    if v <= lo:
        v = float(np.nextafter(lo, hi))
    return v


class BudgetTicker:
    """Counts candidate evaluations and polls the budget periodically."""

    def __init__(self, tally: EvalTally | None, budget: TimeBudget | None):
        self.tally = tally if tally is not None else EvalTally()
        self.budget = budget
        self._since_check = 0

    def out_of_time(self) -> bool:
        if self.budget is None:
            return False
        self._since_check += 1
        if self._since_check < BUDGET_CHECK_EVERY:
            return False
        self._since_check = 0
        return self.budget.expired(self.tally.count)


def _ensure_fitness(keys, decoder, fitness, tally):
    if fitness is None:
        return evaluate(decoder, keys, tally)
    return fitness


def swap_ls(
    keys: np.ndarray,
    decoder: Decoder,
    rng: RngStream,
    fitness: Fitness | None = None,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
) -> tuple[np.ndarray, Fitness]:
    """First-improvement scan over all unordered key pairs, visited in a
    freshly randomized index order; an improving swap is kept and the scan
    continues from the new incumbent."""
    ticker = BudgetTicker(tally, budget)
    best = np.array(keys, copy=True)
    best_fit = _ensure_fitness(keys, decoder, fitness, ticker.tally)
    n = len(keys)
    if n < 2:
        return best, best_fit
    order = rng.permutation(n)
    work = best.copy()
    for i in range(n - 1):
        for j in range(i + 1, n):
            a, b = order[i], order[j]
            work[a], work[b] = work[b], work[a]
            fit = evaluate(decoder, work, ticker.tally)
            if fit.objective < best_fit.objective:
                best_fit = fit
                best = work.copy()
            else:
                work[a], work[b] = work[b], work[a]
            if ticker.out_of_time():
                return best, best_fit
    return best, best_fit


def farey_ls(
    keys: np.ndarray,
    decoder: Decoder,
    rng: RngStream,
    fitness: Fitness | None = None,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
) -> tuple[np.ndarray, Fitness]:
    """For each key in randomized order, try one candidate value drawn from
    each of the 18 Farey intervals; first improvement is kept."""
    ticker = BudgetTicker(tally, budget)
    best = np.array(keys, copy=True)
    best_fit = _ensure_fitness(keys, decoder, fitness, ticker.tally)
    work = best.copy()
    for idx in rng.permutation(len(keys)):
        for j in range(len(FAREY_ORDER7) - 1):
            work[idx] = draw_in_interval(rng, FAREY_ORDER7[j], FAREY_ORDER7[j + 1])
            fit = evaluate(decoder, work, ticker.tally)
            if fit.objective < best_fit.objective:
                best_fit = fit
                best = work.copy()
            else:
                work[idx] = best[idx]
            if ticker.out_of_time():
                return best, best_fit
    return best, best_fit


def mirror_ls(
    keys: np.ndarray,
    decoder: Decoder,
    rng: RngStream,
    fitness: Fitness | None = None,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
) -> tuple[np.ndarray, Fitness]:
    """Test the complement of each key in randomized order, first
    improvement kept."""
    ticker = BudgetTicker(tally, budget)
    best = np.array(keys, copy=True)
    best_fit = _ensure_fitness(keys, decoder, fitness, ticker.tally)
    work = best.copy()
    for idx in rng.permutation(len(keys)):
        work[idx] = mirror_key(work[idx])
        fit = evaluate(decoder, work, ticker.tally)
        if fit.objective < best_fit.objective:
            best_fit = fit
            best = work.copy()
        else:
            work[idx] = best[idx]
        if ticker.out_of_time():
            return best, best_fit
    return best, best_fit


def nelder_mead_iterations(n: int) -> int:
    """Iteration budget for the simplex search on an n-vector."""
    return max(1, math.ceil(n * math.exp(-2)))


def nelder_mead_ls(
    keys1: np.ndarray,
    keys2: np.ndarray,
    keys3: np.ndarray,
    decoder: Decoder,
    rng: RngStream,
    fits: tuple[Fitness, Fitness, Fitness] | None = None,
    rho: float = 0.5,
    mu: float = 0.02,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
) -> tuple[np.ndarray, Fitness]:
    """Simplex search over three vertices using blending as the geometric
    operator (reflection, expansion, inside/outside contraction, shrink).

    Returns the best simplex vertex, never worse than the best input.
    """
    if not (len(keys1) == len(keys2) == len(keys3)):
        raise DimensionError("simplex vertices differ in length")
    ticker = BudgetTicker(tally, budget)
    n = len(keys1)
    plus = BlendParams(rho=rho, mu=mu, factor=1)
    minus = BlendParams(rho=rho, mu=mu, factor=-1)

    simplex = [np.array(k, copy=True) for k in (keys1, keys2, keys3)]
    if fits is None:
        fvals = [evaluate(decoder, k, ticker.tally) for k in simplex]
    else:
        fvals = list(fits)
    order = sorted(range(3), key=lambda i: fvals[i].objective)
    simplex = [simplex[i] for i in order]
    fvals = [fvals[i] for i in order]

    centroid = blend(simplex[0], simplex[1], plus, rng)
    for _ in range(nelder_mead_iterations(n)):
        shrink = False
        reflected = blend(centroid, simplex[2], minus, rng)
        f_r = evaluate(decoder, reflected, ticker.tally)
        if f_r.objective < fvals[0].objective:
            expanded = blend(reflected, centroid, minus, rng)
            f_e = evaluate(decoder, expanded, ticker.tally)
            if f_e.objective < f_r.objective:
                simplex[2], fvals[2] = expanded, f_e
            else:
                simplex[2], fvals[2] = reflected, f_r
        elif f_r.objective < fvals[1].objective:
            simplex[2], fvals[2] = reflected, f_r
        elif f_r.objective < fvals[2].objective:
            contracted = blend(reflected, centroid, plus, rng)
            f_c = evaluate(decoder, contracted, ticker.tally)
            if f_c.objective < f_r.objective:
                simplex[2], fvals[2] = contracted, f_c
            else:
                shrink = True
        else:
            contracted = blend(centroid, simplex[2], plus, rng)
            f_c = evaluate(decoder, contracted, ticker.tally)
            if f_c.objective < fvals[2].objective:
                simplex[2], fvals[2] = contracted, f_c
            else:
                shrink = True
        if shrink:
            for i in (1, 2):
                simplex[i] = blend(simplex[0], simplex[i], plus, rng)
                fvals[i] = evaluate(decoder, simplex[i], ticker.tally)
        order = sorted(range(3), key=lambda i: fvals[i].objective)
        simplex = [simplex[i] for i in order]
        fvals = [fvals[i] for i in order]
        centroid = blend(simplex[0], simplex[1], plus, rng)
        if ticker.out_of_time():
            break
    return simplex[0], fvals[0]


def rvnd(
    keys: np.ndarray,
    decoder: Decoder,
    pool,
    rng: RngStream,
    fitness: Fitness | None = None,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
) -> tuple[np.ndarray, Fitness]:
    """Randomized variable neighborhood descent.

    Picks neighborhoods at random from the active list; an improvement
    restarts the list, a failure removes the neighborhood; stops when the
    list is empty or the budget expires.  Nelder-Mead needs two elite
    partners, so it joins the list only when the pool holds at least two
    entries.
    """
    ticker = BudgetTicker(tally, budget)
    best = np.array(keys, copy=True)
    best_fit = _ensure_fitness(keys, decoder, fitness, ticker.tally)

    def full_list():
        names = [SWAP, FAREY, MIRROR]
        if pool is not None and pool.size >= 2:
            names.append(NELDER_MEAD)
        return names

    active = full_list()
    while active:
        if budget is not None and budget.expired(ticker.tally.count):
            break
        name = active[rng.integers(0, len(active))]
        if name == SWAP:
            cand, cand_fit = swap_ls(best, decoder, rng, best_fit, ticker.tally, budget)
        elif name == FAREY:
            cand, cand_fit = farey_ls(best, decoder, rng, best_fit, ticker.tally, budget)
        elif name == MIRROR:
            cand, cand_fit = mirror_ls(best, decoder, rng, best_fit, ticker.tally, budget)
        else:
            k2, f2 = pool.sample(rng)
            k3, f3 = pool.sample(rng)
            cand, cand_fit = nelder_mead_ls(
                best, k2, k3, decoder, rng, (best_fit, f2, f3),
                tally=ticker.tally, budget=budget,
            )
        if cand_fit.objective < best_fit.objective:
            best, best_fit = cand, cand_fit
            active = full_list()
        else:
            active.remove(name)
    return best, best_fit
