"""Single-solution metaheuristics: simulated annealing, GRASP, iterated
local search, variable neighborhood search, and large neighborhood search.

All drivers share one contract: start from a random vector, improve it until
the budget expires, offer every strict improvement of their own best to the
shared pool, and return a RunResult.  With a parameter controller attached,
each outer iteration queries the controller for its configuration up front
and reports the reward when the iteration ends.
"""

import math

import numpy as np

from ..core import Decoder, EvalTally, RngStream, TimeBudget, evaluate, random_vector
from ..local_search import FAREY_ORDER7, BudgetTicker, draw_in_interval, rvnd
from ..pool import ElitePool
from ..qlearning import QController
from ..variation import ShakeParams, shake
from .base import TEMP_FLOOR, BestTracker, RunResult, metropolis_accept
from .params import with_overrides


def _shake_range(beta_min: float, beta_max: float) -> ShakeParams:
    # Controller moves can cross the pair; keep it ordered.
    lo, hi = sorted((beta_min, beta_max))
    return ShakeParams(lo, hi)


def _controlled(params, controller: QController | None, progress: float):
    if controller is None:
        return params
    return with_overrides(params, controller.select(progress))


def run_sa(
    decoder: Decoder,
    params,
    pool: ElitePool | None,
    rng: RngStream,
    budget: TimeBudget,
    tally: EvalTally | None = None,
    controller: QController | None = None,
) -> RunResult:
    """Metropolis sampling over shaken neighbors with geometric cooling; the
    incumbent is polished by RVND before every temperature drop."""
    tally = tally if tally is not None else EvalTally()
    tracker = BestTracker(budget, tally, pool)
    keys = random_vector(decoder.dimension, rng)
    fit = evaluate(decoder, keys, tally)
    tracker.consider(keys, fit)

    temp = params.t0
    while not budget.expired(tally.count):
        prev_best = tracker.best_objective
        p = _controlled(params, controller, budget.progress(tally.count))
        betas = _shake_range(p.beta_min, p.beta_max)
        for _ in range(p.sa_max):
            if budget.expired(tally.count):
                break
            cand = shake(keys, betas, rng)
            cand_fit = evaluate(decoder, cand, tally)
            tracker.consider(cand, cand_fit)
            if metropolis_accept(cand_fit.objective - fit.objective, temp, rng):
                keys, fit = cand, cand_fit
        keys, fit = rvnd(keys, decoder, pool, rng, fit, tally, budget)
        tracker.consider(keys, fit)
        temp *= p.alpha
        if temp < TEMP_FLOOR:
            temp = p.t0
        if controller is not None:
            controller.observe(prev_best, tracker.best_objective, budget.progress(tally.count))
    return tracker.result("sa")


def run_ils(
    decoder: Decoder,
    params,
    pool: ElitePool | None,
    rng: RngStream,
    budget: TimeBudget,
    tally: EvalTally | None = None,
    controller: QController | None = None,
) -> RunResult:
    """Shake the best-so-far, descend with RVND, keep the result when it
    improves."""
    tally = tally if tally is not None else EvalTally()
    tracker = BestTracker(budget, tally, pool)
    incumbent = random_vector(decoder.dimension, rng)
    fit = evaluate(decoder, incumbent, tally)
    tracker.consider(incumbent, fit)

    while not budget.expired(tally.count):
        prev_best = tracker.best_objective
        p = _controlled(params, controller, budget.progress(tally.count))
        cand = shake(incumbent, _shake_range(p.beta_min, p.beta_max), rng)
        cand, cand_fit = rvnd(cand, decoder, pool, rng, None, tally, budget)
        tracker.consider(cand, cand_fit)
        if cand_fit.objective < fit.objective:
            incumbent, fit = cand, cand_fit
        if controller is not None:
            controller.observe(prev_best, tracker.best_objective, budget.progress(tally.count))
    return tracker.result("ils")


def run_vns(
    decoder: Decoder,
    params,
    pool: ElitePool | None,
    rng: RngStream,
    budget: TimeBudget,
    tally: EvalTally | None = None,
    controller: QController | None = None,
) -> RunResult:
    """Shaking intensity grows with the neighborhood index k (rate k *
    beta_min); improvement resets k to 1, failure advances it, and k wraps
    after k_max."""
    tally = tally if tally is not None else EvalTally()
    tracker = BestTracker(budget, tally, pool)
    incumbent = random_vector(decoder.dimension, rng)
    fit = evaluate(decoder, incumbent, tally)
    tracker.consider(incumbent, fit)

    k = 1
    while not budget.expired(tally.count):
        prev_best = tracker.best_objective
        p = _controlled(params, controller, budget.progress(tally.count))
        beta = min(1.0, k * p.beta_min)
        cand = shake(incumbent, ShakeParams(beta, beta), rng)
        cand, cand_fit = rvnd(cand, decoder, pool, rng, None, tally, budget)
        tracker.consider(cand, cand_fit)
        if cand_fit.objective < fit.objective:
            incumbent, fit = cand, cand_fit
            k = 1
        else:
            k += 1
            if k > p.k_max:
                k = 1
        if controller is not None:
            controller.observe(prev_best, tracker.best_objective, budget.progress(tally.count))
    return tracker.result("vns")


def _line_search(work, idx, spacing, decoder, rng, ticker):
    """Best value for one key over a grid of the given spacing, one uniform
    draw per grid cell; restores the key before returning."""
    original = work[idx]
    best_v = None
    best_fit = None
    cells = math.ceil(1.0 / spacing)
    for c in range(cells):
        lo = c * spacing
        hi = min((c + 1) * spacing, 1.0)
        if hi <= lo:
            continue
        work[idx] = rng.uniform(lo, hi)
        fit = evaluate(decoder, work, ticker.tally)
        if best_fit is None or fit.objective < best_fit.objective:
            best_v, best_fit = work[idx], fit
        if ticker.out_of_time():
            break
    work[idx] = original
    return best_v, best_fit


def _construct(incumbent, spacing, gamma, decoder, rng, tally, budget):
    """Semi-greedy construction: line-search every unfixed key, fix a random
    member of the restricted candidate list at its best value, repeat.

    Returns (None, None) when the budget expires before construction ends.
    """
    ticker = BudgetTicker(tally, budget)
    work = incumbent.copy()
    unfixed = list(range(len(work)))
    fit = None
    while unfixed:
        if budget is not None and budget.expired(ticker.tally.count):
            return None, None
        values = {}
        fits = {}
        for i in unfixed:
            v, f = _line_search(work, i, spacing, decoder, rng, ticker)
            if v is None:
                return None, None
            values[i], fits[i] = v, f
        objs = [fits[i].objective for i in unfixed]
        g_best, g_worst = min(objs), max(objs)
        threshold = g_best + gamma * (g_worst - g_best)
        rcl = [i for i in unfixed if fits[i].objective <= threshold]
        pick = rcl[rng.integers(0, len(rcl))]
        work[pick] = values[pick]
        fit = fits[pick]
        unfixed.remove(pick)
    return work, fit


def run_grasp(
    decoder: Decoder,
    params,
    pool: ElitePool | None,
    rng: RngStream,
    budget: TimeBudget,
    tally: EvalTally | None = None,
    controller: QController | None = None,
) -> RunResult:
    """Semi-greedy construction over a shrinking grid followed by RVND, with
    Metropolis acceptance of the new incumbent.

    The grid spacing starts at hs, halves after every non-improving
    iteration, and resets to hs once it would pass he.
    """
    tally = tally if tally is not None else EvalTally()
    tracker = BestTracker(budget, tally, pool)
    incumbent = random_vector(decoder.dimension, rng)
    fit = evaluate(decoder, incumbent, tally)
    tracker.consider(incumbent, fit)

    spacing = params.hs
    temp = params.t0
    while not budget.expired(tally.count):
        prev_best = tracker.best_objective
        p = _controlled(params, controller, budget.progress(tally.count))
        gamma = rng.random()
        cand, cand_fit = _construct(incumbent, spacing, gamma, decoder, rng, tally, budget)
        if cand is None:
            break
        cand, cand_fit = rvnd(cand, decoder, pool, rng, cand_fit, tally, budget)
        tracker.consider(cand, cand_fit)
        improved = cand_fit.objective < fit.objective
        if metropolis_accept(cand_fit.objective - fit.objective, temp, rng):
            incumbent, fit = cand, cand_fit
        if not improved:
            spacing /= 2.0
            if spacing < p.he:
                spacing = p.hs
        temp *= p.alpha
        if temp < TEMP_FLOOR:
            temp = p.t0
        if controller is not None:
            controller.observe(prev_best, tracker.best_objective, budget.progress(tally.count))
    return tracker.result("grasp")


def lns_repair(
    keys: np.ndarray,
    removed: np.ndarray,
    decoder: Decoder,
    rng: RngStream,
    fitness=None,
    tally: EvalTally | None = None,
    budget: TimeBudget | None = None,
):
    """Rebuild the removed keys one at a time in random order, giving each
    the best of one draw per Farey interval."""
    ticker = BudgetTicker(tally, budget)
    work = np.array(keys, copy=True)
    fit = fitness if fitness is not None else evaluate(decoder, work, ticker.tally)
    stop = False
    for idx in rng.gen.permutation(np.asarray(removed)):
        best_v = None
        best_fit = None
        for j in range(len(FAREY_ORDER7) - 1):
            work[idx] = draw_in_interval(rng, FAREY_ORDER7[j], FAREY_ORDER7[j + 1])
            cand = evaluate(decoder, work, ticker.tally)
            if best_fit is None or cand.objective < best_fit.objective:
                best_v, best_fit = work[idx], cand
            if ticker.out_of_time():
                stop = True
                break
        if best_v is None:
            work[idx] = keys[idx]
        else:
            work[idx] = best_v
            fit = best_fit
        if stop:
            break
    return work, fit


def run_lns(
    decoder: Decoder,
    params,
    pool: ElitePool | None,
    rng: RngStream,
    budget: TimeBudget,
    tally: EvalTally | None = None,
    controller: QController | None = None,
) -> RunResult:
    """Destroy a random share of the keys, repair them Farey-greedily,
    accept by the Metropolis rule, and polish every new global best with
    RVND."""
    tally = tally if tally is not None else EvalTally()
    tracker = BestTracker(budget, tally, pool)
    keys = random_vector(decoder.dimension, rng)
    fit = evaluate(decoder, keys, tally)
    tracker.consider(keys, fit)

    n = decoder.dimension
    temp = params.t0
    while not budget.expired(tally.count):
        prev_best = tracker.best_objective
        p = _controlled(params, controller, budget.progress(tally.count))
        lo, hi = sorted((p.beta_min, p.beta_max))
        beta = rng.uniform(lo, hi) if hi > lo else lo
        count = min(n, max(1, math.ceil(beta * n)))
        removed = rng.choice(n, size=count, replace=False)
        cand, cand_fit = lns_repair(keys, removed, decoder, rng, fit, tally, budget)
        if tracker.consider(cand, cand_fit):
            cand, cand_fit = rvnd(cand, decoder, pool, rng, cand_fit, tally, budget)
            tracker.consider(cand, cand_fit)
        if metropolis_accept(cand_fit.objective - fit.objective, temp, rng):
            keys, fit = cand, cand_fit
        temp *= p.alpha
        if temp < TEMP_FLOOR:
            temp = p.t0
        if controller is not None:
            controller.observe(prev_best, tracker.best_objective, budget.progress(tally.count))
    return tracker.result("lns")
