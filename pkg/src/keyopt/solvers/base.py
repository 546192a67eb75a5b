"""Shared solver plumbing: run results, best-so-far tracking with pool
offers, and the Metropolis acceptance rule."""

import math
from dataclasses import dataclass, field

import numpy as np

from ..core import EvalTally, Fitness, TimeBudget
from ..pool import ElitePool

# Reheat threshold: cooling below this resets the temperature to its start
# value so a wall-clock run keeps exploring.
TEMP_FLOOR = 1e-4


@dataclass
class RunResult:
    """Outcome of one solver run."""

    solver: str
    best_keys: np.ndarray
    best_fitness: Fitness
    time_to_best: float
    evaluations: int
    trace: list[tuple[float, float]] = field(default_factory=list)


class BestTracker:
    """Tracks a solver's own best solution.

    Every strict improvement is appended to the trace, timestamped with the
    budget clock, and offered to the shared elite pool.
    """

    def __init__(self, budget: TimeBudget, tally: EvalTally, pool: ElitePool | None = None):
        self.budget = budget
        self.tally = tally
        self.pool = pool
        self.best_keys: np.ndarray | None = None
        self.best_fitness: Fitness | None = None
        self.time_to_best = 0.0
        self.trace: list[tuple[float, float]] = []

    @property
    def best_objective(self) -> float:
        return math.inf if self.best_fitness is None else self.best_fitness.objective

    def consider(self, keys: np.ndarray, fitness: Fitness) -> bool:
        if fitness.objective >= self.best_objective:
            return False
        self.best_keys = np.array(keys, copy=True)
        self.best_fitness = fitness
        self.time_to_best = self.budget.elapsed(self.tally.count)
        self.trace.append((self.time_to_best, fitness.objective))
        if self.pool is not None:
            self.pool.offer(keys, fitness)
        return True

    def result(self, solver: str) -> RunResult:
        if self.best_keys is None:
            raise RuntimeError("solver produced no solution")
        return RunResult(
            solver=solver,
            best_keys=self.best_keys,
            best_fitness=self.best_fitness,
            time_to_best=self.time_to_best,
            evaluations=self.tally.count,
            trace=list(self.trace),
        )


def metropolis_accept(delta: float, temperature: float, rng) -> bool:
    """Accept a candidate whose objective changed by `delta`: always when
    delta <= 0, otherwise with probability exp(-delta / T)."""
    if delta <= 0.0:
        return True
    if temperature <= 0.0:
        return False
    return rng.random() < math.exp(-delta / temperature)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))
