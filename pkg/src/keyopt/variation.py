"""Problem-independent variation operators: shaking and blending.

Both are pure functions over immutable inputs plus a caller-owned RNG, so
they are trivially parallel.  Outputs always satisfy the [0, 1) key range.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionError, KEY_MAX, RngStream, mirror_key

SHAKE_MOVES = ("random", "mirror", "swap", "swap_neighbor")


@dataclass(frozen=True)
class ShakeParams:
    """Perturbation rate range for shaking."""

    beta_min: float
    beta_max: float

    def __post_init__(self):
        if not 0.0 <= self.beta_min <= self.beta_max <= 1.0:
            raise ValueError(
                f"need 0 <= beta_min <= beta_max <= 1, got [{self.beta_min}, {self.beta_max}]"
            )


@dataclass(frozen=True)
class BlendParams:
    """Inheritance probability rho, mutation probability mu and the
    complement factor (+1 keeps the second parent's key, -1 complements it).
    """

    rho: float
    mu: float
    factor: int = 1

    def __post_init__(self):
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [0, 1], got {self.rho}")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError(f"mu must be in [0, 1], got {self.mu}")
        if self.factor not in (-1, 1):
            raise ValueError(f"factor must be -1 or +1, got {self.factor}")


def shake_move_count(beta: float, n: int) -> int:
    """Number of moves for rate beta on an n-vector: ceil(beta * n), at
    least 1 whenever beta > 0 so small vectors still perturb."""
    if beta <= 0.0:
        return 0
    return max(1, math.ceil(beta * n))


def shake(
    keys: np.ndarray,
    params: ShakeParams,
    rng: RngStream,
    move_log: list | None = None,
) -> np.ndarray:
    """Perturbed copy of `keys`.

    Draws a rate beta in [beta_min, beta_max] and applies ceil(beta * n)
    moves sequentially on the working copy, each chosen uniformly from
    Random / Mirror / Swap / SwapNeighbor at uniformly random positions.
    SwapNeighbor wraps the last position around to the first.  `move_log`,
    when given, receives one (move name, position) entry per applied move.
    """
    n = len(keys)
    out = np.array(keys, dtype=float, copy=True)
    if params.beta_max > params.beta_min:
        beta = rng.uniform(params.beta_min, params.beta_max)
    else:
        beta = params.beta_min
    for _ in range(shake_move_count(beta, n)):
        move = SHAKE_MOVES[rng.integers(0, 4)]
        i = rng.integers(0, n)
        if move == "random":
            out[i] = rng.random()
        elif move == "mirror":
            out[i] = mirror_key(out[i])
        elif move == "swap":
            if n >= 2:
                i, j = rng.choice(n, size=2, replace=False)
                out[i], out[j] = out[j], out[i]
        else:  # swap_neighbor
            if n >= 2:
                j = (i + 1) % n
                out[i], out[j] = out[j], out[i]
        if move_log is not None:
            move_log.append((move, int(i)))
    return out


def blend(
    keys_a: np.ndarray,
    keys_b: np.ndarray,
    params: BlendParams,
    rng: RngStream,
) -> np.ndarray:
    """Position-wise recombination of two parent vectors.

    Per position: with probability mu a fresh uniform key, otherwise the
    first parent's key with probability rho, otherwise the second parent's
    key (complemented when factor is -1).
    """
    if len(keys_a) != len(keys_b):
        raise DimensionError(
            f"parents differ in length: {len(keys_a)} vs {len(keys_b)}"
        )
    n = len(keys_a)
    if params.factor == 1:
        from_b = np.asarray(keys_b, dtype=float)
    else:
        from_b = np.minimum(1.0 - np.asarray(keys_b, dtype=float), KEY_MAX)
    mutate = rng.gen.random(n) < params.mu
    inherit_a = rng.gen.random(n) < params.rho
    out = np.where(inherit_a, keys_a, from_b)
    if mutate.any():
        fresh = rng.gen.random(n)
        out = np.where(mutate, fresh, out)
    return out
