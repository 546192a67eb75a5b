"""Node-capacitated graph partitioning (handover minimization): assign base
stations to capacity-limited controllers so that as little handover traffic
as possible crosses the partition.

Key vectors have length |B| + 1: the first |B| keys order the stations, the
last one chooses how many of them seed their own controller before the rest
are placed greedily.
"""

import dataclasses
import math
import os

import numpy as np

from ..core import Decoder, Fitness, ParseError, SizeGuardError

ENUMERATION_LIMIT = 10**8


@dataclasses.dataclass(frozen=True)
class PartitionInstance:
    traffic: np.ndarray  # per-station load, length |B|
    capacity: np.ndarray  # per-controller limit, length |N|
    handovers: np.ndarray  # |B| x |B|, possibly asymmetric, zero diagonal
    name: str = ""

    def __post_init__(self):
        t = np.asarray(self.traffic, dtype=float)
        c = np.asarray(self.capacity, dtype=float)
        h = np.asarray(self.handovers, dtype=float)
        object.__setattr__(self, "traffic", t)
        object.__setattr__(self, "capacity", c)
        object.__setattr__(self, "handovers", h)
        b = len(t)
        if h.shape != (b, b):
            raise ValueError(f"handover matrix must be {b}x{b}, got {h.shape}")
        if np.any(np.diag(h) != 0):
            raise ValueError("handover matrix must have a zero diagonal")
        if np.any(t < 0) or np.any(h < 0):
            raise ValueError("traffic and handovers must be non-negative")
        if np.any(c <= 0):
            raise ValueError("controller capacities must be positive")
        # Bidirectional handover mass, used by the greedy insertion gain.
        object.__setattr__(self, "_h_both", h + h.T)

    @property
    def stations(self) -> int:
        return len(self.traffic)

    @property
    def controllers(self) -> int:
        return len(self.capacity)

    @property
    def penalty_unit(self) -> float:
        """Penalty per unassigned station: the whole handover mass, so any
        fully assigned solution beats any penalized one."""
        return float(self.handovers.sum())


def cut_value(handovers, assignment) -> float:
    """Handover total over ordered station pairs not sharing a controller;
    unassigned stations (marked -1) count as singletons."""
    h = np.asarray(handovers, dtype=float)
    labels = np.asarray(assignment)
    b = len(labels)
    ids = labels.astype(float).copy()
    unassigned = labels < 0
    # Give each unassigned station a unique negative label.
    ids[unassigned] = -np.arange(1, unassigned.sum() + 1, dtype=float)
    same = ids[:, None] == ids[None, :]
    return float(h[~same].sum())


class PartitionDecoder(Decoder):
    def __init__(self, instance: PartitionInstance):
        self.instance = instance
        self.dimension = instance.stations + 1

    def decode(self, keys: np.ndarray) -> tuple[Fitness, tuple]:
        inst = self.instance
        b, r = inst.stations, inst.controllers
        order = np.argsort(keys[:b], kind="stable")
        seeds = min(r, max(1, math.ceil(keys[b] * r)))

        assignment = np.full(b, -1, dtype=int)
        members: list[list[int]] = [[] for _ in range(r)]
        load = np.zeros(r)
        traffic = inst.traffic
        capacity = inst.capacity
        h_both = inst._h_both

        # Seed phase: one station per controller in index order, skipping
        # controllers that cannot hold their station.
        next_controller = 0
        placed = 0
        pos = 0
        while placed < seeds and pos < b:
            station = order[pos]
            target = None
            for ctrl in range(next_controller, r):
                if load[ctrl] + traffic[station] <= capacity[ctrl]:
                    target = ctrl
                    break
            if target is None:
                break
            assignment[station] = target
            members[target].append(int(station))
            load[target] += traffic[station]
            next_controller = target + 1
            placed += 1
            pos += 1

        # Greedy phase: best handover gain among feasible controllers, ties
        # to the lowest controller index.
        for station in order[pos:]:
            gains = h_both[station]
            best_ctrl = -1
            best_gain = -1.0
            for ctrl in range(r):
                if load[ctrl] + traffic[station] > capacity[ctrl]:
                    continue
                gain = 0.0
                for member in members[ctrl]:
                    gain += gains[member]
                if gain > best_gain:
                    best_gain = gain
                    best_ctrl = ctrl
            if best_ctrl >= 0:
                assignment[station] = best_ctrl
                members[best_ctrl].append(int(station))
                load[best_ctrl] += traffic[station]

        unassigned = int((assignment < 0).sum())
        # Cut = all handovers minus the intra-controller ones; unassigned
        # stations have no controller, so their traffic all counts as cut.
        intra = 0.0
        h = inst.handovers
        for group in members:
            if len(group) > 1:
                intra += float(h[np.ix_(group, group)].sum())
        cut = max(0.0, inst.penalty_unit - intra)
        penalty = unassigned * inst.penalty_unit
        return Fitness.of(cut, penalty), tuple(int(a) for a in assignment)


def parse_partition(path) -> PartitionInstance:
    """Plain text format: line 1 "|B| |N|", line 2 station traffics, line 3
    controller capacities, then |B| rows of the handover matrix."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    content = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if len(content) < 3:
        raise ParseError(f"{path}: need a header, traffics, and capacities")
    lineno, header = content[0]
    parts = header.split()
    if len(parts) != 2:
        raise ParseError(f"{path}: expected '|B| |N|' header, got {header!r}", lineno)
    try:
        b, r = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"{path}: bad header {header!r}", lineno)
    if b < 1 or r < 1:
        raise ParseError(f"{path}: station and controller counts must be >= 1", lineno)

    def floats(entry, expected, what):
        lineno, ln = entry
        try:
            vals = [float(tok) for tok in ln.split()]
        except ValueError:
            raise ParseError(f"{path}: bad {what} line {ln!r}", lineno)
        if len(vals) != expected:
            raise ParseError(f"{path}: expected {expected} {what} values", lineno)
        return vals

    traffic = floats(content[1], b, "traffic")
    capacity = floats(content[2], r, "capacity")
    rows = content[3:]
    if len(rows) < b:
        raise ParseError(f"{path}: expected {b} handover rows, found {len(rows)}")
    handovers = [floats(entry, b, "handover") for entry in rows[:b]]
    try:
        return PartitionInstance(
            traffic=traffic, capacity=capacity, handovers=handovers,
            name=os.path.basename(str(path)),
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}")


def write_partition(instance: PartitionInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{instance.stations} {instance.controllers}\n")
        fh.write(" ".join(repr(float(v)) for v in instance.traffic) + "\n")
        fh.write(" ".join(repr(float(v)) for v in instance.capacity) + "\n")
        for row in instance.handovers:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def brute_force_partition(instance: PartitionInstance) -> tuple[float, tuple]:
    """Exact optimum over all capacity-feasible full assignments."""
    b, r = instance.stations, instance.controllers
    if r**b > ENUMERATION_LIMIT:
        raise SizeGuardError(f"{r}^{b} assignments exceed the enumeration limit")
    h = instance.handovers
    best_cost = math.inf
    best_assignment = None
    assignment = np.zeros(b, dtype=int)

    def recurse(station, load):
        nonlocal best_cost, best_assignment
        if station == b:
            cost = cut_value(h, assignment)
            if cost < best_cost:
                best_cost = cost
                best_assignment = tuple(int(a) for a in assignment)
            return
        for ctrl in range(r):
            if load[ctrl] + instance.traffic[station] <= instance.capacity[ctrl]:
                assignment[station] = ctrl
                load[ctrl] += instance.traffic[station]
                recurse(station + 1, load)
                load[ctrl] -= instance.traffic[station]

    recurse(0, np.zeros(r))
    if best_assignment is None:
        raise ValueError("no capacity-feasible full assignment exists")
    return best_cost, best_assignment
