"""Tree-of-hubs location: pick p hubs joined by a spanning tree, assign the
other nodes to hubs, and route all demand over the tree with a discount on
inter-hub flow.

Key vectors have three segments: |N| node keys (the p smallest become hubs),
|N| - p assignment keys (each splits [0, 1] into p equal slots), and
p(p-1)/2 arc keys ranking the hub pairs for Kruskal.
"""

import bisect
import dataclasses
import itertools
import math
import os
from collections import deque

import numpy as np

from ..core import Decoder, Fitness, ParseError, SizeGuardError

ENUMERATION_LIMIT = 10**8


@dataclasses.dataclass(frozen=True)
class HubTreeInstance:
    cost: np.ndarray  # symmetric per-unit transport cost, zero diagonal
    demand: np.ndarray  # pairwise flow demand (diagonal ignored)
    hubs: int
    discount: float
    name: str = ""

    def __post_init__(self):
        c = np.asarray(self.cost, dtype=float)
        w = np.asarray(self.demand, dtype=float)
        object.__setattr__(self, "cost", c)
        object.__setattr__(self, "demand", w)
        n = c.shape[0]
        if n < 2:
            raise ValueError("instance needs at least two nodes")
        if c.shape != (n, n) or w.shape != (n, n):
            raise ValueError("cost and demand matrices must be square and equal-sized")
        if not np.allclose(c, c.T):
            raise ValueError("cost matrix must be symmetric")
        if np.any(np.diag(c) != 0):
            raise ValueError("cost matrix must have a zero diagonal")
        if np.any(c < 0) or np.any(w < 0):
            raise ValueError("costs and demands must be non-negative")
        if not 1 <= self.hubs <= n:
            raise ValueError(f"hub count must satisfy 1 <= p <= {n}, got {self.hubs}")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError(f"discount must be in [0, 1], got {self.discount}")
        # Demand on the diagonal never routes; keep a zeroed copy for sums.
        w_off = w.copy()
        np.fill_diagonal(w_off, 0.0)
        object.__setattr__(self, "_demand_off", w_off)
        object.__setattr__(self, "_demand_out", w_off.sum(axis=1))
        object.__setattr__(self, "_demand_in", w_off.sum(axis=0))
        object.__setattr__(self, "_node_range", np.arange(n))

    @property
    def n(self) -> int:
        return self.cost.shape[0]

    @property
    def dimension(self) -> int:
        p = self.hubs
        return self.n + (self.n - p) + p * (p - 1) // 2


def hub_pairs(p: int) -> list[tuple[int, int]]:
    """Canonical enumeration of hub-pair positions: (i, j) with i < j in
    lexicographic order."""
    return list(itertools.combinations(range(p), 2))


def kruskal_tree(p: int, arc_order) -> list[tuple[int, int]]:
    """Spanning tree over p hub positions, accepting acyclic arcs in the
    given order until p - 1 edges."""
    parent = list(range(p))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = hub_pairs(p)
    tree = []
    for arc_idx in arc_order:
        a, b = pairs[arc_idx]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            tree.append((a, b))
            if len(tree) == p - 1:
                break
    return tree


def tree_path_costs(hub_nodes, tree, cost) -> np.ndarray:
    """Pairwise path costs between hub positions along the tree, by BFS."""
    p = len(hub_nodes)
    adj = [[] for _ in range(p)]
    for a, b in tree:
        edge_cost = float(cost[hub_nodes[a], hub_nodes[b]])
        adj[a].append((b, edge_cost))
        adj[b].append((a, edge_cost))
    paths = np.zeros((p, p))
    for src in range(p):
        seen = [False] * p
        seen[src] = True
        queue = deque([(src, 0.0)])
        while queue:
            node, acc = queue.popleft()
            paths[src, node] = acc
            for nxt, edge_cost in adj[node]:
                if not seen[nxt]:
                    seen[nxt] = True
                    queue.append((nxt, acc + edge_cost))
    return paths


def routing_cost(instance: HubTreeInstance, hub_nodes, hub_of, tree) -> float:
    """Cost of one decoded (hubs, assignment, tree) triple: access arcs to
    the hubs plus discounted flow along the tree path between hubs.

    The access part folds into per-node demand totals; the tree part
    aggregates demand by hub group before weighting with path costs.
    """
    n = instance.n
    p = len(hub_nodes)
    pos_of_hub = np.zeros(n, dtype=int)
    pos_of_hub[list(hub_nodes)] = np.arange(p)
    hub_pos = pos_of_hub[np.asarray(hub_of)]
    access = instance.cost[instance._node_range, hub_of]
    access_cost = float(access @ (instance._demand_out + instance._demand_in))
    paths = tree_path_costs(hub_nodes, tree, instance.cost)
    cell = hub_pos[:, None] * p + hub_pos[None, :]
    demand_by_group = np.bincount(
        cell.ravel(), weights=instance._demand_off.ravel(), minlength=p * p
    ).reshape(p, p)
    flow_cost = instance.discount * float((demand_by_group * paths).sum())
    return access_cost + flow_cost


class HubTreeDecoder(Decoder):
    def __init__(self, instance: HubTreeInstance):
        self.instance = instance
        self.dimension = instance.dimension

    def decode(self, keys: np.ndarray) -> tuple[Fitness, tuple]:
        inst = self.instance
        n, p = inst.n, inst.hubs
        order = np.argsort(keys[:n], kind="stable")
        hub_nodes = [int(v) for v in order[:p]]  # in sorted-key order
        non_hubs = [int(v) for v in order[p:]]

        hub_of = np.empty(n, dtype=int)
        for node in hub_nodes:
            hub_of[node] = node
        assign_keys = keys[n : n + (n - p)]
        for k, node in enumerate(non_hubs):
            slot = min(p - 1, int(math.floor(assign_keys[k] * p)))
            hub_of[node] = hub_nodes[slot]

        arc_keys = keys[n + (n - p) :]
        arc_order = np.argsort(arc_keys, kind="stable")
        tree = kruskal_tree(p, arc_order)

        total = routing_cost(inst, hub_nodes, hub_of, tree)
        artifact = (
            tuple(hub_nodes),
            tuple(int(h) for h in hub_of),
            tuple((hub_nodes[a], hub_nodes[b]) for a, b in tree),
        )
        return Fitness.of(total), artifact


def parse_hubtree(path) -> HubTreeInstance:
    """Plain text format: line 1 "|N| p discount", then |N| rows of the cost
    matrix and |N| rows of the demand matrix."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    content = [(i + 1, ln) for i, ln in enumerate(lines) if ln and not ln.startswith("#")]
    if not content:
        raise ParseError(f"{path}: empty file")
    lineno, header = content[0]
    parts = header.split()
    if len(parts) != 3:
        raise ParseError(f"{path}: expected '|N| p discount' header, got {header!r}", lineno)
    try:
        n, p = int(parts[0]), int(parts[1])
        discount = float(parts[2])
    except ValueError:
        raise ParseError(f"{path}: bad header {header!r}", lineno)
    if n < 2:
        raise ParseError(f"{path}: need at least two nodes, got {n}", lineno)
    if not 1 <= p <= n:
        raise ParseError(f"{path}: hub count must satisfy 1 <= p <= {n}", lineno)

    rows = content[1:]
    if len(rows) < 2 * n:
        raise ParseError(f"{path}: expected {2 * n} matrix rows, found {len(rows)}")

    def matrix(entries, what):
        out = []
        for lineno, ln in entries:
            try:
                vals = [float(tok) for tok in ln.split()]
            except ValueError:
                raise ParseError(f"{path}: bad {what} row {ln!r}", lineno)
            if len(vals) != n:
                raise ParseError(f"{path}: expected {n} {what} values per row", lineno)
            out.append(vals)
        return out

    cost = matrix(rows[:n], "cost")
    demand = matrix(rows[n : 2 * n], "demand")
    try:
        return HubTreeInstance(
            cost=cost, demand=demand, hubs=p, discount=discount,
            name=os.path.basename(str(path)),
        )
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}")


def write_hubtree(instance: HubTreeInstance, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{instance.n} {instance.hubs} {instance.discount!r}\n")
        for row in instance.cost:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")
        for row in instance.demand:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def _prufer_trees(p: int):
    """All labeled spanning trees on p nodes via Prüfer sequences."""
    if p == 1:
        yield []
        return
    if p == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(p), repeat=p - 2):
        degree = [1] * p
        for v in seq:
            degree[v] += 1
        tree = []
        remaining = list(seq)
        leaves = sorted(v for v in range(p) if degree[v] == 1)
        for v in remaining:
            leaf = leaves.pop(0)
            tree.append((min(leaf, v), max(leaf, v)))
            degree[leaf] -= 1
            degree[v] -= 1
            if degree[v] == 1:
                bisect.insort(leaves, v)
        last = [v for v in range(p) if degree[v] == 1]
        tree.append((min(last), max(last)))
        yield tree


def _plain_tree_paths(hub_nodes, tree, cost):
    """Tree path cost between every hub-position pair, found by walking the
    unique path with a DFS.  Deliberately separate from the decoder's BFS
    routine so the oracle checks it independently."""
    p = len(hub_nodes)
    adj = {pos: [] for pos in range(p)}
    for a, b in tree:
        adj[a].append(b)
        adj[b].append(a)
    paths = [[0.0] * p for _ in range(p)]
    for src in range(p):
        stack = [(src, -1, 0.0)]
        while stack:
            node, parent_pos, acc = stack.pop()
            paths[src][node] = acc
            for nxt in adj[node]:
                if nxt != parent_pos:
                    step = float(cost[hub_nodes[node], hub_nodes[nxt]])
                    stack.append((nxt, node, acc + step))
    return paths


def plain_routing_cost(instance: HubTreeInstance, hub_nodes, hub_of, tree) -> float:
    """Straight-loop recomputation of a triple's cost (oracle path)."""
    pos_of = {node: pos for pos, node in enumerate(hub_nodes)}
    paths = _plain_tree_paths(hub_nodes, tree, instance.cost)
    total = 0.0
    n = instance.n
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            w = float(instance.demand[i, j])
            if w == 0.0:
                continue
            leg_in = float(instance.cost[i, hub_of[i]])
            leg_out = float(instance.cost[hub_of[j], j])
            through = paths[pos_of[hub_of[i]]][pos_of[hub_of[j]]]
            total += w * (leg_in + instance.discount * through + leg_out)
    return total


def brute_force_hubtree(instance: HubTreeInstance) -> tuple[float, tuple]:
    """Exact optimum over hub subsets x assignments x labeled spanning
    trees, costed by the plain-loop recomputation."""
    n, p = instance.n, instance.hubs
    states = (
        math.comb(n, p)
        * p ** (n - p)
        * (p ** max(0, p - 2) if p >= 2 else 1)
    )
    if states > ENUMERATION_LIMIT:
        raise SizeGuardError(f"{states} hub/assignment/tree states exceed the limit")
    best_cost = math.inf
    best = None
    trees = list(_prufer_trees(p))
    for hubs in itertools.combinations(range(n), p):
        hub_nodes = list(hubs)
        non_hubs = [v for v in range(n) if v not in hubs]
        for tree in trees:
            pos_of = {node: pos for pos, node in enumerate(hub_nodes)}
            paths = _plain_tree_paths(hub_nodes, tree, instance.cost)
            for assignment in itertools.product(range(p), repeat=len(non_hubs)):
                hub_of = list(range(n))
                for node, slot in zip(non_hubs, assignment):
                    hub_of[node] = hub_nodes[slot]
                total = 0.0
                for i in range(n):
                    for j in range(n):
                        if i == j:
                            continue
                        w = float(instance.demand[i, j])
                        if w == 0.0:
                            continue
                        through = paths[pos_of[hub_of[i]]][pos_of[hub_of[j]]]
                        total += w * (
                            float(instance.cost[i, hub_of[i]])
                            + instance.discount * through
                            + float(instance.cost[hub_of[j], j])
                        )
                if total < best_cost:
                    best_cost = total
                    best = (tuple(hub_nodes), tuple(hub_of),
                            tuple((hub_nodes[a], hub_nodes[b]) for a, b in tree))
    return best_cost, best
