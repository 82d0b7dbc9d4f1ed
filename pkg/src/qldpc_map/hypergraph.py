"""Interaction hypergraphs and a multilevel connectivity-1 partitioner.

The partitioner follows the usual multilevel recipe: heavy-edge matching on
the clique-net proxy (pair rating ``sum w_e / (|e| - 1)``), a greedy
balanced initial assignment on the coarsest feasible level, then k-way FM
refinement of ``sum_e w_e * (lambda_e - 1)`` on every level while
uncoarsening.  Everything is driven by a single seeded RNG; ties resolve to
the lowest node or part index.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .pauli import PbcCircuit

DEFAULT_EPSILON = 0.06
DEFAULT_CAPACITY = 11


@dataclass(frozen=True)
class Hypergraph:
    n_nodes: int
    edges: tuple[tuple[frozenset[int], int], ...] = ()

    def __post_init__(self):
        merged: dict[frozenset[int], int] = {}
        for nodes, w in self.edges:
            nodes = frozenset(nodes)
            if not nodes:
                raise ValueError("hyperedges must be non-empty")
            if any(not 0 <= v < self.n_nodes for v in nodes):
                raise ValueError(f"hyperedge {sorted(nodes)} has a node outside [0, {self.n_nodes})")
            if w < 1:
                raise ValueError("hyperedge weights must be >= 1")
            merged[nodes] = merged.get(nodes, 0) + int(w)
        object.__setattr__(self, "edges", tuple(merged.items()))

    @property
    def total_weight(self) -> int:
        return sum(w for _, w in self.edges)

    def incident(self) -> list[list[int]]:
        inc: list[list[int]] = [[] for _ in range(self.n_nodes)]
        for i, (nodes, _) in enumerate(self.edges):
            for v in nodes:
                inc[v].append(i)
        return inc


@dataclass(frozen=True)
class Clustering:
    """Map logical qubit -> module id in ``[0, k)``."""

    assignment: tuple[int, ...]
    k: int
    capacity: int

    def __post_init__(self):
        object.__setattr__(self, "assignment", tuple(int(a) for a in self.assignment))
        if any(not 0 <= a < self.k for a in self.assignment):
            raise ValueError("module id out of range")
        sizes = self.sizes()
        if max(sizes, default=0) > self.capacity:
            raise ValueError(f"module exceeds capacity {self.capacity}: sizes {sizes}")

    @property
    def n(self) -> int:
        return len(self.assignment)

    def sizes(self) -> list[int]:
        out = [0] * self.k
        for a in self.assignment:
            out[a] += 1
        return out

    def modules(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for q, a in enumerate(self.assignment):
            out[a].append(q)
        return out

    def module_of(self, qubit: int) -> int:
        return self.assignment[qubit]


def max_part_size(n: int, k: int, epsilon: float, capacity: int) -> int:
    return min(capacity, math.ceil(round((1 + epsilon) * n / k, 9)))


def build_interaction_hypergraph(circuit: PbcCircuit) -> Hypergraph:
    """One hyperedge per distinct rotation support, weighted by summed rotation weights."""
    edges = [(r.support, r.weight) for r in circuit.rotations if r.support]
    return Hypergraph(circuit.n_qubits, tuple(edges))


def connectivity_objective(h: Hypergraph, c: Clustering) -> int:
    """``sum_e w_e * (lambda_e - 1)``, with ``lambda_e`` the modules touched by ``e``."""
    if c.n != h.n_nodes:
        raise ValueError(f"clustering covers {c.n} nodes, hypergraph has {h.n_nodes}")
    return sum(w * (len({c.assignment[v] for v in nodes}) - 1) for nodes, w in h.edges)


def write_hmetis(h: Hypergraph) -> str:
    """hMETIS ``.hgr`` text: header ``nE nV 1``, then ``weight pin pin ...`` (1-based)."""
    lines = [f"{len(h.edges)} {h.n_nodes} 1"]
    for nodes, w in h.edges:
        lines.append(" ".join([str(w)] + [str(v + 1) for v in sorted(nodes)]))
    return "\n".join(lines) + "\n"


def read_hmetis(text: str) -> Hypergraph:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.startswith("%")]
    n_edges, n_nodes, *fmt = (int(t) for t in rows[0])
    weighted = bool(fmt) and fmt[0] in (1, 11)
    edges = []
    for row in rows[1:1 + n_edges]:
        vals = [int(t) for t in row]
        w, pins = (vals[0], vals[1:]) if weighted else (1, vals)
        edges.append((frozenset(p - 1 for p in pins), w))
    return Hypergraph(n_nodes, tuple(edges))


# ---------------------------------------------------------------- partitioner

class _Level:
    """Hypergraph with node weights, stored as plain lists for speed."""

    def __init__(self, node_weight: list[int], edges: list[tuple[list[int], int]]):
        self.n = len(node_weight)
        self.vw = node_weight
        self.edges = edges
        self.inc: list[list[int]] = [[] for _ in range(self.n)]
        for i, (pins, _) in enumerate(edges):
            for v in pins:
                self.inc[v].append(i)

    def objective(self, part: list[int]) -> int:
        return sum(w * (len({part[v] for v in pins}) - 1) for pins, w in self.edges)


def _contract(level: _Level, match: list[int]) -> tuple[_Level, list[int]]:
    ids: dict[int, int] = {}
    fine_to_coarse = [0] * level.n
    for v in range(level.n):
        rep = min(v, match[v])
        if rep not in ids:
            ids[rep] = len(ids)
        fine_to_coarse[v] = ids[rep]
    vw = [0] * len(ids)
    for v in range(level.n):
        vw[fine_to_coarse[v]] += level.vw[v]
    merged: dict[tuple[int, ...], int] = {}
    for pins, w in level.edges:
        cpins = tuple(sorted({fine_to_coarse[v] for v in pins}))
        if len(cpins) > 1:
            merged[cpins] = merged.get(cpins, 0) + w
    edges = [(list(p), w) for p, w in merged.items()]
    return _Level(vw, edges), fine_to_coarse


def _match(level: _Level, max_weight: int, rng: random.Random) -> list[int]:
    match = list(range(level.n))
    matched = [False] * level.n
    order = list(range(level.n))
    rng.shuffle(order)
    for u in order:
        if matched[u]:
            continue
        rating: dict[int, float] = {}
        for e in level.inc[u]:
            pins, w = level.edges[e]
            share = w / (len(pins) - 1)
            for v in pins:
                if v != u and not matched[v] and level.vw[u] + level.vw[v] <= max_weight:
                    rating[v] = rating.get(v, 0.0) + share
        if not rating:
            continue
        best = max(rating, key=lambda v: (rating[v], -v))
        match[u], match[best] = best, u
        matched[u] = matched[best] = True
    return match


def _greedy_initial(level: _Level, k: int, cap: int, rng: random.Random) -> list[int] | None:
    """Greedy balanced assignment; ``None`` if the node weights do not pack."""
    order = list(range(level.n))
    rng.shuffle(order)
    order.sort(key=lambda v: -level.vw[v])
    part = [-1] * level.n
    load = [0] * k
    for v in order:
        affinity = [0] * k
        for e in level.inc[v]:
            pins, w = level.edges[e]
            for u in pins:
                if part[u] >= 0:
                    affinity[part[u]] += w
        feasible = [p for p in range(k) if load[p] + level.vw[v] <= cap]
        if not feasible:
            return None
        best = max(feasible, key=lambda p: (affinity[p], -load[p], -p))
        part[v] = best
        load[best] += level.vw[v]
    return part


def _fm_refine(level: _Level, part: list[int], k: int, cap: int, max_passes: int = 16) -> list[int]:
    """k-way FM on connectivity-1; every pass is rolled back to its best balanced prefix."""
    part = list(part)
    slack = max(level.vw, default=1)
    n = level.n
    for _ in range(max_passes):
        phi = [[0] * k for _ in level.edges]
        for i, (pins, _) in enumerate(level.edges):
            for v in pins:
                phi[i][part[v]] += 1
        load = [0] * k
        for v in range(n):
            load[part[v]] += level.vw[v]

        def gains(v: int) -> list[int]:
            a = part[v]
            g = [0] * k
            for e in level.inc[v]:
                w = level.edges[e][1]
                row = phi[e]
                leave = w if row[a] == 1 else 0
                for b in range(k):
                    if b != a:
                        g[b] += leave - (w if row[b] == 0 else 0)
            return g

        gain = [gains(v) for v in range(n)]
        locked = [False] * n
        moves: list[tuple[int, int, int]] = []
        current = best = 0
        best_len = 0
        stale = 0
        while stale < max(50, n // 2):
            choice = None
            for v in range(n):
                if locked[v]:
                    continue
                a = part[v]
                for b in range(k):
                    if b == a or load[b] + level.vw[v] > cap + slack:
                        continue
                    g = gain[v][b]
                    if choice is None or g > choice[0]:
                        choice = (g, v, b)
            if choice is None:
                break
            g, v, b = choice
            a = part[v]
            part[v] = b
            load[a] -= level.vw[v]
            load[b] += level.vw[v]
            locked[v] = True
            touched = set()
            for e in level.inc[v]:
                phi[e][a] -= 1
                phi[e][b] += 1
                touched.update(level.edges[e][0])
            for u in touched:
                if not locked[u]:
                    gain[u] = gains(u)
            moves.append((v, a, b))
            current += g
            if current > best and max(load) <= cap:
                best, best_len, stale = current, len(moves), 0
            else:
                stale += 1
        for v, a, _ in reversed(moves[best_len:]):
            part[v] = a
        if best <= 0:
            break
    return part


@dataclass(frozen=True)
class PartitionResult:
    clustering: Clustering
    objective: int
    initial_objective: int


def partition_detailed(
    h: Hypergraph,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    capacity: int = DEFAULT_CAPACITY,
    seed: int = 0,
    restarts: int = 16,
    initial_tries: int = 8,
) -> PartitionResult:
    if k < 1:
        raise ValueError("module count must be positive")
    if k * capacity < h.n_nodes:
        raise ValueError(f"{k} modules of capacity {capacity} cannot hold {h.n_nodes} qubits")
    cap = max_part_size(h.n_nodes, k, epsilon, capacity)
    if k == 1 or h.n_nodes == 0:
        c = Clustering((0,) * h.n_nodes, k, capacity)
        obj = connectivity_objective(h, c)
        return PartitionResult(c, obj, obj)

    rng = random.Random(seed)
    finest = _Level([1] * h.n_nodes, [(sorted(nodes), w) for nodes, w in h.edges if len(nodes) > 1])
    best: tuple[int, list[int], int] | None = None
    for _ in range(max(1, restarts)):
        levels = [finest]
        maps: list[list[int]] = []
        max_weight = max(1, cap // 2)
        while levels[-1].n > max(2 * k, 8):
            match = _match(levels[-1], max_weight, rng)
            coarse, f2c = _contract(levels[-1], match)
            if coarse.n > 0.95 * levels[-1].n:
                break
            levels.append(coarse)
            maps.append(f2c)

        # Initial partition on the coarsest level whose node weights pack.
        depth = len(levels) - 1
        part = None
        while part is None:
            lvl = levels[depth]
            cands = []
            for _ in range(initial_tries):
                init = _greedy_initial(lvl, k, cap, rng)
                if init is not None:
                    refined = _fm_refine(lvl, init, k, cap)
                    cands.append((lvl.objective(init), lvl.objective(refined), refined))
            if cands:
                init_obj, _, part = min(cands, key=lambda c: (c[1], c[0]))
            else:
                depth -= 1
        while depth > 0:
            f2c = maps[depth - 1]
            depth -= 1
            part = [part[f2c[v]] for v in range(levels[depth].n)]
            part = _fm_refine(levels[depth], part, k, cap)
        obj = finest.objective(part)
        if best is None or obj < best[0]:
            best = (obj, part, init_obj)
    obj, part, init_obj = best
    clustering = Clustering(tuple(part), k, capacity)
    return PartitionResult(clustering, obj, init_obj)


def partition(
    h: Hypergraph,
    k: int,
    epsilon: float = DEFAULT_EPSILON,
    capacity: int = DEFAULT_CAPACITY,
    seed: int = 0,
    **kwargs,
) -> Clustering:
    """Balanced k-way partition minimizing the connectivity-1 objective."""
    return partition_detailed(h, k, epsilon, capacity, seed, **kwargs).clustering
