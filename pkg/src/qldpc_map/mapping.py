"""Clustering and placement policies.

Mapping is split in two: a clustering groups logical qubits into modules of
bounded size, and an assignment places each module on a topology slot.
``POLICIES`` names the combinations exposed to the driver.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass, field

from .errors import ConfigError
from .hypergraph import (
    DEFAULT_CAPACITY, DEFAULT_EPSILON, Clustering, Hypergraph, build_interaction_hypergraph,
    partition,
)
from .pauli import PbcCircuit
from .topology import Topology

BRUTEFORCE_LIMIT = 8

ModuleSets = list[tuple[frozenset[int], int]]


@dataclass(frozen=True)
class ModuleProfile:
    module: int
    freq: int
    rotations: frozenset[int]


@dataclass(frozen=True)
class Assignment:
    """``positions[m]`` is the topology slot holding module ``m``."""

    positions: tuple

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(self.positions))
        if len(set(self.positions)) != len(self.positions):
            raise ValueError("assignment must place each module on a distinct slot")

    def __len__(self) -> int:
        return len(self.positions)

    def validate(self, topology: Topology) -> None:
        slots = set(topology.slots)
        if len(self.positions) != len(slots):
            raise ValueError(f"assignment places {len(self.positions)} modules on {len(slots)} slots")
        missing = [p for p in self.positions if p not in slots]
        if missing:
            raise ValueError(f"positions {missing} are not slots of {topology.descriptor}")


def module_supports(circuit: PbcCircuit, c: Clustering) -> ModuleSets:
    """Per rotation, the modules holding at least one of its non-identity qubits."""
    if c.n != circuit.n_qubits:
        raise ValueError(f"clustering covers {c.n} qubits, circuit has {circuit.n_qubits}")
    return [(frozenset(c.assignment[q] for q in r.support), r.weight) for r in circuit.rotations]


def module_profiles(module_sets: ModuleSets, num_modules: int) -> list[ModuleProfile]:
    freq = [0] * num_modules
    rots: list[set[int]] = [set() for _ in range(num_modules)]
    for i, (mods, w) in enumerate(module_sets):
        for m in mods:
            freq[m] += w
            rots[m].add(i)
    return [ModuleProfile(m, freq[m], frozenset(rots[m])) for m in range(num_modules)]


def priority_trace(module_sets: ModuleSets, num_modules: int) -> tuple[dict[int, int], int]:
    """Run the least-frequency elimination; also count steps decided by a tie."""
    for mods, _ in module_sets:
        if any(not 0 <= m < num_modules for m in mods):
            raise ValueError(f"module set {sorted(mods)} outside [0, {num_modules})")
    profiles = module_profiles(module_sets, num_modules)
    freq = {p.module: p.freq for p in profiles}
    incident = {p.module: set(p.rotations) for p in profiles}
    alive = set(range(len(module_sets)))
    priorities: dict[int, int] = {}
    ties = 0
    for step in range(num_modules):
        low = min(freq.values())
        candidates = sorted(m for m, f in freq.items() if f == low)
        ties += len(candidates) > 1
        m = candidates[0]
        priorities[m] = step
        del freq[m]
        for r in sorted(incident[m] & alive):
            alive.discard(r)
            mods, w = module_sets[r]
            for other in mods:
                if other in freq:
                    freq[other] -= w
    return priorities, ties


def assign_priorities(module_sets: ModuleSets, num_modules: int) -> dict[int, int]:
    """Priority heuristic: repeatedly retire the least-used module.

    Each retired module takes its rotations with it, lowering the usage of
    the modules they shared.  Priorities count up from 0, so the first
    retired module has the lowest priority and ends up furthest from the
    factory.  Ties go to the lowest module id.
    """
    return priority_trace(module_sets, num_modules)[0]


def _slots_by_distance(topology: Topology) -> list:
    order = {s: i for i, s in enumerate(topology.slots)}
    return sorted(topology.slots, key=lambda s: (topology.distance_to_nearest_factory(s), order[s]))


def priorities_to_positions(priorities: dict[int, int], topology: Topology) -> Assignment:
    """Highest priority on the slot nearest a factory, and so on outward.

    Slots at equal distance are taken in row-major order; modules with equal
    priority in module-id order.
    """
    if len(priorities) != topology.n_slots:
        raise ValueError(f"{len(priorities)} modules for {topology.n_slots} slots")
    if sorted(priorities) != list(range(len(priorities))):
        raise ValueError("priorities must cover modules 0..M-1")
    modules = sorted(priorities, key=lambda m: (-priorities[m], m))
    positions = [None] * len(modules)
    for m, slot in zip(modules, _slots_by_distance(topology)):
        positions[m] = slot
    return Assignment(tuple(positions))


def assign_greedy(frequencies, topology: Topology) -> Assignment:
    """Most frequently used module next to the factory, then outward."""
    freq = dict(enumerate(frequencies)) if not isinstance(frequencies, dict) else dict(frequencies)
    return priorities_to_positions(freq, topology)


def assign_identity(num_modules: int, topology: Topology) -> Assignment:
    """Module ``m`` on the ``m``-th slot in row-major order."""
    if num_modules != topology.n_slots:
        raise ValueError(f"{num_modules} modules for {topology.n_slots} slots")
    return Assignment(tuple(topology.slots))


def routing_cost(module_sets: ModuleSets, assignment: Assignment, topology: Topology, cache=None) -> int:
    """Total ``sum_r weight_r * route(slots of r)``."""
    cache = {} if cache is None else cache
    total = 0
    for mods, w in module_sets:
        if not mods:
            continue
        key = frozenset(assignment.positions[m] for m in mods)
        if key not in cache:
            cache[key] = topology.route(key).edge_count
        total += w * cache[key]
    return total


def assign_bruteforce(module_sets: ModuleSets, topology: Topology) -> Assignment:
    """Exhaustive placement minimizing total routing cost.

    Ties go to the lexicographically smallest slot-index tuple.  Limited to
    ``BRUTEFORCE_LIMIT`` modules.
    """
    slots = list(topology.slots)
    n = len(slots)
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"bruteforce placement supports at most {BRUTEFORCE_LIMIT} slots, got {n}")
    # route cost of every slot subset, indexed by bitmask over slot indices
    subset_cost = [0] * (1 << n)
    for mask in range(1, 1 << n):
        subset_cost[mask] = topology.route([slots[i] for i in range(n) if mask >> i & 1]).edge_count
    merged: dict[frozenset[int], int] = {}
    for mods, w in module_sets:
        if mods:
            merged[mods] = merged.get(mods, 0) + w
    terms = [(tuple(sorted(mods)), w) for mods, w in sorted(merged.items(), key=lambda kv: sorted(kv[0]))]
    best_cost, best_perm = None, None
    for perm in itertools.permutations(range(n)):
        cost = 0
        for mods, w in terms:
            mask = 0
            for m in mods:
                mask |= 1 << perm[m]
            cost += w * subset_cost[mask]
            if best_cost is not None and cost > best_cost:
                break
        if best_cost is None or cost < best_cost:
            best_cost, best_perm = cost, perm
    return Assignment(tuple(slots[i] for i in best_perm))


# ---------------------------------------------------------------- clustering

def qubit_frequencies(circuit: PbcCircuit) -> list[int]:
    """Summed weight of the rotations acting non-trivially on each qubit."""
    freq = [0] * circuit.n_qubits
    for r in circuit.rotations:
        for q in r.support:
            freq[q] += r.weight
    return freq


def _check_capacity(n: int, k: int, capacity: int) -> None:
    if k < 1 or capacity < 1:
        raise ValueError("module count and capacity must be positive")
    if k * capacity < n:
        raise ValueError(f"{k} modules of capacity {capacity} cannot hold {n} qubits")


def cluster_hypergraph(circuit: PbcCircuit, k: int, capacity: int = DEFAULT_CAPACITY,
                       seed: int = 0, epsilon: float = DEFAULT_EPSILON) -> Clustering:
    return partition(build_interaction_hypergraph(circuit), k, epsilon, capacity, seed)


def cluster_frequency_max(circuit: PbcCircuit, k: int, capacity: int = DEFAULT_CAPACITY) -> Clustering:
    """Fill modules in order with the most used qubits first."""
    n = circuit.n_qubits
    _check_capacity(n, k, capacity)
    freq = qubit_frequencies(circuit)
    order = sorted(range(n), key=lambda q: (-freq[q], q))
    assignment = [0] * n
    for i, q in enumerate(order):
        assignment[q] = i // capacity
    return Clustering(tuple(assignment), k, capacity)


def cluster_random(n: int, k: int, capacity: int = DEFAULT_CAPACITY, seed: int = 0) -> Clustering:
    """Uniform draw among all maps qubit -> module with no module over capacity.

    Module sizes are drawn first, weighted by the number of labelled maps
    realizing them, then the labels are shuffled.
    """
    _check_capacity(n, k, capacity)
    rng = random.Random(seed)
    # ways[j][r]: maps of r labelled qubits into modules j..k-1
    ways = [[0] * (n + 1) for _ in range(k + 1)]
    ways[k][0] = 1
    for j in range(k - 1, -1, -1):
        for r in range(n + 1):
            ways[j][r] = sum(math.comb(r, s) * ways[j + 1][r - s] for s in range(min(capacity, r) + 1))
    labels: list[int] = []
    left = n
    for j in range(k):
        pick = rng.randrange(ways[j][left])
        for s in range(min(capacity, left) + 1):
            weight = math.comb(left, s) * ways[j + 1][left - s]
            if pick < weight:
                break
            pick -= weight
        labels += [j] * s
        left -= s
    rng.shuffle(labels)
    return Clustering(tuple(labels), k, capacity)


def expansion_graph(circuit: PbcCircuit, mode: str) -> dict[tuple[int, int], int]:
    """Pairwise interaction graph of a circuit.

    ``clique`` joins every pair in a support; ``chain`` joins consecutive
    qubits of the support in index order.  Weights add up across rotations.
    """
    if mode not in ("chain", "clique"):
        raise ValueError(f"expansion mode must be chain or clique, got {mode!r}")
    edges: dict[tuple[int, int], int] = {}
    for r in circuit.rotations:
        qs = sorted(r.support)
        pairs = itertools.combinations(qs, 2) if mode == "clique" else zip(qs, qs[1:])
        for pair in pairs:
            edges[pair] = edges.get(pair, 0) + r.weight
    return edges


def cluster_graph_expansion(circuit: PbcCircuit, k: int, capacity: int = DEFAULT_CAPACITY,
                            mode: str = "clique", seed: int = 0,
                            epsilon: float = DEFAULT_EPSILON) -> Clustering:
    edges = expansion_graph(circuit, mode)
    h = Hypergraph(circuit.n_qubits, tuple((frozenset(p), w) for p, w in sorted(edges.items())))
    return partition(h, k, epsilon, capacity, seed)


# ---------------------------------------------------------------- policies

@dataclass(frozen=True)
class MappingResult:
    policy: str
    clustering: Clustering
    assignment: Assignment
    module_sets: ModuleSets = field(compare=False)
    ties: int = 0


def _cluster(policy: str, circuit: PbcCircuit, k: int, capacity: int, seed: int, epsilon: float):
    kind = policy.split("+")[0]
    if kind in ("hypergraph", "bruteforce"):
        return cluster_hypergraph(circuit, k, capacity, seed, epsilon)
    if kind == "freqmax":
        return cluster_frequency_max(circuit, k, capacity)
    if kind == "random":
        return cluster_random(circuit.n_qubits, k, capacity, seed)
    if kind in ("chain", "clique"):
        return cluster_graph_expansion(circuit, k, capacity, kind, seed, epsilon)
    raise ConfigError(f"unknown policy {policy!r}")


POLICIES = (
    "hypergraph+priority",
    "hypergraph+greedy",
    "freqmax+greedy",
    "random+identity",
    "chain+greedy",
    "clique+greedy",
    "bruteforce",
)


def map_circuit(circuit: PbcCircuit, policy: str, topology: Topology, capacity: int = DEFAULT_CAPACITY,
                seed: int = 0, epsilon: float = DEFAULT_EPSILON, n_modules: int | None = None) -> MappingResult:
    """Cluster ``circuit`` into modules and place them on ``topology``.

    The module count defaults to ``ceil(n / capacity)``; slots beyond it are
    filled with empty modules.
    """
    if policy not in POLICIES:
        raise ConfigError(f"unknown policy {policy!r}; choose from {', '.join(POLICIES)}")
    k = n_modules if n_modules is not None else max(1, math.ceil(circuit.n_qubits / capacity))
    slots = topology.n_slots
    if slots < k:
        raise ConfigError(f"topology has {slots} slots but {k} modules are needed")
    clustering = _cluster(policy, circuit, k, capacity, seed, epsilon)
    sets = module_supports(circuit, clustering)
    ties = 0
    if policy == "bruteforce":
        if slots > BRUTEFORCE_LIMIT:
            raise ConfigError(f"bruteforce needs at most {BRUTEFORCE_LIMIT} slots, topology has {slots}")
        assignment = assign_bruteforce(sets, topology)
    elif policy.endswith("+priority"):
        priorities, ties = priority_trace(sets, slots)
        assignment = priorities_to_positions(priorities, topology)
    elif policy.endswith("+greedy"):
        freq = [p.freq for p in module_profiles(sets, slots)]
        ties = sum(c - 1 for c in Counter(freq).values())
        assignment = assign_greedy(freq, topology)
    else:
        assignment = assign_identity(slots, topology)
    return MappingResult(policy, clustering, assignment, sets, ties)

