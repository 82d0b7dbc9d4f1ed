"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import itertools
import json
import random
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np

from acceptance_log import record
from oracles import circuit_unitary, enumerate_partition_optimum, equal_up_to_phase, pauli_matrix, rotation_unitary
from qldpc_map.benchgen import gen_all_to_all, gen_clustered
from qldpc_map.circuit_io import Gate, GateCircuit
from qldpc_map.cost import DEFAULT_TABLE, failure_probability, swap_vs_direct
from qldpc_map.hypergraph import Hypergraph, connectivity_objective, max_part_size, partition
from qldpc_map.mapping import (
    POLICIES, assign_bruteforce, assign_priorities, priorities_to_positions, routing_cost,
)
from qldpc_map.pbc import translate
from qldpc_map.pipeline import PipelineConfig, run_pipeline
from qldpc_map.topology import GridTopology, LineTopology, grid_route, line_route, route, steiner_oracle


def nonempty_subsets(items, max_size=None):
    items = list(items)
    top = len(items) if max_size is None else min(max_size, len(items))
    for r in range(1, top + 1):
        yield from itertools.combinations(items, r)


# ---------------------------------------------------------------- 1

def residuals_always_distinct(module_sets, m):
    """Replay the elimination and check every residual frequency is distinct at every step."""
    freq = [0] * m
    for mods, w in module_sets:
        for x in mods:
            freq[x] += w
    alive = list(range(len(module_sets)))
    left = set(range(m))
    while left:
        vals = [freq[x] for x in left]
        if len(set(vals)) != len(vals):
            return False
        low = min(left, key=lambda x: freq[x])
        left.discard(low)
        for r in [r for r in alive if low in module_sets[r][0]]:
            alive.remove(r)
            mods, w = module_sets[r]
            for x in mods:
                if x in left:
                    freq[x] -= w
    return True


def random_instance(rng):
    m = rng.randint(2, 7)
    n_rot = rng.randint(1, 12)
    sets = []
    for _ in range(n_rot):
        size = rng.randint(1, m)
        sets.append((frozenset(rng.sample(range(m), size)), rng.randint(1, 9)))
    return m, sets


def test_c01_priority_heuristic_optimal_on_line():
    start = time.perf_counter()
    rng = random.Random(2024)
    checked, mismatches, example = 0, 0, None
    while checked < 500:
        m, sets = random_instance(rng)
        if not residuals_always_distinct(sets, m):
            continue
        checked += 1
        topo = LineTopology(m)
        heur = routing_cost(sets, priorities_to_positions(assign_priorities(sets, m), topo), topo)
        best = routing_cost(sets, assign_bruteforce(sets, topo), topo)
        if heur != best:
            mismatches += 1
            example = example or (sorted((sorted(s), w) for s, w in sets), heur, best)
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    detail = f"{checked} distinct-frequency instances, {mismatches} heuristic > optimum, {elapsed:.1f}s"
    if example:
        detail += f"; e.g. {example[0]} costs {example[1]} vs {example[2]}"
    record(1, "priority heuristic equals exhaustive placement", ok, detail)
    assert ok, detail


# ---------------------------------------------------------------- 2

def test_c02_line_route_matches_steiner():
    start = time.perf_counter()
    cases = bad = 0
    for m in range(1, 9):
        coords = range(m + 2)
        factory_sets = [(f,) for f in coords] + list(itertools.combinations(coords, 2))
        for facs in factory_sets:
            topo = LineTopology(m, facs)
            for targets in nonempty_subsets(topo.slots):
                cases += 1
                bad += line_route(targets, topo).edge_count != steiner_oracle(targets, topo).edge_count
    example = line_route({4}, LineTopology(4)).edge_count
    ok = bad == 0 and example == 4
    record(2, "line routing equals the exact tree", ok,
           f"{cases} instances (M<=8, one or two factories), {bad} mismatches; target 4 costs {example}; "
           f"{time.perf_counter() - start:.1f}s")
    assert ok


# ---------------------------------------------------------------- 3

def test_c03_direct_route_beats_swaps():
    start = time.perf_counter()
    pb, pc = DEFAULT_TABLE.P_B, DEFAULT_TABLE.P_C
    x = np.arange(1, 41)[:, None, None, None]
    y = np.arange(1, 26)[None, :, None, None]
    yi = np.arange(1, 26)[None, None, :, None]
    yj = np.arange(1, 26)[None, None, None, :]
    eps_swap = np.broadcast_to(3 * x * pc + y * pb, (40, 25, 25, 25))
    eps_inter = np.broadcast_to(x * pc + (yi + yj) * pb, (40, 25, 25, 25))
    # cross-check the vectorised sweep against the library at the extremes
    for args in [(1, 1, 1, 1), (1, 1, 25, 25), (40, 25, 25, 25), (17, 4, 9, 23)]:
        s = swap_vs_direct(*args)
        idx = (args[0] - 1, args[1] - 1, args[2] - 1, args[3] - 1)
        assert np.isclose(s.eps_swap, eps_swap[idx], rtol=1e-12)
        assert np.isclose(s.eps_inter, eps_inter[idx], rtol=1e-12)
    always_less = bool(np.all(eps_inter < eps_swap))
    ratio = eps_swap / eps_inter
    # every sweep point has y_i + y_j <= 50
    worst = np.unravel_index(np.argmin(ratio), ratio.shape)
    ratio_ok = bool(np.all(ratio > 2))
    share = float(np.mean(ratio > 2))
    elapsed = time.perf_counter() - start
    ok = always_less and ratio_ok and elapsed < 5
    record(3, "direct inter-module route cheaper than SWAPs", ok,
           f"eps_inter < eps_swap at all {ratio.size} points: {always_less}; "
           f"ratio > 2 at {share:.1%} of points, min ratio {ratio.min():.3f} at "
           f"x={worst[0] + 1}, y={worst[1] + 1}, y_i={worst[2] + 1}, y_j={worst[3] + 1}; {elapsed:.2f}s")
    assert ok


# ---------------------------------------------------------------- 4

def random_gate_circuit(rng, n, n_gates):
    names = ["H", "S", "SDG", "T", "TDG", "RZ"] + (["CX"] if n > 1 else [])
    gates = []
    for _ in range(n_gates):
        name = rng.choice(names)
        if name == "CX":
            gates.append(Gate(name, tuple(rng.sample(range(n), 2))))
        elif name == "RZ":
            gates.append(Gate(name, (rng.randrange(n),), rng.uniform(-np.pi, np.pi)))
        else:
            gates.append(Gate(name, (rng.randrange(n),)))
    return GateCircuit(n, tuple(gates))


def test_c04_translation_preserves_unitary():
    start = time.perf_counter()
    rng = random.Random(4)
    bad = 0
    for _ in range(200):
        n = rng.randint(1, 4)
        circ = random_gate_circuit(rng, n, rng.randint(0, 12))
        tr = translate(circ)
        dim = 2 ** n
        u = np.eye(dim, dtype=complex)
        for r in tr.circuit.rotations:
            u = rotation_unitary(pauli_matrix(r.pauli), r.phi) @ u
        for r in tr.frame.history:
            u = rotation_unitary(pauli_matrix(r.pauli), r.phi) @ u
        bad += not equal_up_to_phase(u, circuit_unitary(circ), 1e-9)
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 60
    record(4, "rotation translation is unitary-equivalent", ok,
           f"200 circuits (n<=4, <=12 gates), {bad} mismatches at 1e-9, {elapsed:.1f}s")
    assert ok


# ---------------------------------------------------------------- 5

def planted_hypergraph(rng, n, groups):
    perm = list(range(n))
    rng.shuffle(perm)
    size = n // groups
    edges = []
    for g in range(groups):
        block = perm[g * size:(g + 1) * size]
        for _ in range(3 * size):
            edges.append((frozenset(rng.sample(block, rng.randint(2, min(4, size)))), rng.randint(1, 3)))
    return Hypergraph(n, tuple(edges)), size


def test_c05_partitioner_quality():
    rng = random.Random(5)
    planted = {}
    for groups, n in ((2, 12), (3, 12)):
        hits = 0
        for seed in range(100):
            h, size = planted_hypergraph(rng, n, groups)
            hits += connectivity_objective(h, partition(h, groups, epsilon=0.0, capacity=size, seed=seed)) == 0
        planted[groups] = hits
    beats = within = 0
    for seed in range(100):
        n = rng.randint(6, 10)
        k = rng.choice((2, 3))
        edges = []
        for _ in range(rng.randint(n, 2 * n)):
            edges.append((frozenset(rng.sample(range(n), rng.randint(2, 4))), rng.randint(1, 3)))
        h = Hypergraph(n, tuple(edges))
        got = connectivity_objective(h, partition(h, k, seed=seed))
        opt = enumerate_partition_optimum(n, [(sorted(e), w) for e, w in h.edges], k,
                                          max_part_size(n, k, 0.06, 11))
        beats += got < opt
        within += got <= 1.25 * opt
    ok = all(v >= 95 for v in planted.values()) and beats == 0 and within >= 80
    record(5, "partitioner finds planted cuts and stays near optimum", ok,
           f"zero cut on planted 2-group {planted[2]}/100, 3-group {planted[3]}/100; "
           f"random: beats oracle {beats}/100, within 25% {within}/100")
    assert ok


# ---------------------------------------------------------------- 6

def test_c06_grid_route_near_optimal():
    start = time.perf_counter()
    rng = random.Random(6)
    cases = below = over = 0
    worst = 0
    shapes = [(r, c) for r in range(1, 6) for c in range(1, 6) if r * c <= 20]
    for rows, cols in shapes:
        g = GridTopology(rows, cols)
        all_sets = list(nonempty_subsets(g.slots, 5))
        picks = all_sets if len(all_sets) <= 120 else rng.sample(all_sets, 120)
        for targets in picks:
            got = grid_route(targets, g).edge_count
            opt = steiner_oracle(targets, g).edge_count
            cases += 1
            below += got < opt
            over += got > opt + 2
            worst = max(worst, got - opt)
    line_bad = 0
    for m in range(1, 9):
        g, line = GridTopology(m, 1), LineTopology(m)
        for targets in nonempty_subsets(range(1, m + 1)):
            line_bad += grid_route({(t - 1, 0) for t in targets}, g).edge_count != line_route(targets, line).edge_count
    ok = cases >= 1000 and below == 0 and over == 0 and line_bad == 0
    record(6, "grid routing within two edges of the exact tree", ok,
           f"{cases} cases over {len(shapes)} shapes up to 20 cells; below oracle {below}, "
           f"over +2 {over}, worst excess {worst}; 1-column mismatches {line_bad}; "
           f"{time.perf_counter() - start:.1f}s")
    assert ok


# ---------------------------------------------------------------- 7

def exact_failure(counts):
    probs = {"B": DEFAULT_TABLE.P_B, "C_routing": DEFAULT_TABLE.P_C}
    ok = Fraction(1)
    for key, n in counts.items():
        ok *= (1 - Fraction(probs[key])) ** n
    return float(1 - ok)


def test_c07_failure_arithmetic():
    examples = [{}, {"C_routing": 2}, {"B": 50, "C_routing": 1}, {"B": 3, "C_routing": 2}]
    errs = []
    for counts in examples:
        got, want = failure_probability(counts, DEFAULT_TABLE), exact_failure(counts)
        errs.append(0.0 if want == got == 0 else abs(got - want) / want)
    arithmetic_ok = max(errs) <= 1e-12
    few_c = failure_probability({"B": 50, "C_routing": 1}, DEFAULT_TABLE)
    many_c = failure_probability({"B": 3, "C_routing": 2}, DEFAULT_TABLE)
    dominance = few_c < many_c
    ok = arithmetic_ok and dominance
    record(7, "failure-rate arithmetic and one-C-for-47-B trade", ok,
           f"max relative error {max(errs):.1e}; P{{B:50,C:1}}={few_c:.4e} vs P{{B:3,C:2}}={many_c:.4e} "
           f"(P_C/P_B={DEFAULT_TABLE.P_C / DEFAULT_TABLE.P_B:.1f}, so 47 extra B outweigh one C)")
    assert ok


# ---------------------------------------------------------------- 8

def mean_non_fixed(generator_for, policies, seeds):
    totals = {p: [] for p in policies}
    for seed in seeds:
        cfg = PipelineConfig(generator=generator_for(seed), policies=list(policies), seeds=[seed])
        for rep in run_pipeline(cfg).reports:
            totals[rep.policy].append(rep.P_non_fixed)
    return {p: float(np.mean(v)) for p, v in totals.items()}


def test_c08_end_to_end_improvement():
    start = time.perf_counter()
    seeds = range(10)
    rows, ok = [], True
    for n in (22, 33, 44):
        means = mean_non_fixed(lambda s: {"kind": "clustered", "n": n, "groups": n // 11, "seed": s},
                               ("hypergraph+priority", "random+identity", "chain+greedy"), seeds)
        vs_random = 1 - means["hypergraph+priority"] / means["random+identity"]
        vs_chain = 1 - means["hypergraph+priority"] / means["chain+greedy"]
        ok &= vs_random >= 0.10 and vs_chain >= 0.0
        rows.append(f"n={n}: {vs_random:.1%} lower than random, {vs_chain:+.1%} vs chain")
    wide = mean_non_fixed(lambda s: {"kind": "all_to_all", "n": 33, "mode": "wide", "seed": s},
                          [p for p in POLICIES if p != "bruteforce"], seeds)
    spread = max(wide.values()) / min(wide.values()) - 1
    ok &= spread <= 0.01
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    record(8, "mapping gains on clustered circuits, none on all-to-all", ok,
           "; ".join(rows) + f"; wide all-to-all spread {spread:.2%}; {elapsed:.0f}s")
    assert ok


# ---------------------------------------------------------------- 9

def test_c09_cli_reproducible(tmp_path):
    args = [sys.executable, "-m", "qldpc_map.cli", "run", "--generator", "clustered",
            "--gen-param", "n=33", "--gen-param", "groups=3", "--gen-param", "rz_fraction=0.3",
            "--policies", ",".join(p for p in POLICIES if p != "bruteforce"), "--seeds", "3", "--mode", "rz"]
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        proc = subprocess.run(args + ["--out", str(path)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
        outs.append(path.read_bytes())
    reports = len(json.loads(outs[0])["reports"])
    ok = outs[0] == outs[1]
    record(9, "CLI runs are byte-identical", ok, f"two runs, {reports} reports, {len(outs[0])} bytes each")
    assert ok


# ---------------------------------------------------------------- 10

def test_c10_factories_never_hurt():
    rng = random.Random(10)
    checks = bad = 0
    for _ in range(100):
        if rng.random() < 0.5:
            m = rng.randint(2, 12)
            topo = LineTopology(m, tuple(rng.sample(range(m + 2), rng.randint(1, 2))))
            spare = [f for f in range(m + 2) if f not in topo.factories]
        else:
            topo = GridTopology(rng.randint(1, 6), rng.randint(1, 6))
            topo = topo.with_factories(rng.sample(range(topo.width), 1))
            spare = [f for f in range(topo.width) if f not in topo.factories]
        if not spare:
            continue
        slots = list(topo.slots)
        rng.shuffle(slots)
        # fixed clustering and assignment: module i sits on slots[i]
        module_sets = [set(rng.sample(range(len(slots)), rng.randint(1, min(5, len(slots))))) for _ in range(20)]
        for extra in spare:
            more = topo.with_factories(topo.factories + (extra,))
            for mods in module_sets:
                targets = [slots[i] for i in mods]
                checks += 1
                bad += route(targets, more).edge_count > route(targets, topo).edge_count
    ok = bad == 0
    record(10, "adding a factory never raises a routing cost", ok,
           f"100 random configurations, {checks} rotation checks, {bad} increases")
    assert ok


if __name__ == "__main__":
    import pytest
    sys.exit(pytest.main([__file__, "-q"]))
