"""Seeded benchmark generators producing rotation layers.

Every generator is a pure function of its arguments: the same parameters
and seed always give the same circuit.  Rotation axes use random
non-identity letters on the chosen support.
"""

from __future__ import annotations

import math
import random

from .pauli import RZ, T_GATE, PauliRotation, PauliString, PbcCircuit

_LETTERS = "XYZ"


def _rotation(n: int, support, rng: random.Random, rz_fraction: float = 0.0) -> PauliRotation:
    letters = {q: rng.choice(_LETTERS) for q in sorted(support)}
    pauli = PauliString.from_letters(n, letters)
    if rz_fraction and rng.random() < rz_fraction:
        theta = rng.uniform(-math.pi, math.pi)
        return PauliRotation(pauli, RZ, theta)
    return PauliRotation(pauli, T_GATE)


def planted_groups(n: int, groups: int, seed: int = 0) -> list[list[int]]:
    """Qubits shuffled and split into ``groups`` near-equal blocks."""
    if not 1 <= groups <= n:
        raise ValueError("need 1 <= groups <= n")
    rng = random.Random(f"groups:{seed}")
    qubits = list(range(n))
    rng.shuffle(qubits)
    bounds = [round(i * n / groups) for i in range(groups + 1)]
    return [sorted(qubits[bounds[i]:bounds[i + 1]]) for i in range(groups)]


def gen_clustered(n: int, groups: int, intra_weight: int = 30, inter_weight: int = 3,
                  seed: int = 0, max_width: int = 4, rz_fraction: float = 0.0) -> PbcCircuit:
    """Rotations mostly inside planted qubit groups.

    Each group receives ``intra_weight`` rotations supported inside it; a
    further ``inter_weight`` rotations each straddle two groups.  Groups
    are random (not index-contiguous) so index order gives no hint.

    Args:
        n: Qubit count.
        groups: Number of planted groups.
        intra_weight: Rotations per group.
        inter_weight: Total cross-group rotations; zero leaves a zero-cut optimum.
        seed: Generator seed.
        max_width: Largest support size of a rotation.
        rz_fraction: Share of rotations emitted as Rz with a random angle.
    """
    if intra_weight < 0 or inter_weight < 0:
        raise ValueError("rotation counts must be non-negative")
    if inter_weight and groups < 2:
        raise ValueError("cross-group rotations need at least two groups")
    blocks = planted_groups(n, groups, seed)
    rng = random.Random(f"clustered:{seed}")
    rotations = []
    for block in blocks:
        for _ in range(intra_weight):
            width = rng.randint(min(2, len(block)), min(max_width, len(block)))
            rotations.append(_rotation(n, rng.sample(block, width), rng, rz_fraction))
    for _ in range(inter_weight):
        g1, g2 = rng.sample(range(groups), 2)
        support = {rng.choice(blocks[g1]), rng.choice(blocks[g2])}
        extra = rng.randint(0, max(0, max_width - 2))
        pool = [q for q in blocks[g1] + blocks[g2] if q not in support]
        support.update(rng.sample(pool, min(extra, len(pool))))
        rotations.append(_rotation(n, support, rng, rz_fraction))
    return PbcCircuit(n, tuple(rotations))


def gen_all_to_all(n: int, mode: str = "wide", seed: int = 0, depth: int = 20,
                   rz_fraction: float = 0.0) -> PbcCircuit:
    """Structure-free interaction patterns.

    ``wide`` emits ``depth`` rotations acting on every qubit; ``pairwise``
    emits one rotation for each of the ``n(n-1)/2`` qubit pairs.
    """
    rng = random.Random(f"all_to_all:{mode}:{seed}")
    if mode == "wide":
        rotations = [_rotation(n, range(n), rng, rz_fraction) for _ in range(depth)]
    elif mode == "pairwise":
        rotations = [_rotation(n, (i, j), rng, rz_fraction) for i in range(n) for j in range(i + 1, n)]
    else:
        raise ValueError(f"mode must be wide or pairwise, got {mode!r}")
    return PbcCircuit(n, tuple(rotations))


def gen_random_ppr(n: int, depth: int, width_distribution=2, seed: int = 0,
                   rz_fraction: float = 0.0) -> PbcCircuit:
    """``depth`` rotations with uniformly random supports.

    ``width_distribution`` is either a fixed width or a mapping from width
    to relative probability.
    """
    if isinstance(width_distribution, int):
        law = {width_distribution: 1.0}
    else:
        law = {int(w): float(p) for w, p in dict(width_distribution).items()}
    if not law or any(p < 0 for p in law.values()) or sum(law.values()) <= 0:
        raise ValueError("width distribution needs non-negative weights with a positive sum")
    if any(not 1 <= w <= n for w, p in law.items() if p > 0):
        raise ValueError(f"widths must lie in [1, {n}]")
    widths, probs = zip(*sorted(law.items()))
    rng = random.Random(f"random_ppr:{seed}")
    rotations = []
    for _ in range(depth):
        w = rng.choices(widths, probs)[0]
        rotations.append(_rotation(n, rng.sample(range(n), w), rng, rz_fraction))
    return PbcCircuit(n, tuple(rotations))


GENERATORS = {
    "clustered": gen_clustered,
    "all_to_all": gen_all_to_all,
    "random_ppr": gen_random_ppr,
}


def generate(spec: dict) -> PbcCircuit:
    """Build a circuit from ``{"kind": name, **params}``."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {', '.join(GENERATORS)}")
    if kind == "random_ppr" and isinstance(spec.get("width_distribution"), dict):
        spec["width_distribution"] = {int(k): v for k, v in spec["width_distribution"].items()}
    return GENERATORS[kind](**spec)
