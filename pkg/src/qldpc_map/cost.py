"""Instruction counts, failure probabilities and execution time.

Operations are counted per kind: in-module measurements (B), inter-module
measurements spent on routing (C_routing) and on Rz synthesis (C_synth),
magic-state injections (T_inject), idles (I) and shift automorphisms (U).
Program failure is ``1 - prod(1 - p_op)`` over every counted operation.
Routing and in-module measurements depend on the mapping and form the
"non-fixed" part; everything else is "fixed".
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.stats import norm

from .errors import ConfigError
from .hypergraph import Clustering
from .mapping import Assignment
from .pauli import RZ, PbcCircuit
from .pbc import rz_t_count
from .topology import Topology

SCHEMA_VERSION = 1
SYNTH_MIN, SYNTH_MAX = 1, 25
SYNTH_MEAN = 18.5
SYNTH_SIGMA = 3.5


@dataclass(frozen=True)
class CostTable:
    """Per-instruction logical error rates and durations in timesteps.

    ``P_T_base`` is the injection error excluding the inter-module
    measurement that carries the magic state; ``P_T`` adds ``P_C`` unless
    ``inject_pc`` is off.
    """

    P_I: float
    P_U: float
    P_B: float
    P_C: float
    P_T_base: float
    T_I: int = 8
    T_U: int = 14
    T_B: int = 120
    T_C: int = 120
    T_T: int = 471
    inject_pc: bool = True

    def __post_init__(self):
        for key in ("P_I", "P_U", "P_B", "P_C", "P_T_base"):
            v = getattr(self, key)
            if not 0 <= v < 1:
                raise ConfigError(f"{key} must lie in [0, 1), got {v}")
        for key in ("T_I", "T_U", "T_B", "T_C", "T_T"):
            if int(getattr(self, key)) < 1:
                raise ConfigError(f"{key} must be >= 1")
        if self.P_T >= 1:
            raise ConfigError("injection error P_T must stay below 1")

    @property
    def P_T(self) -> float:
        return self.P_T_base + (self.P_C if self.inject_pc else 0.0)

    @classmethod
    def at(cls, p: float) -> "CostTable":
        """Central values for physical error rate ``1e-4`` or ``1e-3``."""
        for key, exps in _PRESETS.items():
            if math.isclose(p, key, rel_tol=1e-9):
                return cls(*(10.0 ** e for e in exps))
        raise ConfigError(f"no preset for physical error rate {p}; use 1e-4 or 1e-3")

    def scaled(self, factor: float) -> "CostTable":
        """Multiply every error rate except ``P_C`` by ``factor``."""
        return replace(self, P_I=self.P_I * factor, P_U=self.P_U * factor,
                       P_B=self.P_B * factor, P_T_base=self.P_T_base * factor)

    def to_dict(self) -> dict:
        return asdict(self)


# log10 central values: I, U, B, C, T base
_PRESETS = {
    1e-4: (-14.8, -12.2, -9.0, -7.4, -7.4),
    1e-3: (-8.8, -6.4, -5.0, -2.7, -5.5),
}
_KEYS = {
    "P_I": float, "P_U": float, "P_B": float, "P_C": float, "P_T_BASE": float,
    "T_I": int, "T_U": int, "T_B": int, "T_C": int, "T_T": int, "INJECT_PC": bool,
}
_FIELD = {"P_T_BASE": "P_T_base", "INJECT_PC": "inject_pc"}
DEFAULT_TABLE = CostTable.at(1e-4)


def parse_cost_table(text: str, base: CostTable | None = None) -> CostTable:
    """Read ``KEY=value`` lines (``#`` comments) on top of ``base``.

    Keys: ``P_I P_U P_B P_C P_T_BASE T_I T_U T_B T_C T_T INJECT_PC``.
    """
    base = DEFAULT_TABLE if base is None else base
    overrides = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"cost table line {no}: expected KEY=value, got {raw.strip()!r}")
        overrides[key.strip()] = value.strip()
    return apply_overrides(base, overrides)


def apply_overrides(table: CostTable, overrides: dict) -> CostTable:
    """Replace table entries from a ``{KEY: value}`` mapping (keys as in the file format)."""
    values = {}
    for key, raw in overrides.items():
        key = str(key).upper()
        if key not in _KEYS:
            raise ConfigError(f"unknown cost table key {key!r}")
        kind = _KEYS[key]
        try:
            if kind is bool:
                val = raw if isinstance(raw, bool) else str(raw).strip().lower() in ("1", "true", "yes", "on")
            elif kind is int:
                val = int(float(raw))
            else:
                val = float(raw)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad value for {key}: {raw!r}") from exc
        values[_FIELD.get(key, key)] = val
    return replace(table, **values)


# ---------------------------------------------------------------- synthesis

@lru_cache(maxsize=None)
def _stochastic_cdf() -> np.ndarray:
    """Discretized normal on 1..25 whose mean is exactly ``SYNTH_MEAN``."""
    support = np.arange(SYNTH_MIN, SYNTH_MAX + 1)

    def pmf(mu):
        w = norm.pdf(support, loc=mu, scale=SYNTH_SIGMA)
        return w / w.sum()

    mu = brentq(lambda m: pmf(m) @ support - SYNTH_MEAN, SYNTH_MIN, SYNTH_MAX + 10)
    return np.cumsum(pmf(mu))


def synthesis_pmf() -> np.ndarray:
    """Probabilities of counts ``1..25`` under the stochastic model."""
    cdf = _stochastic_cdf()
    return np.diff(cdf, prepend=0.0)


@dataclass(frozen=True)
class SynthesisModel:
    """In-module measurements needed to realize one module's Pauli fragment.

    A fragment is the Pauli word a rotation applies to one module, read
    over all of the module's qubits in index order (identity included), so
    the same physical block always costs the same however modules are
    labelled.  ``constant`` returns ``value``; ``table`` looks fragments up
    in ``table`` (falling back to ``value``); ``stochastic`` makes a seeded,
    order-independent draw per fragment from a discretized normal on 1..25
    with mean 18.5.
    """

    mode: str = "stochastic"
    value: int = 19
    table: dict = field(default_factory=dict, compare=False)
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("constant", "table", "stochastic"):
            raise ConfigError(f"synthesis mode must be constant, table or stochastic, got {self.mode!r}")
        for v in [self.value, *self.table.values()]:
            if not SYNTH_MIN <= int(v) <= SYNTH_MAX:
                raise ConfigError(f"synthesis counts must lie in [{SYNTH_MIN}, {SYNTH_MAX}], got {v}")

    def count(self, fragment: str) -> int:
        if self.mode == "constant":
            return int(self.value)
        if self.mode == "table":
            return int(self.table.get(fragment, self.value))
        digest = hashlib.blake2b(f"{self.seed}|{fragment}".encode(), digest_size=8).digest()
        u = int.from_bytes(digest, "big") / 2.0 ** 64
        idx = int(np.searchsorted(_stochastic_cdf(), u, side="right"))
        return SYNTH_MIN + min(idx, SYNTH_MAX - SYNTH_MIN)

    def to_dict(self) -> dict:
        out = {"mode": self.mode}
        if self.mode == "stochastic":
            out["seed"] = self.seed
        else:
            out["value"] = self.value
        return out


# ---------------------------------------------------------------- tallies

COUNT_KEYS = ("B", "C_routing", "C_synth", "T_inject", "idle", "shift")
NON_FIXED = ("B", "C_routing")


@dataclass(frozen=True)
class RotationCost:
    index: int
    modules: tuple[int, ...]
    weight: int
    B: int
    C_routing: int
    C_synth: int
    T_inject: int


@dataclass
class InstructionTally:
    B: int = 0
    C_routing: int = 0
    C_synth: int = 0
    T_inject: int = 0
    idle: int = 0
    shift: int = 0
    rotations: list[RotationCost] = field(default_factory=list, compare=False)

    def __post_init__(self):
        for key in COUNT_KEYS:
            if getattr(self, key) < 0:
                raise ValueError(f"count {key} must be >= 0")

    def counts(self) -> dict[str, int]:
        return {k: int(getattr(self, k)) for k in COUNT_KEYS}


def fragment(pauli, qubits) -> str:
    """Letters of ``pauli`` on ``qubits`` in index order, identities included."""
    return "".join(pauli.letter(q) for q in sorted(qubits))


def tally(circuit: PbcCircuit, c: Clustering, a: Assignment, t: Topology,
          synth: SynthesisModel | None = None, mode: str = "t",
          rz_precision: float = 1e-4, idle: int = 0, shift: int = 0) -> InstructionTally:
    """Count instructions for ``circuit`` under a clustering and placement.

    Per rotation touching modules ``M_r``: each module pays its synthesis
    count in B, routing pays one C per tree edge, and one injection supplies
    the magic state.  In ``rz`` mode an Rz rotation also pays ``t`` T gates
    of synthesis, each one C plus one injection.
    """
    if mode not in ("t", "rz"):
        raise ConfigError(f"mode must be 't' or 'rz', got {mode!r}")
    if c.n != circuit.n_qubits:
        raise ValueError(f"clustering covers {c.n} qubits, circuit has {circuit.n_qubits}")
    if len(a) != t.n_slots or c.k > len(a):
        raise ValueError(f"assignment of {len(a)} modules does not fit {t.descriptor} with {c.k} clusters")
    a.validate(t)
    synth = SynthesisModel() if synth is None else synth
    t_count = rz_t_count(rz_precision)
    members = c.modules()
    out = InstructionTally(idle=idle, shift=shift)
    route_cache: dict = {}
    for i, r in enumerate(circuit.rotations):
        support = r.support
        mods = tuple(sorted({c.assignment[q] for q in support}))
        if not mods:
            continue
        w = r.weight
        b = sum(synth.count(fragment(r.pauli, members[m])) for m in mods)
        key = frozenset(a.positions[m] for m in mods)
        if key not in route_cache:
            route_cache[key] = t.route(key).edge_count
        c_route = route_cache[key]
        c_synth = t_count if (mode == "rz" and r.angle == RZ) else 0
        cost = RotationCost(i, mods, w, b * w, c_route * w, c_synth * w, (1 + c_synth) * w)
        out.rotations.append(cost)
        out.B += cost.B
        out.C_routing += cost.C_routing
        out.C_synth += cost.C_synth
        out.T_inject += cost.T_inject
    return out


def _op_probs(table: CostTable) -> dict[str, float]:
    return {"B": table.P_B, "C_routing": table.P_C, "C_synth": table.P_C,
            "T_inject": table.P_T, "idle": table.P_I, "shift": table.P_U}


def failure_probability(counts: dict[str, int], table: CostTable) -> float:
    """``1 - prod (1 - p)^count`` computed in log space."""
    probs = _op_probs(table)
    log_ok = sum(n * math.log1p(-probs[k]) for k, n in counts.items() if n)
    return -math.expm1(log_ok)


@dataclass(frozen=True)
class ErrorReport:
    counts: dict
    P_total: float
    P_non_fixed: float
    P_fixed: float
    timesteps: int
    policy: str = ""
    topology: str = ""
    seed: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "policy": self.policy,
            "topology": self.topology,
            "seed": self.seed,
            "counts": dict(self.counts),
            "P_total": self.P_total,
            "P_non_fixed": self.P_non_fixed,
            "P_fixed": self.P_fixed,
            "timesteps": self.timesteps,
            "meta": dict(self.meta),
        }


def execution_time(t: InstructionTally | dict, table: CostTable = DEFAULT_TABLE) -> int:
    counts = t.counts() if isinstance(t, InstructionTally) else t
    dur = {"B": table.T_B, "C_routing": table.T_C, "C_synth": table.T_C,
           "T_inject": table.T_T, "idle": table.T_I, "shift": table.T_U}
    return int(sum(n * dur[k] for k, n in counts.items()))


def program_failure(t: InstructionTally | dict, table: CostTable = DEFAULT_TABLE,
                    policy: str = "", topology: str = "", seed: int | None = None,
                    meta: dict | None = None) -> ErrorReport:
    if not isinstance(t, InstructionTally):
        unknown = set(t) - set(COUNT_KEYS)
        if unknown:
            raise ValueError(f"unknown count key(s) {sorted(unknown)}")
    counts = t.counts() if isinstance(t, InstructionTally) else {k: int(t.get(k, 0)) for k in COUNT_KEYS}
    non_fixed = {k: counts[k] for k in NON_FIXED}
    fixed = {k: v for k, v in counts.items() if k not in NON_FIXED}
    return ErrorReport(
        counts=counts,
        P_total=failure_probability(counts, table),
        P_non_fixed=failure_probability(non_fixed, table),
        P_fixed=failure_probability(fixed, table),
        timesteps=execution_time(counts, table),
        policy=policy, topology=topology, seed=seed, meta=dict(meta or {}),
    )


@dataclass(frozen=True)
class SwapComparison:
    eps_swap: float
    eps_inter: float
    time_swap: int
    time_direct: int


def swap_vs_direct(x: int, y: int, y_i: int, y_j: int, table: CostTable = DEFAULT_TABLE) -> SwapComparison:
    """Move a module ``x`` hops by SWAPs versus measuring across the gap.

    Swapping costs ``3x`` inter-module measurements plus ``y`` in-module
    ones; the direct route costs ``x`` inter-module measurements plus the
    two modules' own ``y_i + y_j``, run side by side in time.
    """
    if x < 1:
        raise ValueError("module distance must be >= 1")
    for v in (y, y_i, y_j):
        if not SYNTH_MIN <= v <= SYNTH_MAX:
            raise ValueError(f"in-module counts must lie in [{SYNTH_MIN}, {SYNTH_MAX}]")
    return SwapComparison(
        eps_swap=3 * x * table.P_C + y * table.P_B,
        eps_inter=x * table.P_C + (y_i + y_j) * table.P_B,
        time_swap=3 * x * table.T_C + y * table.T_B,
        time_direct=x * table.T_C + max(y_i, y_j) * table.T_B,
    )
