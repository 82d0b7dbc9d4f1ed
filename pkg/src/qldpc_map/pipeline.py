"""End-to-end driver: load or generate, map, route, cost and summarize.

A run is described by a :class:`PipelineConfig`.  Each (policy, seed) pair
produces one :class:`~qldpc_map.cost.ErrorReport`; the summary aggregates
them per policy and compares each policy against a baseline.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .benchgen import generate
from .circuit_io import parse_gate_circuit, parse_rotation_list
from .cost import (
    CostTable, SynthesisModel, apply_overrides, parse_cost_table, program_failure, tally,
)
from .errors import ConfigError
from .hypergraph import DEFAULT_CAPACITY, DEFAULT_EPSILON
from .mapping import POLICIES, map_circuit
from .pauli import PbcCircuit
from .pbc import to_pbc
from .topology import LineTopology, Topology, auto_grid, parse_topology

SUMMARY_FIELDS = ("P_total", "P_non_fixed", "P_fixed", "timesteps", "B", "C_routing")
SWEEPS = {
    "capacity": (11, 9, 7, 5),
    "factory_density": (25, 50, 75, 100),
    "grid_shape": (1, 2, 3, 4),
    "error_scale": (0.25, 0.5, 1.0, 2.0, 4.0),
}


@dataclass
class PipelineConfig:
    """Declarative description of one experiment.

    Either ``input`` (a rotation list or gate circuit file) or ``generator``
    (``{"kind": ..., **params}``) supplies the circuit.  ``seeds`` is a
    count (seeds ``0..n-1``) or an explicit list.
    """

    input: str | None = None
    generator: dict | None = None
    topology: str = "line:auto"
    policies: list = field(default_factory=lambda: ["hypergraph+priority", "random+identity"])
    seeds: int | list = 1
    mode: str = "t"
    capacity: int = DEFAULT_CAPACITY
    epsilon: float = DEFAULT_EPSILON
    error_rate: float = 1e-4
    cost_file: str | None = None
    cost_overrides: dict = field(default_factory=dict)
    error_scale: float = 1.0
    synthesis: dict = field(default_factory=lambda: {"mode": "stochastic", "seed": 0})
    rz_precision: float = 1e-4
    baseline: str = "random+identity"
    idle: int = 0
    shift: int = 0

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config key(s): {', '.join(sorted(unknown))}")
        cfg = cls(**data)
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "PipelineConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def seed_list(self) -> list[int]:
        if isinstance(self.seeds, int):
            return list(range(self.seeds))
        return [int(s) for s in self.seeds]

    def validate(self) -> None:
        if (self.input is None) == (self.generator is None):
            raise ConfigError("exactly one of input and generator must be set")
        if not self.policies:
            raise ConfigError("at least one policy is required")
        for p in self.policies:
            if p not in POLICIES:
                raise ConfigError(f"unknown policy {p!r}; choose from {', '.join(POLICIES)}")
        if self.mode not in ("t", "rz"):
            raise ConfigError(f"mode must be 't' or 'rz', got {self.mode!r}")
        if self.capacity < 1:
            raise ConfigError("capacity must be positive")
        if isinstance(self.seeds, int) and self.seeds < 1:
            raise ConfigError("seeds must be a positive count or a list")
        if self.error_scale < 0:
            raise ConfigError("error_scale must be non-negative")

    def cost_table(self) -> CostTable:
        table = CostTable.at(self.error_rate)
        if self.cost_file:
            table = parse_cost_table(Path(self.cost_file).read_text(), base=table)
        if self.cost_overrides:
            table = apply_overrides(table, self.cost_overrides)
        if self.error_scale != 1.0:
            table = table.scaled(self.error_scale)
        return table

    def synthesis_model(self) -> SynthesisModel:
        spec = dict(self.synthesis)
        table = spec.pop("table", None)
        if isinstance(table, str):
            table = json.loads(Path(table).read_text())
        try:
            return SynthesisModel(table=table or {}, **spec)
        except TypeError as exc:
            raise ConfigError(f"bad synthesis settings: {exc}") from exc


def load_config(path) -> PipelineConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return PipelineConfig.from_dict(data)


def load_circuit(path) -> PbcCircuit:
    """Read a rotation list, or translate a gate circuit, from ``path``."""
    text = Path(path).read_text()
    for raw in text.splitlines():
        word = raw.split("#", 1)[0].strip().split(maxsplit=1)
        if not word or word[0].upper() == "QUBITS":
            continue
        if word[0].upper() in ("ROT", "MEAS"):
            return parse_rotation_list(text)
        break
    return to_pbc(parse_gate_circuit(text))


def config_circuit(cfg: PipelineConfig) -> PbcCircuit:
    if cfg.input is not None:
        return load_circuit(cfg.input)
    try:
        return generate(cfg.generator)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad generator settings: {exc}") from exc


def n_modules(circuit: PbcCircuit, capacity: int) -> int:
    return max(1, math.ceil(circuit.n_qubits / capacity))


def config_topology(cfg: PipelineConfig, modules: int) -> Topology:
    try:
        topo = parse_topology(cfg.topology, n_modules=modules)
    except ValueError as exc:
        raise ConfigError(f"bad topology {cfg.topology!r}: {exc}") from exc
    if topo.n_slots < modules:
        raise ConfigError(f"topology {topo.descriptor} has {topo.n_slots} slots, {modules} modules needed")
    return topo


@dataclass(frozen=True)
class PipelineResult:
    reports: list
    summary: dict
    config: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "config": self.config,
            "reports": [r.to_dict() for r in self.reports],
            "summary": self.summary,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def _field(report, name):
    return report.counts[name] if name in report.counts else getattr(report, name)


def summarize(reports, baseline: str | None) -> dict:
    """Mean and sample standard deviation per policy, plus baseline comparisons."""
    by_policy: dict[str, list] = {}
    for r in reports:
        by_policy.setdefault(r.policy, []).append(r)
    out = {}
    for policy, rows in by_policy.items():
        stats = {}
        for name in SUMMARY_FIELDS:
            vals = np.array([_field(r, name) for r in rows], dtype=float)
            stats[name] = {
                "mean": float(vals.mean()),
                "std": float(vals.std(ddof=1)) if len(vals) > 1 else 0.0,
            }
        out[policy] = {"runs": len(rows), **stats}
    if baseline in out:
        for policy, stats in out.items():
            rel = {}
            for name in ("P_total", "P_non_fixed", "C_routing"):
                base = out[baseline][name]["mean"]
                rel[name] = (base - stats[name]["mean"]) / base if base else 0.0
            stats["improvement_vs_baseline"] = rel
    return {"baseline": baseline, "policies": out}


def _run(cfg: PipelineConfig, circuit: PbcCircuit, topo: Topology, table: CostTable) -> list:
    synth = cfg.synthesis_model()
    k = n_modules(circuit, cfg.capacity)
    reports = []
    for policy in cfg.policies:
        for seed in cfg.seed_list():
            try:
                mapped = map_circuit(circuit, policy, topo, cfg.capacity, seed, cfg.epsilon, n_modules=k)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            counts = tally(circuit, mapped.clustering, mapped.assignment, topo, synth, cfg.mode,
                           cfg.rz_precision, cfg.idle, cfg.shift)
            meta = {
                "n_qubits": circuit.n_qubits,
                "n_modules": k,
                "n_rotations": len(circuit.rotations),
                "mode": cfg.mode,
                "tie_breaks": mapped.ties,
            }
            reports.append(program_failure(counts, table, policy, topo.descriptor, seed, meta))
    return reports


def run_pipeline(config: PipelineConfig | dict) -> PipelineResult:
    """One report per (policy, seed) and a per-policy summary."""
    cfg = config if isinstance(config, PipelineConfig) else PipelineConfig.from_dict(config)
    cfg.validate()
    circuit = config_circuit(cfg)
    topo = config_topology(cfg, n_modules(circuit, cfg.capacity))
    reports = _run(cfg, circuit, topo, cfg.cost_table())
    baseline = cfg.baseline if cfg.baseline in cfg.policies else None
    return PipelineResult(reports, summarize(reports, baseline), cfg.to_dict())


def spread_factories(n_slots: int, count: int) -> tuple[int, ...]:
    """``count`` line factories: one at the top end, the rest evenly spaced beside slots."""
    count = max(1, min(count, n_slots))
    return tuple(sorted({round(j * n_slots / count) for j in range(count)}))


def run_sensitivity(config: PipelineConfig | dict, sweep: str, values=None) -> list[dict]:
    """Repeat the pipeline while varying one knob.

    ``capacity`` changes qubits per module (and so the module count),
    ``factory_density`` places ``ceil(x% * M)`` factories along a line,
    ``grid_shape`` uses a ``ceil(M/x) x x`` grid with ``x`` factories, and
    ``error_scale`` multiplies every error rate except inter-module
    measurements.
    """
    cfg = config if isinstance(config, PipelineConfig) else PipelineConfig.from_dict(config)
    if sweep not in SWEEPS:
        raise ConfigError(f"unknown sweep {sweep!r}; choose from {', '.join(SWEEPS)}")
    values = SWEEPS[sweep] if values is None else tuple(values)
    circuit = config_circuit(cfg)
    series = []
    for v in values:
        point = cfg
        topo = None
        if sweep == "capacity":
            point = cfg.replace(capacity=int(v))
        elif sweep == "error_scale":
            point = cfg.replace(error_scale=float(v))
        k = n_modules(circuit, point.capacity)
        if sweep == "factory_density":
            if not 0 < float(v) <= 100:
                raise ConfigError("factory density must lie in (0, 100]")
            topo = LineTopology(k, spread_factories(k, math.ceil(round(float(v) / 100 * k, 9))))
        elif sweep == "grid_shape":
            if int(v) < 1:
                raise ConfigError("grid width must be positive")
            topo = auto_grid(k, int(v))
        else:
            topo = config_topology(point, k)
        reports = _run(point, circuit, topo, point.cost_table())
        baseline = point.baseline if point.baseline in point.policies else None
        series.append({
            "sweep": sweep,
            "value": v,
            "topology": topo.descriptor,
            "n_modules": k,
            "summary": summarize(reports, baseline),
        })
    return series

