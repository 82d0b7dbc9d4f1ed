"""Text formats: gate circuits, rotation lists and error reports.

Gate circuit grammar (one statement per line, ``#`` starts a comment)::

    QUBITS 2
    H 0
    CX 0 1
    RZ 0.785398 1
    MEASZ 1

Rotation list grammar::

    QUBITS 3
    ROT pi8 XIZ          # weight defaults to 1
    ROT rz:0.25 -ZZI 3   # optional sign on the Pauli word, weight 3
    MEAS XXX
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

from .errors import ParseError
from .pauli import RZ, T_GATE, PauliRotation, PauliString, PbcCircuit

GATE_ARITY = {"H": 1, "S": 1, "SDG": 1, "T": 1, "TDG": 1, "MEASZ": 1, "CX": 2, "RZ": 1}


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple[int, ...]
    theta: float | None = None
    line: int | None = None


@dataclass(frozen=True)
class GateCircuit:
    n_qubits: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if g.name not in GATE_ARITY:
                raise ValueError(f"unsupported gate {g.name}")
            if len(g.qubits) != GATE_ARITY[g.name]:
                raise ValueError(f"{g.name} takes {GATE_ARITY[g.name]} qubit(s)")
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise ValueError(f"{g.name} qubit index out of range")
            if g.name == "CX" and g.qubits[0] == g.qubits[1]:
                raise ValueError("CX control and target must differ")
            if (g.name == "RZ") != (g.theta is not None):
                raise ValueError("theta is required for RZ and only RZ")

    def __len__(self) -> int:
        return len(self.gates)


def _statements(text: str):
    """Yield ``(line_no, tokens, columns)`` for every non-blank statement."""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        tokens, cols = [], []
        col = 0
        for tok in body.split():
            col = body.index(tok, col)
            tokens.append(tok)
            cols.append(col + 1)
            col += len(tok)
        if tokens:
            yield line_no, tokens, cols


def _header(stmts) -> tuple[int, int]:
    try:
        line_no, toks, cols = next(stmts)
    except StopIteration:
        raise ParseError("empty input, expected 'QUBITS <n>'", 1) from None
    if toks[0].upper() != "QUBITS" or len(toks) != 2:
        raise ParseError("first statement must be 'QUBITS <n>'", line_no, cols[0])
    try:
        n = int(toks[1])
    except ValueError:
        raise ParseError(f"bad qubit count {toks[1]!r}", line_no, cols[1]) from None
    if n < 1:
        raise ParseError("qubit count must be positive", line_no, cols[1])
    return n, line_no


def _parse_float(tok: str, line_no: int, col: int) -> float:
    try:
        val = float(tok)
    except ValueError:
        raise ParseError(f"malformed angle {tok!r}", line_no, col) from None
    if not math.isfinite(val):
        raise ParseError(f"non-finite angle {tok!r}", line_no, col)
    return val


def parse_gate_circuit(text: str) -> GateCircuit:
    stmts = _statements(text)
    n, _ = _header(stmts)
    gates = []
    for line_no, toks, cols in stmts:
        name = toks[0].upper()
        if name not in GATE_ARITY:
            raise ParseError(f"unknown mnemonic {toks[0]!r}", line_no, cols[0])
        args, acols = toks[1:], cols[1:]
        theta = None
        if name == "RZ":
            if not args:
                raise ParseError("RZ needs an angle", line_no, cols[0])
            theta = _parse_float(args[0], line_no, acols[0])
            args, acols = args[1:], acols[1:]
        if len(args) != GATE_ARITY[name]:
            raise ParseError(
                f"{name} takes {GATE_ARITY[name]} qubit argument(s), got {len(args)}",
                line_no, cols[0],
            )
        qubits = []
        for tok, col in zip(args, acols):
            try:
                q = int(tok)
            except ValueError:
                raise ParseError(f"bad qubit index {tok!r}", line_no, col) from None
            if not 0 <= q < n:
                raise ParseError(f"qubit index {q} out of range [0, {n})", line_no, col)
            qubits.append(q)
        if name == "CX" and qubits[0] == qubits[1]:
            raise ParseError("CX control and target are identical", line_no, acols[1])
        gates.append(Gate(name, tuple(qubits), theta, line_no))
    return GateCircuit(n, tuple(gates))


def _parse_pauli(tok: str, n: int, line_no: int, col: int) -> PauliString:
    try:
        p = PauliString.from_str(tok)
    except ValueError as exc:
        raise ParseError(str(exc), line_no, col) from None
    if p.n != n:
        raise ParseError(f"Pauli word has length {p.n}, expected {n}", line_no, col)
    if not p.is_hermitian:
        raise ParseError("Pauli word sign must be + or -", line_no, col)
    return p


def parse_rotation_list(text: str) -> PbcCircuit:
    """Parse a rotation list; identical ROT lines are merged by summing weights.

    Merged rotations keep the position of their first occurrence.
    """
    stmts = _statements(text)
    n, _ = _header(stmts)
    merged: dict[tuple, PauliRotation] = {}
    measurements = []
    for line_no, toks, cols in stmts:
        kw = toks[0].upper()
        if kw == "MEAS":
            if len(toks) != 2:
                raise ParseError("MEAS takes exactly one Pauli word", line_no, cols[0])
            measurements.append(_parse_pauli(toks[1], n, line_no, cols[1]))
            continue
        if kw != "ROT":
            raise ParseError(f"unknown statement {toks[0]!r}", line_no, cols[0])
        if len(toks) not in (3, 4):
            raise ParseError("expected 'ROT <pi8|rz:theta> <pauli> [weight]'", line_no, cols[0])
        kind, theta = toks[1].lower(), None
        if kind.startswith("rz:"):
            theta = _parse_float(toks[1][3:], line_no, cols[1] + 3)
            kind = RZ
        elif kind != T_GATE:
            raise ParseError(f"unknown rotation angle {toks[1]!r}", line_no, cols[1])
        pauli = _parse_pauli(toks[2], n, line_no, cols[2])
        weight = 1
        if len(toks) == 4:
            try:
                weight = int(toks[3])
            except ValueError:
                raise ParseError(f"bad weight {toks[3]!r}", line_no, cols[3]) from None
            if weight < 1:
                raise ParseError("weight must be >= 1", line_no, cols[3])
        trivial = pauli.is_identity()
        key = (kind, theta, pauli)
        if key in merged:
            prev = merged[key]
            merged[key] = PauliRotation(pauli, kind, theta, prev.weight + weight, trivial)
        else:
            merged[key] = PauliRotation(pauli, kind, theta, weight, trivial)
    return PbcCircuit(n, tuple(merged.values()), tuple(measurements))


def format_rotation_list(circuit: PbcCircuit) -> str:
    """Serialize a PBC circuit; inverse of :func:`parse_rotation_list`."""
    lines = [f"QUBITS {circuit.n_qubits}"]
    for r in circuit.rotations:
        kind = f"rz:{r.theta!r}" if r.angle == RZ else r.angle
        word = ("-" if r.pauli.phase == 2 else "") + r.pauli.letters
        lines.append(f"ROT {kind} {word}" + (f" {r.weight}" if r.weight != 1 else ""))
    for m in circuit.measurements:
        lines.append(f"MEAS {'-' if m.phase == 2 else ''}{m.letters}")
    return "\n".join(lines) + "\n"


def format_gate_circuit(circuit: GateCircuit) -> str:
    lines = [f"QUBITS {circuit.n_qubits}"]
    for g in circuit.gates:
        args = ([repr(g.theta)] if g.theta is not None else []) + [str(q) for q in g.qubits]
        lines.append(" ".join([g.name] + args))
    return "\n".join(lines) + "\n"


def report_record(report) -> dict:
    """Flat, JSON-ready mapping of an :class:`~qldpc_map.cost.ErrorReport`."""
    return report.to_dict()


def emit_report(report, format: str = "json") -> str:
    """Render a report as JSON (sorted keys) or as a two-line CSV."""
    record = report_record(report)
    if format == "json":
        return json.dumps(record, sort_keys=True, indent=2) + "\n"
    if format == "csv":
        flat = _flatten(record)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        keys = sorted(flat)
        writer.writerow(keys)
        writer.writerow([_csv_value(flat[k]) for k in keys])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def emit_reports(reports, format: str = "json") -> str:
    records = [report_record(r) for r in reports]
    if format == "json":
        return json.dumps(records, sort_keys=True, indent=2) + "\n"
    if format == "csv":
        flats = [_flatten(r) for r in records]
        keys = sorted(set().union(*flats)) if flats else []
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(keys)
        for f in flats:
            writer.writerow([_csv_value(f.get(k)) for k in keys])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")


def _flatten(record: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in record.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        else:
            out[key] = v
    return out


def _csv_value(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return json.dumps(list(v))
    return v


def parse_report_csv(text: str) -> list[dict]:
    """Read back :func:`emit_report` CSV output into flat string-keyed rows."""
    return list(csv.DictReader(io.StringIO(text)))
