"""Gate circuit to Pauli-based computation translation.

Every Clifford gate is written as pi/4 Pauli rotations and absorbed into a
Clifford frame that is pushed to the end of the circuit; each non-Clifford
gate becomes a Pauli rotation whose axis is the frame's Heisenberg image of
the gate's Z axis.  With ``U = G_m ... G_1`` the result satisfies
``U = C * R_k ... R_1`` up to global phase, where ``C`` is the final frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .circuit_io import GateCircuit
from .pauli import (
    CLIFFORD, RZ, T_GATE, PauliRotation, PauliString, PbcCircuit, commutes, conjugate_rotation,
    multiply,
)

# Clifford gates as products of pi/4 rotations, listed in application order.
# Entries are (letters by qubit slot, sign).
_CLIFFORD_RECIPES = {
    "S": [({0: "Z"}, +1)],
    "SDG": [({0: "Z"}, -1)],
    "H": [({0: "Z"}, +1), ({0: "X"}, +1), ({0: "Z"}, +1)],
    "CX": [({0: "Z", 1: "X"}, +1), ({0: "Z"}, -1), ({1: "X"}, -1)],
}
NON_CLIFFORD = {"T", "TDG", "RZ"}

DEFAULT_T_TABLE = {1e-4: 40}


@dataclass
class CliffordFrame:
    """Tracks ``Q -> C^dagger Q C`` for the accumulated Clifford ``C``.

    ``images[2q]`` and ``images[2q + 1]`` hold the images of ``X_q`` and
    ``Z_q``.  ``history`` keeps the pi/4 rotations in application order.
    """

    n: int
    images: list[PauliString] = field(default_factory=list)
    history: list[PauliRotation] = field(default_factory=list)

    def __post_init__(self):
        if not self.images:
            for q in range(self.n):
                self.images.append(PauliString.single(self.n, q, "X"))
                self.images.append(PauliString.single(self.n, q, "Z"))

    def apply(self, p: PauliString) -> PauliString:
        """Heisenberg image ``C^dagger p C``."""
        out = PauliString(self.n, phase=p.phase)
        for q in sorted(p.support):
            letter = p.letter(q)
            if letter == "X":
                out = multiply(out, self.images[2 * q])
            elif letter == "Z":
                out = multiply(out, self.images[2 * q + 1])
            else:  # Y = i X Z
                xz = multiply(self.images[2 * q], self.images[2 * q + 1])
                out = multiply(out, multiply(PauliString(self.n, phase=1), xz))
        return out

    def push(self, rotation: PauliRotation) -> None:
        """Append a pi/4 rotation to the frame (it acts after the current one)."""
        if rotation.angle != CLIFFORD:
            raise ValueError("only pi/4 rotations can join the Clifford frame")
        axis = rotation.pauli
        mapped_axis = self.apply(axis)
        i_axis = multiply(PauliString(self.n, phase=1), mapped_axis)
        for idx in range(2 * self.n):
            q, is_z = divmod(idx, 2)
            gen = PauliString.single(self.n, q, "Z" if is_z else "X")
            if not commutes(axis, gen):
                self.images[idx] = multiply(i_axis, self.images[idx])
        self.history.append(rotation)


@dataclass(frozen=True)
class Translation:
    circuit: PbcCircuit
    frame: CliffordFrame


def _clifford_rotations(n: int, name: str, qubits: tuple[int, ...]):
    for letters, sign in _CLIFFORD_RECIPES[name]:
        p = PauliString.from_letters(n, {qubits[slot]: ch for slot, ch in letters.items()})
        yield PauliRotation(p if sign > 0 else -p, CLIFFORD)


def translate(circuit: GateCircuit) -> Translation:
    """Translate and also return the final Clifford frame."""
    n = circuit.n_qubits
    frame = CliffordFrame(n)
    rotations: list[PauliRotation] = []
    measurements: list[PauliString] = []
    measured: set[int] = set()
    for g in circuit.gates:
        if measured.intersection(g.qubits):
            raise ValueError(f"gate {g.name} acts on an already measured qubit (line {g.line})")
        if g.name in _CLIFFORD_RECIPES:
            for rot in _clifford_rotations(n, g.name, g.qubits):
                frame.push(rot)
        elif g.name in NON_CLIFFORD:
            axis = frame.apply(PauliString.single(n, g.qubits[0], "Z"))
            if g.name == "T":
                rotations.append(PauliRotation(axis, T_GATE))
            elif g.name == "TDG":
                rotations.append(PauliRotation(-axis, T_GATE))
            else:
                rotations.append(PauliRotation(axis, RZ, float(g.theta)))
        elif g.name == "MEASZ":
            measurements.append(frame.apply(PauliString.single(n, g.qubits[0], "Z")))
            measured.add(g.qubits[0])
        else:
            raise ValueError(f"unsupported gate {g.name}")
    return Translation(PbcCircuit(n, tuple(rotations), tuple(measurements)), frame)


def to_pbc(circuit: GateCircuit) -> PbcCircuit:
    """Commute every Clifford to the end; keep the non-Clifford rotation layer."""
    return translate(circuit).circuit


def rz_t_count(precision: float, table: dict[float, int] | None = None) -> int:
    """T gates needed to synthesize one Rz rotation to the given precision.

    Exact table hits are returned as-is.  Other precisions scale the nearest
    entry (in log space) by ``log(1/precision) / log(1/reference)``; with the
    default table this is ``ceil(10 * log10(1/precision))``, about
    ``3 * log2(1/precision)``.
    """
    if not 0 < precision < 1:
        raise ValueError("precision must lie in (0, 1)")
    table = DEFAULT_T_TABLE if table is None else table
    if not table:
        raise ValueError("T-count table is empty")
    for eps, count in table.items():
        if math.isclose(eps, precision, rel_tol=1e-12):
            return int(count)
    ref = min(table, key=lambda e: (abs(math.log10(e) - math.log10(precision)), e))
    scaled = table[ref] * math.log10(precision) / math.log10(ref)
    return max(1, math.ceil(round(scaled, 9)))
