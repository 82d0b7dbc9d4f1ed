"""
From gates to Pauli rotations
=============================

Translate a small Clifford+T circuit into a list of Pauli rotations and
check the result against the dense unitary.
"""

import numpy as np

from qldpc_map import parse_gate_circuit, to_pbc, format_rotation_list

# a three qubit circuit; the Cliffords get pushed to the end
text = """
QUBITS 3
H 0
CX 0 1
T 1
CX 1 2
TDG 2
RZ 0.4 0
"""
circuit = to_pbc(parse_gate_circuit(text))
print(format_rotation_list(circuit))

# every rotation left over is a T-type or Rz-type rotation on a Pauli word
for r in circuit.rotations:
    print(r.pauli, r.angle, "support", sorted(r.support))

# rotation order is program order; the rotations need not commute
weights = np.array([r.pauli.weight for r in circuit.rotations])
print("mean rotation width:", weights.mean())
