"""
Clustering qubits and placing modules
=====================================

Group 22 logical qubits into two modules, place the modules on a line next
to a magic-state factory and count what each rotation costs.
"""

from qldpc_map import (
    LineTopology, SynthesisModel, gen_clustered, map_circuit, program_failure, tally,
)

circuit = gen_clustered(22, groups=2, intra_weight=30, inter_weight=3, seed=0)
line = LineTopology(2)

for policy in ["random+identity", "hypergraph+priority"]:
    m = map_circuit(circuit, policy, line, seed=0)
    crossing = sum(len(s) > 1 for s, _ in m.module_sets)
    counts = tally(circuit, m.clustering, m.assignment, line, SynthesisModel(seed=0))
    report = program_failure(counts, policy=policy, topology=line.descriptor)
    print(f"{policy:22s} crossing rotations {crossing:3d}  C {counts.C_routing:4d}"
          f"  B {counts.B:5d}  P_non_fixed {report.P_non_fixed:.3e}")

# the planted groups are recovered, so only the cross-group rotations straddle
