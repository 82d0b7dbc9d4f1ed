"""Mapping of Pauli-based-computation circuits onto modular code architectures.

The package translates gate circuits into Pauli rotation layers, clusters
logical qubits into capacity-bounded modules, places the modules on a line
or long-grid topology, and prices the result in logical instructions and
failure probability.
"""

from .benchgen import gen_all_to_all, gen_clustered, gen_random_ppr, generate
from .circuit_io import (
    Gate, GateCircuit, emit_report, format_rotation_list, parse_gate_circuit, parse_rotation_list,
)
from .cost import (
    DEFAULT_TABLE, CostTable, ErrorReport, InstructionTally, SynthesisModel, execution_time,
    program_failure, swap_vs_direct, tally,
)
from .errors import ConfigError, MapperError, ParseError
from .hypergraph import Clustering, Hypergraph, build_interaction_hypergraph, connectivity_objective, partition
from .mapping import (
    POLICIES, Assignment, assign_bruteforce, assign_greedy, assign_priorities, map_circuit,
    module_supports, priorities_to_positions,
)
from .pauli import PauliRotation, PauliString, PbcCircuit, commutes, conjugate_rotation, multiply
from .pbc import rz_t_count, to_pbc, translate
from .pipeline import PipelineConfig, run_pipeline, run_sensitivity
from .topology import GridTopology, LineTopology, grid_route, line_route, parse_topology, steiner_oracle

__version__ = "0.1.0"
