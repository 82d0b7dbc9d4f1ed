"""
Policy comparison and a factory sweep
=====================================

Run the full pipeline over several seeds and policies, then add factories
along the line and watch the routing cost fall.
"""

from qldpc_map import PipelineConfig, run_pipeline, run_sensitivity

cfg = PipelineConfig(
    generator={"kind": "clustered", "n": 44, "groups": 4, "seed": 3},
    policies=["hypergraph+priority", "chain+greedy", "freqmax+greedy", "random+identity"],
    seeds=5,
)
summary = run_pipeline(cfg).summary["policies"]
for policy, stats in summary.items():
    gain = stats["improvement_vs_baseline"]["P_non_fixed"]
    print(f"{policy:22s} C_routing {stats['C_routing']['mean']:7.1f}  non-fixed gain {gain:6.1%}")

# more factories never make a route longer
for point in run_sensitivity(cfg.replace(policies=["hypergraph+priority"]), "factory_density", [25, 50, 100]):
    stats = point["summary"]["policies"]["hypergraph+priority"]
    print(point["topology"], stats["C_routing"]["mean"])
