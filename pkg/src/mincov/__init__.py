"""Minimum coverage instrumentation planning for control-flow graphs.

Given a CFG, compute the smallest probe set from which the coverage of every
other block (or jump) can be reconstructed, and carry out that inference.
"""

from mincov.cfg import (Cfg, SubdivisionMap, ValidationReport, parse_cfg,
                        serialize_cfg, subdivide, to_dot, validate)
from mincov.domtree import (DominatorTree, ReachabilityOracle, build_oracle,
                            reachable_avoiding, reaching_exit_avoiding)
from mincov.errors import (CfgParseError, CyclicInferenceError,
                           DomainMismatchError, InternalConsistencyError,
                           InvalidCfgError, MincovError, SizeGuardError)
from mincov.inference import (InferencePlan, InferenceResult, InferenceScheme,
                              InstrumentationScheme, NodeClass,
                              antiparallel_components, assemble_plan,
                              build_inference_graphs, classify, infer)
from mincov.solve_ee import infer_edges, optimal_ee
from mincov.solve_ve import approx_ve, infer_nodes_from_edges
from mincov.solve_vv import optimal_vv

__version__ = "0.1.0"

__all__ = [
    "Cfg", "SubdivisionMap", "ValidationReport", "parse_cfg", "serialize_cfg",
    "subdivide", "to_dot", "validate",
    "DominatorTree", "ReachabilityOracle", "build_oracle",
    "reachable_avoiding", "reaching_exit_avoiding",
    "MincovError", "CfgParseError", "InvalidCfgError", "SizeGuardError",
    "DomainMismatchError", "CyclicInferenceError", "InternalConsistencyError",
    "NodeClass", "InferenceScheme", "InferencePlan", "InferenceResult",
    "InstrumentationScheme", "classify", "build_inference_graphs",
    "antiparallel_components", "assemble_plan", "infer",
    "optimal_vv", "optimal_ee", "infer_edges", "approx_ve",
    "infer_nodes_from_edges",
    "__version__",
]
