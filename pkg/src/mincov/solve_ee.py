"""Optimal edge instrumentation for edge coverage, via edge subdivision.

Subdividing every edge turns edge coverage into node coverage of the new
edge nodes, so the node-probe machinery applies.  Two structural facts make
the reduction exact and are asserted at run time: an original node is never
ambiguous in the subdivision, and every original node except the entry
(exit) is backward- (forward-) inferable there.  Consequently the partition
only ever wants to probe an original node as the head of a path component,
where the neighbouring edge node does the same job.

The emitted plan resolves all edges first (probes plus OR-steps over other
edges; intermediate original-node values are inlined, which is exact because
the subdivision is bipartite), then each node as the disjunction of its
incident edges.
"""

from __future__ import annotations

import numpy as np

from mincov.cfg import Cfg, subdivide, validate
from mincov.domtree import build_oracle
from mincov.errors import InternalConsistencyError, InvalidCfgError
from mincov.inference import (KIND_INCIDENT, KIND_INSTRUMENTED,
                              InferenceResult, InstrumentationScheme,
                              _assemble_plan_masks, _path_components,
                              build_inference_graphs, edge_ref, infer,
                              node_ref, plan_from_steps)
from mincov.solve_vv import _partition_masks


def optimal_ee(cfg: Cfg) -> InstrumentationScheme:
    """Minimum edge probe set recovering every edge's (and node's) coverage."""
    report = validate(cfg)
    if not report.ok:
        raise InvalidCfgError(report)
    n = cfg.node_count
    sub, smap = subdivide(cfg)
    oracle = build_oracle(sub)
    graphs = build_inference_graphs(sub, oracle)

    original = np.zeros(sub.node_count, dtype=bool)
    original[:n] = True
    if (graphs.ambiguous & original).any():
        raise InternalConsistencyError(
            "original node ambiguous in the subdivision",
            payload=np.flatnonzero(graphs.ambiguous & original).tolist())
    want_bwd = original.copy()
    want_bwd[cfg.entry] = False
    want_fwd = original.copy()
    want_fwd[cfg.exit] = False
    if (want_bwd & ~graphs.backward_inferable).any() \
            or (want_fwd & ~graphs.forward_inferable).any():
        raise InternalConsistencyError(
            "original node not inferable in the subdivision")

    paths, in_pair = _path_components(graphs)
    alpha, phi, beta = _partition_masks(graphs, paths, in_pair, forbid=original)
    if (alpha & original).any():
        raise InternalConsistencyError("probe fell on an original node")

    raw = _assemble_plan_masks(graphs, alpha, phi, beta)
    edge_of = {node: e for e, node in enumerate(smap.edge_nodes)}

    # Per original node, the edge list its own inference step would use;
    # inlined into the edge steps that depend on it.
    inline: dict[int, tuple[int, ...]] = {}
    steps = []
    for step in raw:
        v = step.target[1]
        if v < n:
            inline[v] = tuple(edge_of[w] for _, w in step.sources)
            continue
        if step.kind == KIND_INSTRUMENTED:
            steps.append((edge_ref(edge_of[v]), KIND_INSTRUMENTED, ()))
            continue
        sources: set[int] = set()
        for _, w in step.sources:
            sources.update(inline[w])
        steps.append((edge_ref(edge_of[v]), step.kind,
                      tuple(edge_ref(e) for e in sorted(sources))))
    for v in range(n):
        incident = sorted(set(cfg.in_edge_ids(v)) | set(cfg.out_edge_ids(v)))
        steps.append((node_ref(v), KIND_INCIDENT,
                      tuple(edge_ref(e) for e in incident)))

    plan = plan_from_steps(steps)
    probes = tuple(edge_of[v] for v in np.flatnonzero(alpha).tolist())
    stats = {
        "probe_count": len(probes),
        "node_count": n,
        "edge_count": cfg.edge_count,
        "component_count": sub.node_count - int(in_pair.sum()) + len(paths),
        "path_component_count": len(paths),
    }
    return InstrumentationScheme("ee", probes, plan, stats)


def infer_edges(scheme: InstrumentationScheme, partial) -> tuple[dict, dict]:
    """Full (edge profile, node profile) from probe values.

    `partial` maps each probed edge id to its coverage bit.
    """
    result: InferenceResult = infer(scheme.plan, partial)
    return result.edges, result.nodes
