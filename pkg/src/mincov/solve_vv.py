"""Minimum-size node instrumentation for node coverage.

Every ambiguous node must be probed; what remains is to resolve each
antiparallel component so the combined inference graph stays acyclic:

* trivial component: infer forward if possible, else backward (ambiguous
  nodes are already probed);
* path component whose head is backward-inferable from outside: infer the
  whole chain backward;
* else, tail forward-inferable from outside: infer the chain forward;
* else: probe the head and infer the rest backward from it.

The probe set this produces is of minimum size.
"""

from __future__ import annotations

import numpy as np

from mincov.cfg import Cfg, validate
from mincov.domtree import build_oracle
from mincov.errors import InternalConsistencyError, InvalidCfgError
from mincov.inference import (InferenceGraphs, InferenceScheme,
                              InstrumentationScheme, _assemble_plan_masks,
                              _path_components, build_inference_graphs)


def _partition_masks(graphs: InferenceGraphs, paths, in_pair, forbid=None):
    """Resolve all components into (probed, forward, backward) node masks.

    `forbid` marks nodes that must not be probed; when the head of a path
    component is forbidden its path neighbour is probed instead (the
    edge-coverage reduction relies on this, and on the fact that a forbidden
    node is always inferable so trivial components never probe one).
    """
    trivial = ~in_pair
    alpha = graphs.ambiguous & trivial
    phi = trivial & ~graphs.ambiguous & graphs.forward_inferable
    beta = trivial & ~graphs.ambiguous & ~phi & graphs.backward_inferable
    rest = trivial & ~(alpha | phi | beta)
    if rest.any():
        # A node that is neither ambiguous nor inferable in either direction
        # cannot exist on a graph that validates; probing keeps us safe if a
        # caller bypassed validation.
        if forbid is not None and (rest & forbid).any():
            raise InternalConsistencyError(
                "un-inferable node that must not be instrumented",
                payload=np.flatnonzero(rest & forbid).tolist())
        alpha = alpha | rest
    else:
        alpha = alpha.copy()
    phi = phi.copy()
    beta = beta.copy()

    for nodes in paths:
        head, tail = nodes[0], nodes[-1]
        if graphs.backward_inferable[head]:
            for v in nodes:
                beta[v] = True
        elif graphs.forward_inferable[tail]:
            for v in nodes:
                phi[v] = True
        elif forbid is not None and forbid[head]:
            probe = nodes[1]
            if forbid[probe]:
                raise InternalConsistencyError(
                    "component path does not alternate", payload=nodes)
            alpha[probe] = True
            phi[head] = True
            for v in nodes[2:]:
                beta[v] = True
        else:
            alpha[head] = True
            for v in nodes[1:]:
                beta[v] = True
    return alpha, phi, beta


def build_partition(graphs: InferenceGraphs, paths, in_pair,
                    forbid=None) -> InferenceScheme:
    """`_partition_masks` packaged as a scheme value."""
    alpha, phi, beta = _partition_masks(graphs, paths, in_pair, forbid)
    return InferenceScheme(frozenset(np.flatnonzero(alpha).tolist()),
                           frozenset(np.flatnonzero(phi).tolist()),
                           frozenset(np.flatnonzero(beta).tolist()))


def optimal_vv(cfg: Cfg) -> InstrumentationScheme:
    """Minimum node probe set with its inference plan."""
    report = validate(cfg)
    if not report.ok:
        raise InvalidCfgError(report)
    oracle = build_oracle(cfg)
    graphs = build_inference_graphs(cfg, oracle)
    paths, in_pair = _path_components(graphs)
    alpha, phi, beta = _partition_masks(graphs, paths, in_pair)
    plan = _assemble_plan_masks(graphs, alpha, phi, beta)
    probes = tuple(np.flatnonzero(alpha).tolist())
    n = cfg.node_count
    stats = {
        "probe_count": len(probes),
        "node_count": n,
        "edge_count": cfg.edge_count,
        "component_count": n - int(in_pair.sum()) + len(paths),
        "path_component_count": len(paths),
        "ambiguous_count": int(graphs.ambiguous.sum()),
    }
    return InstrumentationScheme("vv", probes, plan, stats)
