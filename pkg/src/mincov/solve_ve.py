"""2-approximate edge instrumentation for node coverage.

Ambiguous nodes anchor the probe placement: any valid edge scheme must probe
all edge instances from the bypassing in-neighbours or all instances to the
bypassing out-neighbours, so we take the cheaper side and recover the node's
bit as the disjunction of those probes and of the remaining (non-bypassing)
neighbours' bits.  Path components with no external grounding get one probe
on a path edge whose tail cannot reach the exit without it, which makes the
probe equivalent to the tail node's coverage; when no such edge exists the
head's full in-edge set (or the tail's out-edge set) is probed instead.
Everything else infers forward or backward as in the node-probe solver.

The resulting dependency graph is almost always acyclic by construction; if
a cycle does appear (mutually-dependent ambiguous rules), the smallest node
on it is re-grounded on its full in-edge set, which always breaks the cycle
soundly.  All fallback activations are counted in the scheme stats.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from mincov.cfg import Cfg, validate
from mincov.domtree import build_oracle
from mincov.errors import InternalConsistencyError, InvalidCfgError
from mincov.inference import (KIND_BACKWARD, KIND_CHAIN, KIND_FORWARD,
                              KIND_INCIDENT, KIND_INSTRUMENTED,
                              InstrumentationScheme, _path_components,
                              build_inference_graphs, classify, edge_ref,
                              infer, node_ref, plan_from_steps)


@dataclass
class _Rule:
    kind: str
    edge_sources: tuple[int, ...] = ()
    node_sources: tuple[int, ...] = ()


@dataclass
class VeReport:
    """Probe attribution and fallback counters for the approximation run."""

    attributions: list = field(default_factory=list)  # (edge, reason, anchor nodes)
    chain_probes: int = 0
    chain_fallbacks: int = 0
    cycle_repairs: int = 0


def _reaches_exit_without_edge(cfg: Cfg, start: int, banned_edge: int) -> bool:
    if start == cfg.exit:
        return True
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for e in cfg.out_edge_ids(v):
            if e == banned_edge:
                continue
            w = int(cfg.edge_dst[e])
            if w == cfg.exit:
                return True
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return False


def _chain_probe_edge(cfg: Cfg, nodes) -> tuple[int, int] | None:
    """First path edge whose removal cuts its tail off from the exit.

    Probing such an edge is exact for the tail node: every walk through the
    tail must continue over this very edge.
    """
    for j in range(len(nodes) - 1):
        u, v = nodes[j], nodes[j + 1]
        candidates = [e for e in cfg.out_edge_ids(u) if int(cfg.edge_dst[e]) == v]
        for e in candidates:
            if not _reaches_exit_without_edge(cfg, u, e):
                return j, e
    return None


def _ground_edges(cfg: Cfg, u: int) -> list[int]:
    """Edge set whose disjunction equals u's coverage bit."""
    if u != cfg.entry:
        return cfg.in_edge_ids(u)
    return cfg.out_edge_ids(u)  # the entry is covered iff it is ever left


def approx_ve(cfg: Cfg, with_report: bool = False):
    """Edge probe set (at most twice the optimum) recovering node coverage."""
    vreport = validate(cfg)
    if not vreport.ok:
        raise InvalidCfgError(vreport)
    oracle = build_oracle(cfg)
    graphs = build_inference_graphs(cfg, oracle)
    paths, in_pair = _path_components(graphs)
    n = cfg.node_count
    report = VeReport()
    probes: set[int] = set()
    rules: dict[int, _Rule] = {}

    for u in np.flatnonzero(graphs.ambiguous).tolist():
        cls = classify(cfg, oracle, u)
        in_instances = [e for e in cfg.in_edge_ids(u)
                        if int(cfg.edge_src[e]) in cls.bypass_in]
        out_instances = [e for e in cfg.out_edge_ids(u)
                         if int(cfg.edge_dst[e]) in cls.bypass_out]
        if len(in_instances) <= len(out_instances):
            chosen = in_instances
            others = sorted((cfg.predecessors(u) - {u}) - cls.bypass_in)
        else:
            chosen = out_instances
            others = sorted((cfg.successors(u) - {u}) - cls.bypass_out)
        probes.update(chosen)
        report.attributions.extend((e, "ambiguous", (u,)) for e in chosen)
        rules[u] = _Rule(KIND_INCIDENT, tuple(sorted(chosen)), tuple(others))

    for nodes in paths:
        head, tail = nodes[0], nodes[-1]
        if graphs.backward_inferable[head]:
            for v in nodes:
                rules[v] = _Rule(KIND_BACKWARD, (), graphs.backward_targets(v))
        elif graphs.forward_inferable[tail]:
            for v in nodes:
                rules[v] = _Rule(KIND_FORWARD, (), graphs.forward_targets(v))
        else:
            found = _chain_probe_edge(cfg, nodes)
            if found is not None:
                j, e = found
                probes.add(e)
                report.chain_probes += 1
                report.attributions.append((e, "chain", tuple(nodes)))
                rules[nodes[j]] = _Rule(KIND_CHAIN, (e,), ())
                for i in range(j):
                    rules[nodes[i]] = _Rule(KIND_FORWARD, (),
                                            graphs.forward_targets(nodes[i]))
                for i in range(j + 1, len(nodes)):
                    rules[nodes[i]] = _Rule(KIND_BACKWARD, (),
                                            graphs.backward_targets(nodes[i]))
            else:
                report.chain_fallbacks += 1
                head_in = cfg.in_edge_ids(head) if head != cfg.entry else None
                tail_out = cfg.out_edge_ids(tail) if tail != cfg.exit else None
                if head_in is not None and (tail_out is None
                                            or len(head_in) <= len(tail_out)):
                    grounded, edges = head, head_in
                elif tail_out is not None:
                    grounded, edges = tail, tail_out
                else:
                    # head == entry and tail == exit: ground the head on its
                    # out-edges (the head of a path is never the exit).
                    grounded, edges = head, cfg.out_edge_ids(head)
                probes.update(edges)
                report.attributions.extend(
                    (e, "chain-ground", tuple(nodes)) for e in edges)
                rules[grounded] = _Rule(KIND_INCIDENT, tuple(sorted(edges)), ())
                if grounded == head:
                    for v in nodes[1:]:
                        rules[v] = _Rule(KIND_BACKWARD, (),
                                         graphs.backward_targets(v))
                else:
                    for v in nodes[:-1]:
                        rules[v] = _Rule(KIND_FORWARD, (),
                                         graphs.forward_targets(v))

    for u in np.flatnonzero(~in_pair & ~graphs.ambiguous).tolist():
        if graphs.forward_inferable[u]:
            rules[u] = _Rule(KIND_FORWARD, (), graphs.forward_targets(u))
        elif graphs.backward_inferable[u]:
            rules[u] = _Rule(KIND_BACKWARD, (), graphs.backward_targets(u))
        else:
            # Unreachable on validated graphs; ground directly if it happens.
            edges = _ground_edges(cfg, u)
            probes.update(edges)
            report.attributions.extend((e, "ground", (u,)) for e in edges)
            rules[u] = _Rule(KIND_INCIDENT, tuple(sorted(edges)), ())

    if len(rules) != n:
        raise InternalConsistencyError("not every node received a rule")

    order = _order_with_repairs(cfg, rules, probes, report)

    steps = [(edge_ref(e), KIND_INSTRUMENTED, ()) for e in sorted(probes)]
    for u in order:
        rule = rules[u]
        sources = tuple(edge_ref(e) for e in rule.edge_sources) \
            + tuple(node_ref(v) for v in rule.node_sources)
        steps.append((node_ref(u), rule.kind, sources))
    plan = plan_from_steps(steps)

    scheme = InstrumentationScheme("ve", tuple(sorted(probes)), plan, {
        "probe_count": len(probes),
        "node_count": n,
        "edge_count": cfg.edge_count,
        "component_count": n - int(in_pair.sum()) + len(paths),
        "path_component_count": len(paths),
        "ambiguous_count": int(graphs.ambiguous.sum()),
        "chain_probes": report.chain_probes,
        "chain_fallbacks": report.chain_fallbacks,
        "cycle_repairs": report.cycle_repairs,
    })
    if with_report:
        return scheme, report
    return scheme


def _order_with_repairs(cfg, rules, probes, report):
    """Topological order of the node rules; re-ground nodes to break cycles."""
    while True:
        indeg = {u: len(r.node_sources) for u, r in rules.items()}
        dependents = defaultdict(list)
        for u, r in rules.items():
            for v in r.node_sources:
                dependents[v].append(u)
        heap = [u for u, d in indeg.items() if d == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = heapq.heappop(heap)
            order.append(v)
            for w in dependents[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, w)
        if len(order) == len(rules):
            return order
        stuck = sorted(u for u, d in indeg.items() if d > 0)
        repaired = None
        for u in stuck:
            if rules[u].node_sources:
                repaired = u
                break
        if repaired is None:
            raise InternalConsistencyError("cyclic rules without node sources",
                                           payload=stuck)
        edges = _ground_edges(cfg, repaired)
        probes.update(edges)
        report.cycle_repairs += 1
        report.attributions.extend((e, "cycle-repair", (repaired,))
                                   for e in edges)
        rules[repaired] = _Rule(KIND_INCIDENT, tuple(sorted(edges)), ())


def infer_nodes_from_edges(scheme: InstrumentationScheme, partial) -> dict:
    """Total node profile from the probed edges' coverage bits."""
    return infer(scheme.plan, partial).nodes
