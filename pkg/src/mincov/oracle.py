"""Ground truth at desk scale.

Enumerates every achievable coverage profile, decides scheme validity and
the brute-force minimum probe count, simulates traces, and searches for
vertex/edge ambiguity witnesses.  Everything here is deliberately slow and
independent of the solvers: it exists to certify them on small instances.

A node subset T is an achievable node profile iff it is empty or contains
entry and exit and every member both is reachable from the entry and reaches
the exit inside the subgraph induced by T (each such member then owns one
walk through it, and any union of walks satisfies the condition).  The edge
version is analogous over edge instances.  Tests cross-check this
characterisation against closing simple-path profiles under union.
"""

from __future__ import annotations

import itertools
import random
from collections import deque
from dataclasses import dataclass

from mincov.cfg import Cfg
from mincov.errors import SizeGuardError

MODES = ("vv", "ee", "ve")

NODE_ENUM_LIMIT = 20
EDGE_ENUM_LIMIT = 20
NODE_MIN_LIMIT = 10
EDGE_MIN_LIMIT = 10


@dataclass(frozen=True)
class Trace:
    """A collection of entry-to-exit walks, each a sequence of edge ids."""

    walks: tuple[tuple[int, ...], ...]


def walk_nodes(cfg: Cfg, walk: tuple[int, ...]) -> tuple[int, ...]:
    if not walk:
        return ()
    nodes = [int(cfg.edge_src[walk[0]])]
    nodes.extend(int(cfg.edge_dst[e]) for e in walk)
    return tuple(nodes)


def trace_vertex_profile(cfg: Cfg, trace: Trace) -> frozenset[int]:
    covered: set[int] = set()
    for walk in trace.walks:
        covered.update(walk_nodes(cfg, walk))
    return frozenset(covered)


def trace_edge_profile(trace: Trace) -> frozenset[int]:
    covered: set[int] = set()
    for walk in trace.walks:
        covered.update(walk)
    return frozenset(covered)


def _node_profile_ok(cfg: Cfg, subset: frozenset[int]) -> bool:
    if cfg.entry not in subset or cfg.exit not in subset:
        return False
    for root, step in ((cfg.entry, cfg.successors), (cfg.exit, cfg.predecessors)):
        seen = {root}
        stack = [root]
        while stack:
            v = stack.pop()
            for w in step(v):
                if w in subset and w not in seen:
                    seen.add(w)
                    stack.append(w)
        if seen != subset:
            return False
    return True


def enumerate_vertex_profiles(cfg: Cfg) -> set[frozenset[int]]:
    """All achievable node coverage profiles (exponential; guarded)."""
    n = cfg.node_count
    if n > NODE_ENUM_LIMIT:
        raise SizeGuardError(f"{n} nodes exceeds the enumeration limit {NODE_ENUM_LIMIT}")
    middles = [v for v in range(n) if v not in (cfg.entry, cfg.exit)]
    base = frozenset((cfg.entry, cfg.exit))
    profiles = {frozenset()}
    for r in range(len(middles) + 1):
        for combo in itertools.combinations(middles, r):
            subset = base | frozenset(combo)
            if _node_profile_ok(cfg, subset):
                profiles.add(subset)
    return profiles


def _edge_profile_ok(cfg: Cfg, subset: frozenset[int]) -> bool:
    by_src: dict[int, list[int]] = {}
    by_dst: dict[int, list[int]] = {}
    for e in subset:
        by_src.setdefault(int(cfg.edge_src[e]), []).append(e)
        by_dst.setdefault(int(cfg.edge_dst[e]), []).append(e)
    reach_s = {cfg.entry}
    stack = [cfg.entry]
    while stack:
        v = stack.pop()
        for e in by_src.get(v, ()):
            w = int(cfg.edge_dst[e])
            if w not in reach_s:
                reach_s.add(w)
                stack.append(w)
    reach_t = {cfg.exit}
    stack = [cfg.exit]
    while stack:
        v = stack.pop()
        for e in by_dst.get(v, ()):
            w = int(cfg.edge_src[e])
            if w not in reach_t:
                reach_t.add(w)
                stack.append(w)
    return all(int(cfg.edge_src[e]) in reach_s and int(cfg.edge_dst[e]) in reach_t
               for e in subset)


def enumerate_edge_profiles(cfg: Cfg) -> set[frozenset[int]]:
    """All achievable edge coverage profiles (edge instances, not pairs)."""
    m = cfg.edge_count
    if m > EDGE_ENUM_LIMIT:
        raise SizeGuardError(f"{m} edges exceeds the enumeration limit {EDGE_ENUM_LIMIT}")
    profiles = set()
    for r in range(m + 1):
        for combo in itertools.combinations(range(m), r):
            subset = frozenset(combo)
            if not subset or _edge_profile_ok(cfg, subset):
                profiles.add(subset)
    return profiles


def _edge_endpoints_profile(cfg: Cfg, edges: frozenset[int]) -> frozenset[int]:
    covered: set[int] = set()
    for e in edges:
        covered.add(int(cfg.edge_src[e]))
        covered.add(int(cfg.edge_dst[e]))
    return frozenset(covered)


def is_valid_scheme(cfg: Cfg, probes, mode: str) -> bool:
    """Whether restricting profiles to `probes` loses no information.

    vv/ee: the restriction must be injective over the achievable profiles.
    ve: any two edge profiles agreeing on the probed edges must induce the
    same node profile.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    probe_list = sorted(set(probes))
    if mode == "vv":
        profiles = enumerate_vertex_profiles(cfg)
        restrictions = {tuple(v in p for v in probe_list) for p in profiles}
        return len(restrictions) == len(profiles)
    profiles = enumerate_edge_profiles(cfg)
    if mode == "ee":
        restrictions = {tuple(e in p for e in probe_list) for p in profiles}
        return len(restrictions) == len(profiles)
    seen: dict[tuple, frozenset[int]] = {}
    for p in profiles:
        key = tuple(e in p for e in probe_list)
        nodes = _edge_endpoints_profile(cfg, p)
        if seen.setdefault(key, nodes) != nodes:
            return False
    return True


def min_size(cfg: Cfg, mode: str) -> int:
    """Size of the smallest valid probe set, by subset enumeration."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "vv":
        if cfg.node_count > NODE_MIN_LIMIT:
            raise SizeGuardError(
                f"{cfg.node_count} nodes exceeds the search limit {NODE_MIN_LIMIT}")
        profiles = sorted(enumerate_vertex_profiles(cfg), key=sorted)
        universe = range(cfg.node_count)
        masks = [sum(1 << v for v in p) for p in profiles]
        targets = None
    else:
        if cfg.edge_count > EDGE_MIN_LIMIT:
            raise SizeGuardError(
                f"{cfg.edge_count} edges exceeds the search limit {EDGE_MIN_LIMIT}")
        profiles = sorted(enumerate_edge_profiles(cfg), key=sorted)
        universe = range(cfg.edge_count)
        masks = [sum(1 << e for e in p) for p in profiles]
        targets = None
        if mode == "ve":
            targets = [_edge_endpoints_profile(cfg, p) for p in profiles]
    for k in range(1, len(universe) + 1):
        for combo in itertools.combinations(universe, k):
            probe_mask = 0
            for x in combo:
                probe_mask |= 1 << x
            if targets is None:
                if len({m & probe_mask for m in masks}) == len(masks):
                    return k
            else:
                seen: dict[int, frozenset[int]] = {}
                ok = True
                for m, t in zip(masks, targets):
                    if seen.setdefault(m & probe_mask, t) != t:
                        ok = False
                        break
                if ok:
                    return k
    raise AssertionError("probing everything is always valid")  # pragma: no cover


# -- trace simulation ----------------------------------------------------------

def _shortest_exit_edges(cfg: Cfg) -> dict[int, int]:
    """Per node, the smallest out-edge on a shortest path to the exit."""
    dist = {cfg.exit: 0}
    queue = deque([cfg.exit])
    while queue:
        v = queue.popleft()
        for w in cfg.predecessors(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    chosen: dict[int, int] = {}
    for v in dist:
        if v == cfg.exit:
            continue
        best = min(e for e in cfg.out_edge_ids(v)
                   if int(cfg.edge_dst[e]) in dist
                   and dist[int(cfg.edge_dst[e])] == dist[v] - 1)
        chosen[v] = best
    return chosen


def random_trace(cfg: Cfg, path_count: int, seed: int) -> Trace:
    """Deterministic random walks, completed by a shortest path when capped."""
    rng = random.Random(seed)
    to_exit = _shortest_exit_edges(cfg)
    cap = 4 * cfg.node_count
    walks = []
    for _ in range(path_count):
        edges: list[int] = []
        cur = cfg.entry
        while cur != cfg.exit and len(edges) < cap:
            e = rng.choice(cfg.out_edge_ids(cur))
            edges.append(e)
            cur = int(cfg.edge_dst[e])
        while cur != cfg.exit:
            e = to_exit[cur]
            edges.append(e)
            cur = int(cfg.edge_dst[e])
        walks.append(tuple(edges))
    return Trace(tuple(walks))


def _walk_within(cfg: Cfg, allowed: frozenset[int], start: int, goal: int) -> list[int]:
    """Shortest edge walk from start to goal using only the allowed edges."""
    if start == goal:
        return []
    parent: dict[int, tuple[int, int]] = {}
    seen = {start}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        for e in sorted(cfg.out_edge_ids(v)):
            if e not in allowed:
                continue
            w = int(cfg.edge_dst[e])
            if w in seen:
                continue
            seen.add(w)
            parent[w] = (v, e)
            if w == goal:
                path = []
                while w != start:
                    v, e = parent[w]
                    path.append(e)
                    w = v
                path.reverse()
                return path
            queue.append(w)
    raise AssertionError("edge profile is not walk-coverable")  # pragma: no cover


def trace_covering_edges(cfg: Cfg, edges: frozenset[int]) -> Trace:
    """A trace whose edge profile is exactly `edges` (one walk per edge)."""
    walks = []
    for e in sorted(edges):
        u, v = cfg.edge(e)
        walk = (_walk_within(cfg, edges, cfg.entry, u) + [e]
                + _walk_within(cfg, edges, v, cfg.exit))
        walks.append(tuple(walk))
    return Trace(tuple(walks))


def impossibility_witness(cfg: Cfg) -> tuple[Trace, Trace] | None:
    """Two traces with equal node coverage but different edge coverage."""
    profiles = sorted(enumerate_edge_profiles(cfg),
                      key=lambda p: (len(p), sorted(p)))
    by_nodes: dict[frozenset[int], frozenset[int]] = {}
    for p in profiles:
        nodes = _edge_endpoints_profile(cfg, p)
        other = by_nodes.setdefault(nodes, p)
        if other != p:
            return (trace_covering_edges(cfg, other), trace_covering_edges(cfg, p))
    return None
