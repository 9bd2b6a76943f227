"""Node classification, inference graphs, and executable inference plans.

The machinery shared by every solver:

* classification of each node as ambiguous (its coverage cannot be deduced
  from the rest), forward-inferable (coverage equals the disjunction over the
  successors only reachable through it), or backward-inferable (dual, over
  predecessors that must continue through it);
* the forward/backward inference graphs F and D built from those facts;
* the strongly connected components of F union D, which are always chains of
  antiparallel edge pairs and are the unit the solvers resolve;
* inference plans: topologically ordered OR-steps evaluated against a probe
  assignment.

Self-loops carry no coverage information for the node itself and are excluded
from all neighbour sets; parallel edges collapse for node-level analysis.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from mincov import kernels
from mincov.cfg import Cfg, EdgeId, NodeId, _csr
from mincov.domtree import ReachabilityOracle
from mincov.errors import (CyclicInferenceError, DomainMismatchError,
                           InternalConsistencyError)

KIND_INSTRUMENTED = "instrumented"
KIND_FORWARD = "forward"
KIND_BACKWARD = "backward"
KIND_INCIDENT = "incident-disjunction"
KIND_CHAIN = "chain-equal"

_KIND_CODE = {
    KIND_INSTRUMENTED: 0,
    KIND_FORWARD: 1,
    KIND_BACKWARD: 2,
    KIND_INCIDENT: 3,
    KIND_CHAIN: 4,
}
_KIND_NAME = {code: name for name, code in _KIND_CODE.items()}

NODE = "node"
EDGE = "edge"
Ref = tuple[str, int]


def node_ref(v: NodeId) -> Ref:
    return (NODE, int(v))


def edge_ref(e: EdgeId) -> Ref:
    return (EDGE, int(e))


# -- per-node classification ---------------------------------------------------

@dataclass(frozen=True)
class NodeClass:
    """Classification of one node.

    `bypass_in` / `bypass_out` are the in-/out-neighbours that lie on some
    entry-to-exit walk avoiding the node; the node is ambiguous exactly when
    both are non-empty, and ambiguity excludes both inferability directions.
    """

    ambiguous: bool
    forward_inferable: bool
    backward_inferable: bool
    bypass_in: frozenset[NodeId]
    bypass_out: frozenset[NodeId]


def classify(cfg: Cfg, oracle: ReachabilityOracle, u: NodeId) -> NodeClass:
    preds = cfg.predecessors(u) - {u}
    succs = cfg.successors(u) - {u}
    bypass_in = frozenset(x for x in preds if oracle.bypasses(u, x))
    bypass_out = frozenset(y for y in succs if oracle.bypasses(u, y))
    captive_out = any(oracle.dominates(u, y) for y in succs)
    captive_in = any(oracle.postdominates(u, x) for x in preds)
    # One-step forward inference reads the successor after the node's last
    # visit on a walk, which the exit does not have; dually the entry has no
    # predecessor before its first visit.  (Reachable in-edges of the entry
    # only occur in subdivisions of entry self-loops.)
    return NodeClass(
        ambiguous=bool(bypass_in) and bool(bypass_out),
        forward_inferable=captive_out and not bypass_out and u != cfg.exit,
        backward_inferable=captive_in and not bypass_in and u != cfg.entry,
        bypass_in=bypass_in,
        bypass_out=bypass_out,
    )


# -- inference graphs -----------------------------------------------------------

class InferenceGraphs:
    """Forward (F) and backward (D) inference edges plus per-node flags.

    An edge (u, v) in F means the coverage of u is the OR of coverage over
    all its F-targets, v among them; D is the dual over predecessors.  Both
    graphs are acyclic, and every cycle of their union is a 2-cycle made of
    an F edge and the reversed D edge.
    """

    def __init__(self, n, ambiguous, forward_inferable, backward_inferable,
                 f_src, f_dst, d_src, d_dst):
        self.n = n
        self.ambiguous = ambiguous
        self.forward_inferable = forward_inferable
        self.backward_inferable = backward_inferable
        self.f_src = f_src
        self.f_dst = f_dst
        self.d_src = d_src
        self.d_dst = d_dst

    @cached_property
    def f_csr(self):
        return _csr(self.n, self.f_src, self.f_dst)

    @cached_property
    def d_csr(self):
        return _csr(self.n, self.d_src, self.d_dst)

    def forward_targets(self, u: NodeId) -> tuple[NodeId, ...]:
        indptr, cols = self.f_csr
        return tuple(cols[indptr[u]:indptr[u + 1]].tolist())

    def backward_targets(self, u: NodeId) -> tuple[NodeId, ...]:
        indptr, cols = self.d_csr
        return tuple(cols[indptr[u]:indptr[u + 1]].tolist())

    def forward_edge_set(self) -> frozenset[tuple[NodeId, NodeId]]:
        return frozenset(zip(self.f_src.tolist(), self.f_dst.tolist()))

    def backward_edge_set(self) -> frozenset[tuple[NodeId, NodeId]]:
        return frozenset(zip(self.d_src.tolist(), self.d_dst.tolist()))


def build_inference_graphs(cfg: Cfg, oracle: ReachabilityOracle) -> InferenceGraphs:
    """Classify all nodes and materialise F and D, vectorised over edge pairs."""
    n = cfg.node_count
    ps = cfg.pair_src
    pd = cfg.pair_dst
    ed, ld = oracle.dom.enter, oracle.dom.leave
    ep, lp = oracle.pdom.enter, oracle.pdom.leave

    dom_sd = (ed[ps] <= ed[pd]) & (ed[pd] <= ld[ps])      # source dominates target
    dom_ds = (ed[pd] <= ed[ps]) & (ed[ps] <= ld[pd])      # target dominates source
    pdom_sd = (ep[ps] <= ep[pd]) & (ep[pd] <= lp[ps])     # source postdominates target
    pdom_ds = (ep[pd] <= ep[ps]) & (ep[ps] <= lp[pd])     # target postdominates source

    out_bypass = ~dom_sd & ~pdom_sd   # target on a walk avoiding the source
    in_bypass = ~dom_ds & ~pdom_ds    # source on a walk avoiding the target
    out_captive = dom_sd              # target reachable only through the source
    in_captive = pdom_ds              # source must continue through the target

    cnt_out_bypass = np.bincount(ps[out_bypass], minlength=n)
    cnt_in_bypass = np.bincount(pd[in_bypass], minlength=n)
    cnt_out_captive = np.bincount(ps[out_captive], minlength=n)
    cnt_in_captive = np.bincount(pd[in_captive], minlength=n)

    forward = (cnt_out_captive > 0) & (cnt_out_bypass == 0)
    backward = (cnt_in_captive > 0) & (cnt_in_bypass == 0)
    # The exit has no successor after its last visit, the entry no
    # predecessor before its first (matters for subdivided self-loops).
    forward[cfg.exit] = False
    backward[cfg.entry] = False
    ambiguous = (cnt_out_bypass > 0) & (cnt_in_bypass > 0)

    f_mask = forward[ps] & out_captive
    f_src, f_dst = ps[f_mask], pd[f_mask]          # already (src, dst)-sorted
    d_mask = backward[pd] & in_captive
    d_src, d_dst = pd[d_mask], ps[d_mask]
    order = np.lexsort((d_dst, d_src))
    d_src, d_dst = d_src[order], d_dst[order]

    return InferenceGraphs(n, ambiguous, forward, backward,
                           f_src, f_dst, d_src, d_dst)


# -- antiparallel components -----------------------------------------------------

@dataclass(frozen=True)
class ComponentPath:
    """One strongly connected component of F union D, oriented by F.

    Consecutive nodes form an F edge left-to-right and a D edge right-to-left;
    trivial components hold a single node.
    """

    nodes: tuple[NodeId, ...]


def _path_components(graphs: InferenceGraphs):
    """Non-trivial component paths plus the membership mask.

    Raises InternalConsistencyError when the components are not chains of
    antiparallel pairs: that would falsify the structural guarantees every
    solver relies on and must never happen.
    """
    n = graphs.n
    nn = np.int64(n)
    f_key = graphs.f_src * nn + graphs.f_dst
    d_key_rev = graphs.d_dst * nn + graphs.d_src
    pair_keys = np.intersect1d(f_key, d_key_rev)
    u = (pair_keys // nn).astype(np.int64)
    v = (pair_keys % nn).astype(np.int64)

    if u.size:
        if np.bincount(u, minlength=n).max() > 1 or np.bincount(v, minlength=n).max() > 1:
            raise InternalConsistencyError(
                "antiparallel pairs branch instead of forming paths",
                payload=(u.tolist(), v.tolist()))
    nxt = np.full(n, -1, dtype=np.int64)
    prv = np.full(n, -1, dtype=np.int64)
    nxt[u] = v
    prv[v] = u
    in_pair = np.zeros(n, dtype=bool)
    in_pair[u] = True
    in_pair[v] = True

    paths = []
    seen = 0
    heads = np.flatnonzero(in_pair & (prv == -1))
    for h in heads.tolist():
        seq = [h]
        w = int(nxt[h])
        while w != -1:
            seq.append(w)
            w = int(nxt[w])
        seen += len(seq)
        paths.append(tuple(seq))
    if seen != int(in_pair.sum()):
        raise InternalConsistencyError(
            "antiparallel pairs form a cycle", payload=(u.tolist(), v.tolist()))

    # No F or D edge may join two component nodes other than the path pairs.
    comp_id = np.arange(n, dtype=np.int64)
    pos = np.zeros(n, dtype=np.int64)
    for path in paths:
        arr = np.asarray(path, dtype=np.int64)
        comp_id[arr] = arr[0]
        pos[arr] = np.arange(len(path), dtype=np.int64)
    bad_f = (comp_id[graphs.f_src] == comp_id[graphs.f_dst]) \
        & (pos[graphs.f_dst] != pos[graphs.f_src] + 1)
    bad_d = (comp_id[graphs.d_src] == comp_id[graphs.d_dst]) \
        & (pos[graphs.d_dst] != pos[graphs.d_src] - 1)
    if bad_f.any() or bad_d.any():
        raise InternalConsistencyError(
            "stray inference edge inside a component",
            payload={"f": list(zip(graphs.f_src[bad_f].tolist(),
                                   graphs.f_dst[bad_f].tolist())),
                     "d": list(zip(graphs.d_src[bad_d].tolist(),
                                   graphs.d_dst[bad_d].tolist()))})
    return paths, in_pair


def antiparallel_components(graphs: InferenceGraphs) -> list[ComponentPath]:
    """All strongly connected components of F union D as oriented paths."""
    paths, in_pair = _path_components(graphs)
    comps = [ComponentPath(p) for p in paths]
    comps.extend(ComponentPath((int(v),))
                 for v in np.flatnonzero(~in_pair).tolist())
    comps.sort(key=lambda c: c.nodes[0])
    return comps


# -- schemes and plans -----------------------------------------------------------

@dataclass(frozen=True)
class InferenceScheme:
    """Partition of the nodes into probed / forward-inferred / backward-inferred."""

    instrumented: frozenset[NodeId]
    forward: frozenset[NodeId]
    backward: frozenset[NodeId]


class PlanStep(NamedTuple):
    target: Ref
    kind: str
    sources: tuple[Ref, ...]


class InferencePlan:
    """Ordered inference steps; every step's sources are earlier steps.

    Stored column-wise (targets, kind codes, CSR of source step indexes) so
    plans over hundreds of thousands of nodes stay cheap to build and run.
    """

    def __init__(self, target_kind, target_id, kinds, src_indptr, src_step):
        self._tkind = target_kind   # uint8: 0 node, 1 edge
        self._tid = target_id       # int64
        self._kinds = kinds         # uint8 codes into _KIND_NAME
        self._sptr = src_indptr     # int64, len == steps + 1
        self._sstep = src_step      # int64 indexes into earlier steps

    def __len__(self) -> int:
        return len(self._tid)

    def _ref(self, i: int) -> Ref:
        return (NODE if self._tkind[i] == 0 else EDGE, int(self._tid[i]))

    def step(self, i: int) -> PlanStep:
        sources = tuple(self._ref(int(s))
                        for s in self._sstep[self._sptr[i]:self._sptr[i + 1]])
        return PlanStep(self._ref(i), _KIND_NAME[int(self._kinds[i])], sources)

    def __iter__(self):
        return (self.step(i) for i in range(len(self)))

    @cached_property
    def instrumented_ids(self) -> tuple[int, ...]:
        return tuple(self._tid[self._kinds == 0].tolist())

    @cached_property
    def instrumented_refs(self) -> tuple[Ref, ...]:
        return tuple(self._ref(i) for i in np.flatnonzero(self._kinds == 0).tolist())

    def evaluate(self, probe_values: Mapping[int, bool]) -> "InferenceResult":
        """Run the plan.  `probe_values` must cover exactly the probed ids."""
        instrumented = self.instrumented_ids
        want = set(instrumented)
        got = set(probe_values)
        if want != got:
            raise DomainMismatchError(missing=sorted(want - got),
                                      extra=sorted(got - want))
        probes = np.zeros(len(self), dtype=np.uint8)
        positions = np.flatnonzero(self._kinds == 0)
        for pos, pid in zip(positions.tolist(), instrumented):
            probes[pos] = 1 if probe_values[pid] else 0
        vals = kernels.eval_steps(self._kinds, probes, self._sptr, self._sstep)
        nodes = {}
        edges = {}
        tkind = self._tkind.tolist()
        tid = self._tid.tolist()
        vlist = vals.tolist()
        for i in range(len(self)):
            (nodes if tkind[i] == 0 else edges)[tid[i]] = bool(vlist[i])
        return InferenceResult(nodes=nodes, edges=edges)


@dataclass(frozen=True)
class InferenceResult:
    """Total coverage profiles produced by a plan run."""

    nodes: dict[NodeId, bool]
    edges: dict[EdgeId, bool]


def plan_from_steps(steps: Iterable[tuple[Ref, str, Iterable[Ref]]]) -> InferencePlan:
    """Build a plan from (target, kind, sources) triples in evaluation order."""
    steps = list(steps)
    count = len(steps)
    tkind = np.zeros(count, dtype=np.uint8)
    tid = np.zeros(count, dtype=np.int64)
    kinds = np.zeros(count, dtype=np.uint8)
    sptr = np.zeros(count + 1, dtype=np.int64)
    flat: list[int] = []
    index: dict[Ref, int] = {}
    for i, (target, kind, sources) in enumerate(steps):
        if target in index:
            raise ValueError(f"duplicate plan target {target}")
        index[target] = i
        tkind[i] = 0 if target[0] == NODE else 1
        tid[i] = target[1]
        kinds[i] = _KIND_CODE[kind]
        for ref in sources:
            j = index.get(ref)
            if j is None:
                raise ValueError(f"step {target} uses unresolved source {ref}")
            flat.append(j)
        sptr[i + 1] = len(flat)
    return InferencePlan(tkind, tid, kinds, sptr, np.asarray(flat, dtype=np.int64))


def _gather_rows(indptr: np.ndarray, values: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate CSR rows in the given row order (vectorised)."""
    cnt = indptr[rows + 1] - indptr[rows]
    total = int(cnt.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    offs = np.repeat(indptr[rows], cnt)
    base = np.repeat(np.cumsum(cnt) - cnt, cnt)
    return values[offs + np.arange(total, dtype=np.int64) - base]


def assemble_plan(cfg: Cfg, graphs: InferenceGraphs,
                  scheme: InferenceScheme) -> InferencePlan:
    """Order the scheme's inference dependencies into an executable plan.

    Forward-inferred nodes draw from all their F-targets, backward-inferred
    nodes from all their D-targets.  Raises CyclicInferenceError when the
    dependencies admit no order (the scheme is invalid).
    """
    n = cfg.node_count
    alpha = np.zeros(n, dtype=bool)
    phi = np.zeros(n, dtype=bool)
    beta = np.zeros(n, dtype=bool)
    alpha[list(scheme.instrumented)] = True
    phi[list(scheme.forward)] = True
    beta[list(scheme.backward)] = True
    if int(alpha.sum() + phi.sum() + beta.sum()) != n or (alpha & phi).any() \
            or (alpha & beta).any() or (phi & beta).any():
        raise ValueError("scheme is not a partition of the nodes")
    if not np.all(graphs.forward_inferable[phi]):
        raise ValueError("forward part contains a non-forward-inferable node")
    if not np.all(graphs.backward_inferable[beta]):
        raise ValueError("backward part contains a non-backward-inferable node")
    return _assemble_plan_masks(graphs, alpha, phi, beta)


def _assemble_plan_masks(graphs: InferenceGraphs, alpha, phi, beta) -> InferencePlan:
    # Mask-level core, shared with the solvers: no large Python containers.
    n = graphs.n
    sel_f = phi[graphs.f_src]
    sel_d = beta[graphs.d_src]
    h_src = np.concatenate([graphs.f_src[sel_f], graphs.d_src[sel_d]])
    h_dst = np.concatenate([graphs.f_dst[sel_f], graphs.d_dst[sel_d]])

    dep_count = np.bincount(h_src, minlength=n).astype(np.int64)
    dep_indptr, dependents = _csr(n, h_dst, h_src)
    order = kernels.toposort(dep_indptr, dependents, dep_count)
    if len(order) != n:
        raise CyclicInferenceError(
            "inference dependencies are cyclic; the scheme is invalid")

    # Per-node source rows (phi nodes use F, beta nodes use D), then reorder
    # to plan order and translate node ids to step indexes.
    src_order = np.lexsort((h_dst, h_src))
    node_indptr, node_vals = _csr(n, h_src[src_order], h_dst[src_order])
    per_step = dep_count[order]
    sptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(per_step, out=sptr[1:])
    gathered = _gather_rows(node_indptr, node_vals, order)
    positions = np.empty(n, dtype=np.int64)
    positions[order] = np.arange(n, dtype=np.int64)
    src_step = positions[gathered]

    kinds = np.where(alpha[order], 0, np.where(phi[order], 1, 2)).astype(np.uint8)
    return InferencePlan(np.zeros(n, dtype=np.uint8), order.astype(np.int64),
                         kinds, sptr, src_step)


def infer(plan: InferencePlan, partial: Mapping[int, bool]) -> InferenceResult:
    """Evaluate a plan against a partial profile over its probed elements."""
    return plan.evaluate(partial)


@dataclass(frozen=True)
class InstrumentationScheme:
    """A probe set plus the plan that reconstructs the full profile.

    `probes` are node ids in vv mode and edge ids in ee/ve mode; `stats`
    carries instance counts and solver-specific counters.
    """

    mode: str
    probes: tuple[int, ...]
    plan: InferencePlan
    stats: dict

    @property
    def probe_count(self) -> int:
        return len(self.probes)
