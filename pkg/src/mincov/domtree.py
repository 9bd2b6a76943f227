"""Dominator and post-dominator trees with constant-time ancestor queries.

Dominators are computed with the iterative reverse-postorder fixpoint of
Cooper, Harvey & Kennedy ("A Simple, Fast Dominance Algorithm"); each tree is
then numbered with a depth-first interval labelling so an ancestor test is
two integer comparisons.  Self-loops and parallel edges never affect
dominance and are dropped before the computation.

The oracle built here answers the two questions all the solvers reduce to:
can v still be reached from the entry when u is removed, and can v still
reach the exit when u is removed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from mincov import kernels
from mincov.cfg import Cfg, NodeId, _csr


@dataclass(frozen=True)
class DominatorTree:
    """Rooted out-branching of the dominance relation.

    `parent[v]` is the immediate dominator (-1 at the root); `enter`/`leave`
    are preorder subtree intervals: x dominates y (inclusively) iff
    enter[x] <= enter[y] <= leave[x].
    """

    root: NodeId
    parent: np.ndarray
    enter: np.ndarray
    leave: np.ndarray

    def is_ancestor(self, x: NodeId, y: NodeId) -> bool:
        ex = self.enter[x]
        return bool(ex >= 0 and ex <= self.enter[y] <= self.leave[x])

    def parent_of(self, v: NodeId) -> NodeId | None:
        p = int(self.parent[v])
        return None if p < 0 else p

    @cached_property
    def depths(self) -> np.ndarray:
        """Tree depth per node (root 0; unreachable nodes -1)."""
        n = len(self.parent)
        depth = np.full(n, -1, dtype=np.int64)
        order = np.argsort(self.enter, kind="stable")  # parents before children
        for v in order.tolist():
            if self.enter[v] < 0:
                continue
            p = self.parent[v]
            depth[v] = 0 if p < 0 else depth[p] + 1
        return depth


def _build_tree(n: int, succ_indptr, succ, pred_indptr, pred, root: int) -> DominatorTree:
    idom = kernels.dominators(succ_indptr, succ, pred_indptr, pred, root)
    parent = idom.copy()
    parent[root] = -1
    kids = np.flatnonzero(parent >= 0).astype(np.int64)
    child_indptr, children = _csr(n, parent[kids], kids)
    enter, leave = kernels.tree_intervals(child_indptr, children, root)
    parent.flags.writeable = False
    enter.flags.writeable = False
    leave.flags.writeable = False
    return DominatorTree(root, parent, enter, leave)


@dataclass(frozen=True)
class ReachabilityOracle:
    """Dominator tree plus post-dominator tree over one graph.

    Immutable after construction; queries are read-only and may be issued
    concurrently from any number of threads.
    """

    dom: DominatorTree
    pdom: DominatorTree

    def dominates(self, u: NodeId, v: NodeId) -> bool:
        """Every entry-to-v path passes u (u dominates itself)."""
        return self.dom.is_ancestor(u, v)

    def postdominates(self, u: NodeId, v: NodeId) -> bool:
        """Every v-to-exit path passes u."""
        return self.pdom.is_ancestor(u, v)

    def bypasses(self, u: NodeId, v: NodeId) -> bool:
        """Some entry-to-exit walk visits v while avoiding u entirely."""
        return not self.dominates(u, v) and not self.postdominates(u, v)


def build_oracle(cfg: Cfg) -> ReachabilityOracle:
    """Build both trees.  The graph should validate ok (spanning guarantees)."""
    out_indptr, out_targets = cfg.pair_out_csr
    in_indptr, in_targets = cfg.pair_in_csr
    n = cfg.node_count
    dom = _build_tree(n, out_indptr, out_targets, in_indptr, in_targets, cfg.entry)
    pdom = _build_tree(n, in_indptr, in_targets, out_indptr, out_targets, cfg.exit)
    return ReachabilityOracle(dom, pdom)


# -- plain-search references (test oracles, O(|E|) per query) -----------------

def reachable_avoiding(cfg: Cfg, u: NodeId) -> frozenset[NodeId]:
    """Nodes reachable from the entry when u is deleted (u itself excluded)."""
    if u == cfg.entry:
        return frozenset()
    seen = {cfg.entry}
    stack = [cfg.entry]
    while stack:
        v = stack.pop()
        for w in cfg.successors(v):
            if w != u and w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)


def reaching_exit_avoiding(cfg: Cfg, u: NodeId) -> frozenset[NodeId]:
    """Nodes that can still reach the exit when u is deleted."""
    if u == cfg.exit:
        return frozenset()
    seen = {cfg.exit}
    stack = [cfg.exit]
    while stack:
        v = stack.pop()
        for w in cfg.predecessors(v):
            if w != u and w not in seen:
                seen.add(w)
                stack.append(w)
    return frozenset(seen)
