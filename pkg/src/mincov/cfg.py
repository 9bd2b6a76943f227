"""Control-flow graph model, text format, validation, and edge subdivision.

Graphs are directed multigraphs with a designated entry and exit node;
self-loops and parallel edges are allowed.  Nodes and edges are dense ints.
Node ids follow first appearance in the input (and edge ids the edge order),
which keeps every downstream computation deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from mincov import kernels
from mincov.errors import CfgParseError

NodeId = int
EdgeId = int


def _csr(n: int, keys: np.ndarray, values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Group `values` by `keys` into CSR form over n rows.

    Stable: within a row, values keep their original order.
    """
    counts = np.bincount(keys, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    order = np.argsort(keys, kind="stable")
    return indptr, values[order].astype(np.int64, copy=False)


class Cfg:
    """Immutable control-flow graph.

    Values are safe to share and query from multiple threads; all derived
    adjacency structures are computed lazily from read-only arrays.
    """

    def __init__(self, labels: Iterable[str], edges: Iterable[tuple[int, int]],
                 entry: int, exit: int):
        edge_list = list(edges)
        src = np.fromiter((u for u, _ in edge_list), dtype=np.int64, count=len(edge_list))
        dst = np.fromiter((v for _, v in edge_list), dtype=np.int64, count=len(edge_list))
        self._init_arrays(tuple(labels), src, dst, entry, exit)

    @classmethod
    def from_arrays(cls, labels: Sequence[str], src: np.ndarray, dst: np.ndarray,
                    entry: int, exit: int) -> "Cfg":
        """Construct from parallel edge arrays without per-edge Python overhead."""
        self = cls.__new__(cls)
        self._init_arrays(tuple(labels),
                          np.asarray(src, dtype=np.int64).copy(),
                          np.asarray(dst, dtype=np.int64).copy(),
                          entry, exit)
        return self

    def _init_arrays(self, labels, src, dst, entry, exit):
        n = len(labels)
        if len(set(labels)) != n:
            raise ValueError("duplicate node labels")
        if src.shape != dst.shape:
            raise ValueError("edge arrays must have equal length")
        if src.size and (src.min() < 0 or src.max() >= n
                         or dst.min() < 0 or dst.max() >= n):
            raise ValueError("edge endpoint out of range")
        if not (0 <= entry < n and 0 <= exit < n):
            raise ValueError("entry/exit out of range")
        src.flags.writeable = False
        dst.flags.writeable = False
        self._labels = labels
        self._src = src
        self._dst = dst
        self._entry = int(entry)
        self._exit = int(exit)
        self._index = {lab: i for i, lab in enumerate(labels)}

    # -- basic accessors ---------------------------------------------------

    @property
    def node_count(self) -> int:
        return len(self._labels)

    @property
    def edge_count(self) -> int:
        return int(self._src.size)

    @property
    def entry(self) -> NodeId:
        return self._entry

    @property
    def exit(self) -> NodeId:
        return self._exit

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    @property
    def edge_src(self) -> np.ndarray:
        return self._src

    @property
    def edge_dst(self) -> np.ndarray:
        return self._dst

    def label(self, v: NodeId) -> str:
        return self._labels[v]

    def node_id(self, label: str) -> NodeId:
        return self._index[label]

    def edge(self, e: EdgeId) -> tuple[NodeId, NodeId]:
        return (int(self._src[e]), int(self._dst[e]))

    def edge_list(self) -> list[tuple[NodeId, NodeId]]:
        return list(zip(self._src.tolist(), self._dst.tolist()))

    # -- adjacency ----------------------------------------------------------

    @cached_property
    def _out_csr(self):
        return _csr(self.node_count, self._src, np.arange(self.edge_count, dtype=np.int64))

    @cached_property
    def _in_csr(self):
        return _csr(self.node_count, self._dst, np.arange(self.edge_count, dtype=np.int64))

    def out_edge_ids(self, u: NodeId) -> list[EdgeId]:
        indptr, eids = self._out_csr
        return eids[indptr[u]:indptr[u + 1]].tolist()

    def in_edge_ids(self, u: NodeId) -> list[EdgeId]:
        indptr, eids = self._in_csr
        return eids[indptr[u]:indptr[u + 1]].tolist()

    def successors(self, u: NodeId) -> frozenset[NodeId]:
        """Deduplicated successor set (parallel edges collapse)."""
        indptr, eids = self._out_csr
        return frozenset(self._dst[eids[indptr[u]:indptr[u + 1]]].tolist())

    def predecessors(self, u: NodeId) -> frozenset[NodeId]:
        indptr, eids = self._in_csr
        return frozenset(self._src[eids[indptr[u]:indptr[u + 1]]].tolist())

    # Unique directed neighbour pairs with self-loops dropped: the working
    # representation for all node-coverage analysis.
    @cached_property
    def _pair_keys(self) -> np.ndarray:
        mask = self._src != self._dst
        key = self._src[mask] * np.int64(self.node_count) + self._dst[mask]
        return np.unique(key)

    @property
    def pair_src(self) -> np.ndarray:
        return self._pair_keys // self.node_count

    @property
    def pair_dst(self) -> np.ndarray:
        return self._pair_keys % self.node_count

    @cached_property
    def pair_out_csr(self):
        return _csr(self.node_count, self.pair_src, self.pair_dst)

    @cached_property
    def pair_in_csr(self):
        return _csr(self.node_count, self.pair_dst, self.pair_src)

    @cached_property
    def edge_occurrence(self) -> np.ndarray:
        """Per edge, its index among parallel edges with the same endpoints."""
        m = self.edge_count
        if m == 0:
            return np.zeros(0, dtype=np.int64)
        key = self._src * np.int64(self.node_count) + self._dst
        order = np.argsort(key, kind="stable")
        sorted_key = key[order]
        new_run = np.r_[True, sorted_key[1:] != sorted_key[:-1]]
        run_start = np.flatnonzero(new_run)
        run_id = np.cumsum(new_run) - 1
        within = np.arange(m, dtype=np.int64) - run_start[run_id]
        occ = np.empty(m, dtype=np.int64)
        occ[order] = within
        return occ

    # -- value semantics ----------------------------------------------------

    def _value(self):
        return (frozenset(self._labels),
                self._labels[self._entry], self._labels[self._exit],
                tuple((self._labels[u], self._labels[v])
                      for u, v in zip(self._src.tolist(), self._dst.tolist())))

    def __eq__(self, other):
        if not isinstance(other, Cfg):
            return NotImplemented
        return self._value() == other._value()

    def __repr__(self):
        return (f"Cfg(nodes={self.node_count}, edges={self.edge_count}, "
                f"entry={self._labels[self._entry]!r}, exit={self._labels[self._exit]!r})")


# -- validation --------------------------------------------------------------

@dataclass(frozen=True)
class ValidationReport:
    """Structural check results.  `ok` iff every violation field is empty."""

    ok: bool
    unreachable_from_entry: tuple[NodeId, ...]
    cannot_reach_exit: tuple[NodeId, ...]
    entry_in_edges: tuple[EdgeId, ...]
    exit_out_edges: tuple[EdgeId, ...]
    entry_equals_exit: bool

    def violations(self) -> list[str]:
        out = []
        if self.entry_equals_exit:
            out.append("entry equals exit")
        if self.unreachable_from_entry:
            out.append(f"unreachable from entry: {list(self.unreachable_from_entry)}")
        if self.cannot_reach_exit:
            out.append(f"cannot reach exit: {list(self.cannot_reach_exit)}")
        if self.entry_in_edges:
            out.append(f"entry has in-edges: {list(self.entry_in_edges)}")
        if self.exit_out_edges:
            out.append(f"exit has out-edges: {list(self.exit_out_edges)}")
        return out


def validate(cfg: Cfg) -> ValidationReport:
    """Check the structural assumptions the solvers rely on.

    Self-loops at entry/exit are not degree violations: they cannot introduce
    control flow into the entry or out of the exit.
    """
    out_indptr, out_targets = cfg.pair_out_csr
    in_indptr, in_targets = cfg.pair_in_csr
    fwd = kernels.reachable_mask(out_indptr, out_targets, cfg.entry)
    bwd = kernels.reachable_mask(in_indptr, in_targets, cfg.exit)
    unreachable = tuple(np.flatnonzero(fwd == 0).tolist())
    no_exit = tuple(np.flatnonzero(bwd == 0).tolist())
    entry_in = tuple(np.flatnonzero(
        (cfg.edge_dst == cfg.entry) & (cfg.edge_src != cfg.entry)).tolist())
    exit_out = tuple(np.flatnonzero(
        (cfg.edge_src == cfg.exit) & (cfg.edge_dst != cfg.exit)).tolist())
    same = cfg.entry == cfg.exit
    ok = not (unreachable or no_exit or entry_in or exit_out or same)
    return ValidationReport(ok, unreachable, no_exit, entry_in, exit_out, same)


# -- text format ---------------------------------------------------------------

def parse_cfg(text: str) -> Cfg:
    """Parse the line-oriented CFG format.

    Lines: ``# comment``, ``entry <label>``, ``exit <label>``,
    ``edge <label> <label>``.  Labels are arbitrary non-whitespace tokens and
    nodes are implicit; ids follow first appearance.
    """
    labels: list[str] = []
    index: dict[str, int] = {}

    def intern(label: str) -> int:
        if label not in index:
            index[label] = len(labels)
            labels.append(label)
        return index[label]

    edges: list[tuple[int, int]] = []
    entry_label: str | None = None
    exit_label: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        kw = tokens[0]
        if kw == "entry":
            if len(tokens) != 2:
                raise CfgParseError("expected 'entry <label>'", lineno)
            if entry_label is not None:
                raise CfgParseError("duplicate entry declaration", lineno)
            entry_label = tokens[1]
            intern(entry_label)
        elif kw == "exit":
            if len(tokens) != 2:
                raise CfgParseError("expected 'exit <label>'", lineno)
            if exit_label is not None:
                raise CfgParseError("duplicate exit declaration", lineno)
            exit_label = tokens[1]
            intern(exit_label)
        elif kw == "edge":
            if len(tokens) != 3:
                raise CfgParseError("expected 'edge <source> <target>'", lineno)
            edges.append((intern(tokens[1]), intern(tokens[2])))
        else:
            raise CfgParseError(f"unknown directive {kw!r}", lineno)
    if entry_label is None:
        raise CfgParseError("missing entry declaration")
    if exit_label is None:
        raise CfgParseError("missing exit declaration")
    return Cfg(labels, edges, index[entry_label], index[exit_label])


def serialize_cfg(cfg: Cfg) -> str:
    """Inverse of `parse_cfg`: entry, exit, then edges in edge-id order."""
    lines = [f"entry {cfg.label(cfg.entry)}", f"exit {cfg.label(cfg.exit)}"]
    for u, v in zip(cfg.edge_src.tolist(), cfg.edge_dst.tolist()):
        lines.append(f"edge {cfg.label(u)} {cfg.label(v)}")
    return "\n".join(lines) + "\n"


# -- subdivision ---------------------------------------------------------------

@dataclass(frozen=True)
class SubdivisionMap:
    """Correspondence between an original graph and its subdivision.

    `edge_nodes[e]` is the node that replaced edge e; `node_map[v]` is the
    (identity) image of node v.
    """

    edge_nodes: tuple[NodeId, ...]
    node_map: tuple[NodeId, ...]

    def edge_of_node(self, v: NodeId) -> EdgeId:
        return v - len(self.node_map)


def subdivide(cfg: Cfg) -> tuple[Cfg, SubdivisionMap]:
    """Split every edge (u, v) into u -> n_e -> v.

    The result has |V| + |E| nodes and 2|E| edges, is bipartite between the
    original nodes and the new edge nodes, and contains no self-loops.
    """
    n = cfg.node_count
    m = cfg.edge_count
    occ = cfg.edge_occurrence
    taken = set(cfg.labels)
    new_labels = list(cfg.labels)
    for e in range(m):
        u, v = cfg.edge(e)
        base = f"{cfg.label(u)}>{cfg.label(v)}#{int(occ[e])}"
        while base in taken:
            base += "'"
        taken.add(base)
        new_labels.append(base)
    src = np.empty(2 * m, dtype=np.int64)
    dst = np.empty(2 * m, dtype=np.int64)
    mid = n + np.arange(m, dtype=np.int64)
    src[0::2] = cfg.edge_src
    dst[0::2] = mid
    src[1::2] = mid
    dst[1::2] = cfg.edge_dst
    sub = Cfg.from_arrays(new_labels, src, dst, cfg.entry, cfg.exit)
    smap = SubdivisionMap(tuple(range(n, n + m)), tuple(range(n)))
    return sub, smap


# -- DOT output ---------------------------------------------------------------

def to_dot(cfg: Cfg, highlight_nodes: Iterable[NodeId] = (),
           highlight_edges: Iterable[EdgeId] = (), name: str = "cfg") -> str:
    """GraphViz rendering; highlighted (instrumented) elements stand out."""
    hn = set(highlight_nodes)
    he = set(highlight_edges)
    lines = [f"digraph {name} {{"]
    for v in range(cfg.node_count):
        attrs = []
        if v in (cfg.entry, cfg.exit):
            attrs.append("peripheries=2")
        if v in hn:
            attrs.append('style=filled fillcolor="gray80"')
        suffix = f" [{' '.join(attrs)}]" if attrs else ""
        lines.append(f'  "{cfg.label(v)}"{suffix};')
    for e in range(cfg.edge_count):
        u, v = cfg.edge(e)
        suffix = " [penwidth=2 color=red]" if e in he else ""
        lines.append(f'  "{cfg.label(u)}" -> "{cfg.label(v)}"{suffix};')
    lines.append("}")
    return "\n".join(lines) + "\n"
