"""Deterministic CFG families for fixtures, benchmarks, and random corpora."""

from __future__ import annotations

import random

import numpy as np

from mincov.cfg import Cfg, validate


def gen_diamond_chain(k: int) -> Cfg:
    """k diamonds in series: 3k+1 nodes, 4k edges, labelled v1..v{3k+1}."""
    if k < 1:
        raise ValueError("need at least one block")
    n = 3 * k + 1
    labels = [f"v{i}" for i in range(1, n + 1)]
    j = np.arange(k, dtype=np.int64)
    src = np.empty(4 * k, dtype=np.int64)
    dst = np.empty(4 * k, dtype=np.int64)
    src[0::4] = 3 * j
    dst[0::4] = 3 * j + 1
    src[1::4] = 3 * j
    dst[1::4] = 3 * j + 2
    src[2::4] = 3 * j + 1
    dst[2::4] = 3 * j + 3
    src[3::4] = 3 * j + 2
    dst[3::4] = 3 * j + 3
    return Cfg.from_arrays(labels, src, dst, 0, n - 1)


def gen_selfloop_path(k: int) -> Cfg:
    """A k-node path with a self-loop on every node: 2k-1 edges."""
    if k < 2:
        raise ValueError("need at least two nodes")
    labels = [f"v{i}" for i in range(1, k + 1)]
    edges = []
    for i in range(k):
        edges.append((i, i))
        if i + 1 < k:
            edges.append((i, i + 1))
    return Cfg(labels, edges, 0, k - 1)


def gen_layered(widths) -> Cfg:
    """Consecutive layers fully connected; first and last layer must be single."""
    widths = list(widths)
    if len(widths) < 2 or widths[0] != 1 or widths[-1] != 1:
        raise ValueError("layer widths must start and end with 1")
    if any(w < 1 for w in widths):
        raise ValueError("layer widths must be positive")
    n = sum(widths)
    labels = [f"v{i}" for i in range(1, n + 1)]
    layers = []
    start = 0
    for w in widths:
        layers.append(list(range(start, start + w)))
        start += w
    edges = []
    for cur, nxt in zip(layers, layers[1:]):
        for u in cur:
            for v in nxt:
                edges.append((u, v))
    return Cfg(labels, edges, 0, n - 1)


def gen_random(n: int, edge_prob: float, seed: int) -> Cfg:
    """Random valid CFG on n nodes (entry 0, exit n-1).

    Sampled edge-by-edge, resampled a few times if the structure is off,
    then patched by connecting stragglers from the entry / to the exit.
    Middle nodes may get self-loops and occasional parallel copies.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    rng = random.Random(seed)
    s, t = 0, n - 1
    for attempt in range(6):
        edges: list[tuple[int, int]] = []
        for u in range(n):
            if u == t:
                continue
            for v in range(n):
                if v == s:
                    continue
                if u == v:
                    if v not in (s, t) and rng.random() < edge_prob / 3:
                        edges.append((u, v))
                elif rng.random() < edge_prob:
                    edges.append((u, v))
        if attempt == 5 or rng.random() < 0.5:
            edges = _patch(edges, n, s, t)
        if edges and rng.random() < 0.3:
            edges.append(edges[rng.randrange(len(edges))])  # a parallel copy
        cfg = Cfg([f"n{i}" for i in range(n)], edges, s, t)
        if validate(cfg).ok:
            return cfg
    raise AssertionError("patched graph failed to validate")  # pragma: no cover


def _patch(edges, n, s, t):
    out = list(edges)
    succ: dict[int, set[int]] = {}
    for u, v in out:
        succ.setdefault(u, set()).add(v)
    seen = {s}
    stack = [s]
    while stack:
        v = stack.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    for v in range(n):
        if v not in seen:
            out.append((s, v))
    pred: dict[int, set[int]] = {}
    for u, v in out:
        pred.setdefault(v, set()).add(u)
    seen = {t}
    stack = [t]
    while stack:
        v = stack.pop()
        for w in pred.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    for v in range(n):
        if v not in seen:
            out.append((v, t))
    return out


def gen_corpus(count: int, seed: int, min_nodes: int = 2, max_nodes: int = 10,
               max_edges: int | None = None) -> list[Cfg]:
    """Fixed-seed family of random valid CFGs, optionally capped by edge count."""
    rng = random.Random(seed)
    out: list[Cfg] = []
    while len(out) < count:
        n = rng.randint(min_nodes, max_nodes)
        p = rng.uniform(1.2, 2.8) / max(n - 1, 1)
        cfg = gen_random(n, p, rng.randrange(2 ** 30))
        if max_edges is not None and cfg.edge_count > max_edges:
            continue
        out.append(cfg)
    return out
