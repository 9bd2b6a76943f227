"""Pure-Python kernels.

Drop-in fallback for the compiled module ``mincov._speedups``: identical
signatures and outputs, roughly an order of magnitude slower on large graphs.
All graph arguments are CSR arrays (int64) as produced by the callers.
"""

from __future__ import annotations

import heapq

import numpy as np


def reachable_mask(indptr, targets, root):
    """uint8 mask of nodes reachable from `root` along the CSR edges."""
    n = len(indptr) - 1
    vis = bytearray(n)
    if n == 0:
        return np.zeros(0, dtype=np.uint8)
    ip = indptr.tolist()
    tg = targets.tolist()
    vis[root] = 1
    stack = [int(root)]
    while stack:
        v = stack.pop()
        for j in range(ip[v], ip[v + 1]):
            w = tg[j]
            if not vis[w]:
                vis[w] = 1
                stack.append(w)
    return np.frombuffer(bytes(vis), dtype=np.uint8).copy()


def dominators(succ_indptr, succ, pred_indptr, pred, root):
    """Immediate-dominator array for the flow graph rooted at `root`.

    Iterative RPO fixpoint (Cooper/Harvey/Kennedy).  idom[root] == root;
    unreachable nodes get -1.
    """
    n = len(succ_indptr) - 1
    sip = succ_indptr.tolist()
    st = succ.tolist()
    pip = pred_indptr.tolist()
    pt = pred.tolist()

    # Iterative depth-first postorder from the root.
    visited = bytearray(n)
    visited[root] = 1
    post: list[int] = []
    node_stack = [int(root)]
    cur_stack = [sip[root]]
    while node_stack:
        v = node_stack[-1]
        c = cur_stack[-1]
        if c < sip[v + 1]:
            cur_stack[-1] = c + 1
            w = st[c]
            if not visited[w]:
                visited[w] = 1
                node_stack.append(w)
                cur_stack.append(sip[w])
        else:
            node_stack.pop()
            cur_stack.pop()
            post.append(v)

    cnt = len(post)
    rpo = [-1] * n
    for i, v in enumerate(post):
        rpo[v] = cnt - 1 - i

    idom = [-1] * n
    idom[root] = int(root)
    changed = True
    while changed:
        changed = False
        for i in range(cnt - 2, -1, -1):  # reverse postorder, root skipped
            v = post[i]
            new_idom = -1
            for j in range(pip[v], pip[v + 1]):
                u = pt[j]
                if idom[u] == -1:
                    continue
                if new_idom == -1:
                    new_idom = u
                    continue
                f1, f2 = u, new_idom
                while f1 != f2:
                    while rpo[f1] > rpo[f2]:
                        f1 = idom[f1]
                    while rpo[f2] > rpo[f1]:
                        f2 = idom[f2]
                new_idom = f1
            if new_idom != -1 and idom[v] != new_idom:
                idom[v] = new_idom
                changed = True
    return np.asarray(idom, dtype=np.int64)


def tree_intervals(child_indptr, children, root):
    """Preorder enter/leave numbering of a rooted tree given as children CSR.

    x is an ancestor of y (inclusive) iff enter[x] <= enter[y] <= leave[x].
    Nodes not under the root keep -1 in both arrays.
    """
    n = len(child_indptr) - 1
    cip = child_indptr.tolist()
    ch = children.tolist()
    enter = [-1] * n
    leave = [-1] * n
    if n == 0:
        return (np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64))
    enter[root] = 0
    counter = 1
    node_stack = [int(root)]
    cur_stack = [cip[root]]
    while node_stack:
        v = node_stack[-1]
        c = cur_stack[-1]
        if c < cip[v + 1]:
            cur_stack[-1] = c + 1
            w = ch[c]
            enter[w] = counter
            counter += 1
            node_stack.append(w)
            cur_stack.append(cip[w])
        else:
            node_stack.pop()
            cur_stack.pop()
            leave[v] = counter - 1
    return (np.asarray(enter, dtype=np.int64), np.asarray(leave, dtype=np.int64))


def toposort(dep_indptr, dependents, dep_count):
    """Kahn's algorithm, smallest node id first among the ready set.

    `dependents` lists, per node, the nodes waiting on it; `dep_count` is the
    number of unresolved dependencies per node.  Returns the emitted order;
    a result shorter than n means the dependencies contain a cycle.
    """
    n = len(dep_indptr) - 1
    ip = dep_indptr.tolist()
    dp = dependents.tolist()
    cnt = dep_count.tolist()
    heap = [v for v in range(n) if cnt[v] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for j in range(ip[v], ip[v + 1]):
            w = dp[j]
            cnt[w] -= 1
            if cnt[w] == 0:
                heapq.heappush(heap, w)
    return np.asarray(order, dtype=np.int64)


def eval_steps(kinds, probe_vals, src_indptr, src_step):
    """Evaluate an inference plan: per step, copy a probe or OR earlier steps."""
    n_steps = len(kinds)
    kk = kinds.tolist()
    pv = probe_vals.tolist()
    ip = src_indptr.tolist()
    ss = src_step.tolist()
    vals = [0] * n_steps
    for i in range(n_steps):
        if kk[i] == 0:
            vals[i] = pv[i]
        else:
            acc = 0
            for j in range(ip[i], ip[i + 1]):
                if vals[ss[j]]:
                    acc = 1
                    break
            vals[i] = acc
    return np.asarray(vals, dtype=np.uint8)
