# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for the hot graph loops.

Signature-for-signature mirror of ``mincov._speedups_py`` (the fallback used
when this extension is not built).  Keep the two in sync.
"""

import numpy as np


def reachable_mask(long long[::1] indptr, long long[::1] targets, long long root):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    vis_arr = np.zeros(n, dtype=np.uint8)
    if n == 0:
        return vis_arr
    stack_arr = np.empty(n, dtype=np.int64)
    cdef unsigned char[::1] vis = vis_arr
    cdef long long[::1] stack = stack_arr
    cdef Py_ssize_t sp = 1
    cdef long long v, w, j
    vis[root] = 1
    stack[0] = root
    while sp > 0:
        sp -= 1
        v = stack[sp]
        for j in range(indptr[v], indptr[v + 1]):
            w = targets[j]
            if vis[w] == 0:
                vis[w] = 1
                stack[sp] = w
                sp += 1
    return vis_arr


def dominators(long long[::1] succ_indptr, long long[::1] succ,
               long long[::1] pred_indptr, long long[::1] pred,
               long long root):
    cdef Py_ssize_t n = succ_indptr.shape[0] - 1
    idom_arr = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return idom_arr
    cdef long long[::1] idom = idom_arr

    post_arr = np.empty(n, dtype=np.int64)
    rpo_arr = np.full(n, -1, dtype=np.int64)
    vis_arr = np.zeros(n, dtype=np.uint8)
    nstack_arr = np.empty(n, dtype=np.int64)
    cstack_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] post = post_arr
    cdef long long[::1] rpo = rpo_arr
    cdef unsigned char[::1] vis = vis_arr
    cdef long long[::1] nstack = nstack_arr
    cdef long long[::1] cstack = cstack_arr

    cdef Py_ssize_t sp = 1, cnt = 0, i
    cdef long long v, w, c, j, u, new_idom, f1, f2
    cdef int changed

    vis[root] = 1
    nstack[0] = root
    cstack[0] = succ_indptr[root]
    while sp > 0:
        v = nstack[sp - 1]
        c = cstack[sp - 1]
        if c < succ_indptr[v + 1]:
            cstack[sp - 1] = c + 1
            w = succ[c]
            if vis[w] == 0:
                vis[w] = 1
                nstack[sp] = w
                cstack[sp] = succ_indptr[w]
                sp += 1
        else:
            sp -= 1
            post[cnt] = v
            cnt += 1

    for i in range(cnt):
        rpo[post[i]] = cnt - 1 - i

    idom[root] = root
    changed = 1
    while changed:
        changed = 0
        for i in range(cnt - 2, -1, -1):
            v = post[i]
            new_idom = -1
            for j in range(pred_indptr[v], pred_indptr[v + 1]):
                u = pred[j]
                if idom[u] == -1:
                    continue
                if new_idom == -1:
                    new_idom = u
                    continue
                f1 = u
                f2 = new_idom
                while f1 != f2:
                    while rpo[f1] > rpo[f2]:
                        f1 = idom[f1]
                    while rpo[f2] > rpo[f1]:
                        f2 = idom[f2]
                new_idom = f1
            if new_idom != -1 and idom[v] != new_idom:
                idom[v] = new_idom
                changed = 1
    return idom_arr


def tree_intervals(long long[::1] child_indptr, long long[::1] children,
                   long long root):
    cdef Py_ssize_t n = child_indptr.shape[0] - 1
    enter_arr = np.full(n, -1, dtype=np.int64)
    leave_arr = np.full(n, -1, dtype=np.int64)
    if n == 0:
        return enter_arr, leave_arr
    nstack_arr = np.empty(n, dtype=np.int64)
    cstack_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] enter = enter_arr
    cdef long long[::1] leave = leave_arr
    cdef long long[::1] nstack = nstack_arr
    cdef long long[::1] cstack = cstack_arr
    cdef Py_ssize_t sp = 1
    cdef long long v, w, c, counter = 1
    enter[root] = 0
    nstack[0] = root
    cstack[0] = child_indptr[root]
    while sp > 0:
        v = nstack[sp - 1]
        c = cstack[sp - 1]
        if c < child_indptr[v + 1]:
            cstack[sp - 1] = c + 1
            w = children[c]
            enter[w] = counter
            counter += 1
            nstack[sp] = w
            cstack[sp] = child_indptr[w]
            sp += 1
        else:
            sp -= 1
            leave[v] = counter - 1
    return enter_arr, leave_arr


def toposort(long long[::1] dep_indptr, long long[::1] dependents,
             long long[::1] dep_count):
    cdef Py_ssize_t n = dep_indptr.shape[0] - 1
    cnt_arr = np.asarray(dep_count).copy()
    heap_arr = np.empty(n, dtype=np.int64)
    order_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] cnt = cnt_arr
    cdef long long[::1] heap = heap_arr
    cdef long long[::1] order = order_arr
    cdef Py_ssize_t hs = 0, k = 0, i, child, parent
    cdef long long v, w, j, tmp

    for v in range(n):  # ascending fill is already a valid min-heap
        if cnt[v] == 0:
            heap[hs] = v
            hs += 1
    while hs > 0:
        v = heap[0]
        hs -= 1
        heap[0] = heap[hs]
        i = 0
        while True:
            child = 2 * i + 1
            if child >= hs:
                break
            if child + 1 < hs and heap[child + 1] < heap[child]:
                child += 1
            if heap[child] < heap[i]:
                tmp = heap[i]
                heap[i] = heap[child]
                heap[child] = tmp
                i = child
            else:
                break
        order[k] = v
        k += 1
        for j in range(dep_indptr[v], dep_indptr[v + 1]):
            w = dependents[j]
            cnt[w] -= 1
            if cnt[w] == 0:
                heap[hs] = w
                i = hs
                hs += 1
                while i > 0:
                    parent = (i - 1) >> 1
                    if heap[parent] > heap[i]:
                        tmp = heap[i]
                        heap[i] = heap[parent]
                        heap[parent] = tmp
                        i = parent
                    else:
                        break
    return order_arr[:k].copy()


def eval_steps(unsigned char[::1] kinds, unsigned char[::1] probe_vals,
               long long[::1] src_indptr, long long[::1] src_step):
    cdef Py_ssize_t n_steps = kinds.shape[0]
    vals_arr = np.zeros(n_steps, dtype=np.uint8)
    cdef unsigned char[::1] vals = vals_arr
    cdef Py_ssize_t i
    cdef long long j
    cdef unsigned char acc
    for i in range(n_steps):
        if kinds[i] == 0:
            vals[i] = probe_vals[i]
        else:
            acc = 0
            for j in range(src_indptr[i], src_indptr[i + 1]):
                if vals[src_step[j]]:
                    acc = 1
                    break
            vals[i] = acc
    return vals_arr
