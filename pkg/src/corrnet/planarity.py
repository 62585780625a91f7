"""Planarity testing via the left-right (edge-addition) criterion.

Verdict-only implementation: an orientation DFS computes lowpoints and
nesting depths, then a testing DFS maintains a stack of conflict pairs of
return-edge intervals; the graph is non-planar exactly when two return edges
with interleaving lowpoints are forced onto the same side.  Embedding
bookkeeping (side signs, face structure) is deliberately omitted because only
the boolean matters here.

Both DFS passes are iterative, so deep graphs cannot hit the recursion limit.
Edges are encoded as integers: undirected edge k gets directed ids 2k and
2k+1, ``head[d]`` is the target of directed id d and ``head[d ^ 1]`` its
tail.  Conflict pairs are flat 4-lists [Llow, Lhigh, Rlow, Rhigh] with -1 as
nil; the code is written for speed (the PMFG builder calls this once per
candidate edge), so the helpers are inlined into the DFS loops.  Input must
be a simple graph (no loops or parallel edges).
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

try:  # optional numba-compiled twin (~40x); results are identical
    from ._lr_fast import lr_test_arrays as _lr_fast
except Exception:  # pragma: no cover - numba not installed
    _lr_fast = None

_NIL = -1


def is_planar_edges(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    """True iff the simple undirected graph admits a planar embedding."""
    m = len(edges)
    # every graph on < 5 vertices or < 9 edges is planar (K5 has 10 edges,
    # K3,3 has 9); the Euler bound rejects dense graphs outright
    if n < 5 or m < 9:
        return True
    if m > 3 * n - 6:
        return False
    if _lr_fast is not None:
        pairs = np.asarray(edges, dtype=np.int32).reshape(m, 2)
        return bool(_lr_fast(n, np.ascontiguousarray(pairs[:, 0]),
                             np.ascontiguousarray(pairs[:, 1])))
    return _lr_test(n, edges)


def _lr_test(n: int, edges: Sequence[tuple[int, int]]) -> bool:
    m = len(edges)
    head = [0] * (2 * m)
    out: list[list[int]] = [[] for _ in range(n)]
    d = 0
    for u, v in edges:
        head[d] = v
        head[d + 1] = u
        out[u].append(d)
        out[v].append(d + 1)
        d += 2

    size2 = 2 * m
    height = [_NIL] * n
    parent_edge = [_NIL] * n
    oriented = [_NIL] * m  # directed id chosen for each undirected edge
    lowpt = [0] * size2
    lowpt2 = [0] * size2
    nesting = [0] * size2

    # --- orientation DFS ---
    roots: list[int] = []
    ptr = [0] * n
    for root in range(n):
        if height[root] != _NIL:
            continue
        height[root] = 0
        roots.append(root)
        stack = [root]
        while stack:
            v = stack[-1]
            hv = height[v]
            pv = ptr[v]
            descended = False
            ov = out[v]
            no = len(ov)
            finish = _NIL  # back edge to fold into the parent edge, if any
            while pv < no:
                d = ov[pv]
                pv += 1
                k = d >> 1
                if oriented[k] != _NIL:
                    continue
                oriented[k] = d
                w = head[d]
                if height[w] == _NIL:  # tree edge: finish after the subtree
                    parent_edge[w] = d
                    height[w] = hv + 1
                    lowpt[d] = hv
                    lowpt2[d] = hv
                    stack.append(w)
                    descended = True
                    break
                # back edge: returns to w below v
                lowpt[d] = height[w]
                lowpt2[d] = hv
                finish = d
                break
            ptr[v] = pv
            if descended:
                continue
            if finish == _NIL:
                # v exhausted: fold v's tree edge into its parent's edge
                stack.pop()
                finish = parent_edge[v]
                if finish == _NIL:
                    continue
                v = head[finish ^ 1]
                hv = height[v]
            d = finish
            # nesting depth orders children; odd when a chord also returns above
            nd = 2 * lowpt[d]
            if lowpt2[d] < hv:
                nd += 1
            nesting[d] = nd
            pe = parent_edge[v]
            if pe != _NIL:
                ld, lpe = lowpt[d], lowpt[pe]
                if ld < lpe:
                    l2 = lowpt2[d]
                    lowpt2[pe] = lpe if lpe < l2 else l2
                    lowpt[pe] = ld
                elif ld > lpe:
                    if ld < lowpt2[pe]:
                        lowpt2[pe] = ld
                elif lowpt2[d] < lowpt2[pe]:
                    lowpt2[pe] = lowpt2[d]

    # adjacency ordered by nesting depth (stable, so edge id breaks ties)
    ordered: list[list[int]] = [[] for _ in range(n)]
    for k in range(m):
        d = oriented[k]
        ordered[head[d ^ 1]].append(d)
    nest_key = nesting.__getitem__
    for v in range(n):
        ordered[v].sort(key=nest_key)

    # --- testing DFS ---
    # conflict pairs are [Llow, Lhigh, Rlow, Rhigh]; stack_bottom stores the
    # pair object on top of S when an edge starts (None marks an empty stack)
    S: list[list[int]] = []
    stack_bottom: list[list[int] | None] = [None] * size2
    lowpt_edge = [_NIL] * size2
    ref = [_NIL] * size2

    def add_constraints(ei: int, e: int) -> bool:
        # P accumulates the merged conflict pair for ei
        pll = plh = prl = prh = _NIL
        bottom = stack_bottom[ei]
        le = lowpt[e]
        # merge the return edges of ei into P's right interval
        while True:
            Q = S.pop()
            if Q[0] != _NIL or Q[1] != _NIL:
                Q[0], Q[1], Q[2], Q[3] = Q[2], Q[3], Q[0], Q[1]
            if Q[0] != _NIL or Q[1] != _NIL:
                return False  # return edges on both sides: not planar
            if lowpt[Q[2]] > le:
                if prl == _NIL and prh == _NIL:
                    prh = Q[3]
                elif prl != _NIL:
                    ref[prl] = Q[3]
                prl = Q[2]
            else:  # returns only to lowpt(e): align behind its lowpoint edge
                ref[Q[2]] = lowpt_edge[e]
            if (S[-1] if S else None) is bottom:
                break
        # merge return edges of elder siblings that conflict with ei into P's left
        lei = lowpt[ei]
        while S:
            T = S[-1]
            th, rh = T[1], T[3]
            if not ((th != _NIL and lowpt[th] > lei) or (rh != _NIL and lowpt[rh] > lei)):
                break
            Q = S.pop()
            if Q[3] != _NIL and lowpt[Q[3]] > lei:
                Q[0], Q[1], Q[2], Q[3] = Q[2], Q[3], Q[0], Q[1]
            if Q[3] != _NIL and lowpt[Q[3]] > lei:
                return False  # conflicts on both sides: not planar
            if prl != _NIL:
                ref[prl] = Q[3]  # interval below lowpt(ei) goes right
            if Q[2] != _NIL:
                prl = Q[2]
            if pll == _NIL and plh == _NIL:
                plh = Q[1]
            elif pll != _NIL:
                ref[pll] = Q[1]
            pll = Q[0]
        if pll != _NIL or plh != _NIL or prl != _NIL or prh != _NIL:
            S.append([pll, plh, prl, prh])
        return True

    def remove_back_edges(e: int) -> None:
        u = head[e ^ 1]
        hu = height[u]
        # drop conflict pairs whose return edges all end at u
        while S:
            P = S[-1]
            if P[0] == _NIL and P[1] == _NIL:
                low = lowpt[P[2]]
            elif P[2] == _NIL and P[3] == _NIL:
                low = lowpt[P[0]]
            else:
                a, b = lowpt[P[0]], lowpt[P[2]]
                low = a if a < b else b
            if low != hu:
                break
            S.pop()
        if S:
            P = S[-1]
            while P[1] != _NIL and head[P[1]] == u:
                P[1] = ref[P[1]]
            if P[1] == _NIL and P[0] != _NIL:  # left just emptied
                ref[P[0]] = P[2]
                P[0] = _NIL
            while P[3] != _NIL and head[P[3]] == u:
                P[3] = ref[P[3]]
            if P[3] == _NIL and P[2] != _NIL:  # right just emptied
                ref[P[2]] = P[0]
                P[2] = _NIL

    ptr2 = [0] * n
    awaiting = [False] * n
    for root in roots:
        tstack = [root]
        while tstack:
            v = tstack[-1]
            pe = parent_edge[v]
            hv = height[v]
            descended = False
            ov = ordered[v]
            no = len(ov)
            i = ptr2[v]
            while i < no:
                d = ov[i]
                if not awaiting[v]:
                    stack_bottom[d] = S[-1] if S else None
                    w = head[d]
                    if d == parent_edge[w]:  # tree edge: process after subtree
                        awaiting[v] = True
                        ptr2[v] = i
                        tstack.append(w)
                        descended = True
                        break
                    lowpt_edge[d] = d  # back edge
                    S.append([_NIL, _NIL, d, d])
                else:
                    awaiting[v] = False
                if lowpt[d] < hv:  # d has a return edge below v
                    if i == 0:
                        lowpt_edge[pe] = lowpt_edge[d]
                    elif not add_constraints(d, pe):
                        return False
                i += 1
            if descended:
                continue
            ptr2[v] = i
            tstack.pop()
            if pe != _NIL:
                remove_back_edges(pe)
    return True
