"""Numba-compiled twin of the left-right planarity test.

Same algorithm as ``planarity._lr_test``, flattened onto int32 arrays so the
whole test JIT-compiles: adjacency as CSR, the conflict-pair stack as four
parallel arrays indexed by pair slot, slots never reused so a slot id is a
stable identity for the stack-bottom markers.  Importing this module requires
numba; ``planarity`` falls back to the pure-Python version without it.
"""

from __future__ import annotations

import numpy as np
from numba import njit

NIL = -1


@njit(cache=True)
def lr_test_arrays(n: int, eu: np.ndarray, ev: np.ndarray) -> bool:  # pragma: no cover
    m = eu.shape[0]
    size2 = 2 * m

    head = np.empty(size2, np.int32)
    deg = np.zeros(n, np.int32)
    for k in range(m):
        head[2 * k] = ev[k]
        head[2 * k + 1] = eu[k]
        deg[eu[k]] += 1
        deg[ev[k]] += 1
    start = np.zeros(n + 1, np.int32)
    for v in range(n):
        start[v + 1] = start[v] + deg[v]
    fill = start[:n].copy()
    out = np.empty(size2, np.int32)
    for k in range(m):
        u = eu[k]
        v = ev[k]
        out[fill[u]] = 2 * k
        fill[u] += 1
        out[fill[v]] = 2 * k + 1
        fill[v] += 1

    height = np.full(n, NIL, np.int32)
    parent_edge = np.full(n, NIL, np.int32)
    oriented = np.full(m, NIL, np.int32)
    lowpt = np.zeros(size2, np.int32)
    lowpt2 = np.zeros(size2, np.int32)
    nesting = np.zeros(size2, np.int32)

    roots = np.empty(n, np.int32)
    nroots = 0
    ptr = start[:n].copy()
    stack = np.empty(n + 1, np.int32)

    # --- orientation DFS ---
    for root in range(n):
        if height[root] != NIL:
            continue
        height[root] = 0
        roots[nroots] = root
        nroots += 1
        stack[0] = root
        sp = 1
        while sp > 0:
            v = stack[sp - 1]
            hv = height[v]
            descended = False
            finish = NIL
            p = ptr[v]
            p_end = start[v + 1]
            while p < p_end:
                d = out[p]
                p += 1
                k = d >> 1
                if oriented[k] != NIL:
                    continue
                oriented[k] = d
                w = head[d]
                if height[w] == NIL:  # tree edge
                    parent_edge[w] = d
                    height[w] = hv + 1
                    lowpt[d] = hv
                    lowpt2[d] = hv
                    stack[sp] = w
                    sp += 1
                    descended = True
                    break
                lowpt[d] = height[w]  # back edge
                lowpt2[d] = hv
                finish = d
                break
            ptr[v] = p
            if descended:
                continue
            if finish == NIL:
                sp -= 1
                finish = parent_edge[v]
                if finish == NIL:
                    continue
                v = head[finish ^ 1]
                hv = height[v]
            d = finish
            nd = 2 * lowpt[d]
            if lowpt2[d] < hv:
                nd += 1
            nesting[d] = nd
            pe = parent_edge[v]
            if pe != NIL:
                ld = lowpt[d]
                lpe = lowpt[pe]
                if ld < lpe:
                    l2 = lowpt2[d]
                    lowpt2[pe] = lpe if lpe < l2 else l2
                    lowpt[pe] = ld
                elif ld > lpe:
                    if ld < lowpt2[pe]:
                        lowpt2[pe] = ld
                elif lowpt2[d] < lowpt2[pe]:
                    lowpt2[pe] = lowpt2[d]

    # --- adjacency ordered by nesting depth (stable insertion sort per vertex) ---
    odeg = np.zeros(n, np.int32)
    for k in range(m):
        d = oriented[k]
        odeg[head[d ^ 1]] += 1
    ostart = np.zeros(n + 1, np.int32)
    for v in range(n):
        ostart[v + 1] = ostart[v] + odeg[v]
    ofill = ostart[:n].copy()
    ordered = np.empty(size2, np.int32)
    for k in range(m):
        d = oriented[k]
        t = head[d ^ 1]
        ordered[ofill[t]] = d
        ofill[t] += 1
    for v in range(n):
        s0 = ostart[v]
        s1 = ostart[v + 1]
        for a in range(s0 + 1, s1):
            dv = ordered[a]
            keyv = nesting[dv]
            b = a - 1
            while b >= s0 and nesting[ordered[b]] > keyv:
                ordered[b + 1] = ordered[b]
                b -= 1
            ordered[b + 1] = dv

    # --- testing DFS ---
    cap = 2 * m + 4  # pair slots are allocated at most once per push
    pll = np.empty(cap, np.int32)
    plh = np.empty(cap, np.int32)
    prl = np.empty(cap, np.int32)
    prh = np.empty(cap, np.int32)
    alloc = 0
    pair_stack = np.empty(cap, np.int32)
    sp2 = 0
    stack_bottom = np.full(size2, -2, np.int32)  # slot id, or -1 for empty stack
    lowpt_edge = np.full(size2, NIL, np.int32)
    ref = np.full(size2, NIL, np.int32)
    ptr2 = ostart[:n].copy()
    awaiting = np.zeros(n, np.uint8)
    tstack = np.empty(n + 1, np.int32)

    for ri in range(nroots):
        tstack[0] = roots[ri]
        sp3 = 1
        while sp3 > 0:
            v = tstack[sp3 - 1]
            pe = parent_edge[v]
            hv = height[v]
            descended = False
            i = ptr2[v]
            i0 = ostart[v]
            i_end = ostart[v + 1]
            while i < i_end:
                d = ordered[i]
                if awaiting[v] == 0:
                    stack_bottom[d] = pair_stack[sp2 - 1] if sp2 > 0 else -1
                    w = head[d]
                    if d == parent_edge[w]:  # tree edge: process after subtree
                        awaiting[v] = 1
                        ptr2[v] = i
                        tstack[sp3] = w
                        sp3 += 1
                        descended = True
                        break
                    lowpt_edge[d] = d  # back edge
                    pll[alloc] = NIL
                    plh[alloc] = NIL
                    prl[alloc] = d
                    prh[alloc] = d
                    pair_stack[sp2] = alloc
                    sp2 += 1
                    alloc += 1
                else:
                    awaiting[v] = 0
                if lowpt[d] < hv:  # d has a return edge below v
                    if i == i0:
                        lowpt_edge[pe] = lowpt_edge[d]
                    else:
                        # --- add_constraints(d, pe), inlined ---
                        apll = aplh = aprl = aprh = NIL
                        bottom = stack_bottom[d]
                        le = lowpt[pe]
                        while True:
                            q = pair_stack[sp2 - 1]
                            sp2 -= 1
                            if pll[q] != NIL or plh[q] != NIL:
                                t0 = pll[q]
                                t1 = plh[q]
                                pll[q] = prl[q]
                                plh[q] = prh[q]
                                prl[q] = t0
                                prh[q] = t1
                            if pll[q] != NIL or plh[q] != NIL:
                                return False  # return edges on both sides
                            if lowpt[prl[q]] > le:
                                if aprl == NIL and aprh == NIL:
                                    aprh = prh[q]
                                elif aprl != NIL:
                                    ref[aprl] = prh[q]
                                aprl = prl[q]
                            else:  # aligns behind the lowpoint edge of pe
                                ref[prl[q]] = lowpt_edge[pe]
                            top = pair_stack[sp2 - 1] if sp2 > 0 else -1
                            if top == bottom:
                                break
                        lei = lowpt[d]
                        while sp2 > 0:
                            q = pair_stack[sp2 - 1]
                            lconf = plh[q] != NIL and lowpt[plh[q]] > lei
                            rconf = prh[q] != NIL and lowpt[prh[q]] > lei
                            if not (lconf or rconf):
                                break
                            sp2 -= 1
                            if rconf:
                                t0 = pll[q]
                                t1 = plh[q]
                                pll[q] = prl[q]
                                plh[q] = prh[q]
                                prl[q] = t0
                                prh[q] = t1
                            if prh[q] != NIL and lowpt[prh[q]] > lei:
                                return False  # conflicts on both sides
                            if aprl != NIL:
                                ref[aprl] = prh[q]
                            if prl[q] != NIL:
                                aprl = prl[q]
                            if apll == NIL and aplh == NIL:
                                aplh = plh[q]
                            elif apll != NIL:
                                ref[apll] = plh[q]
                            apll = pll[q]
                        if apll != NIL or aplh != NIL or aprl != NIL or aprh != NIL:
                            pll[alloc] = apll
                            plh[alloc] = aplh
                            prl[alloc] = aprl
                            prh[alloc] = aprh
                            pair_stack[sp2] = alloc
                            sp2 += 1
                            alloc += 1
                        # --- end add_constraints ---
                i += 1
            if descended:
                continue
            ptr2[v] = i
            sp3 -= 1
            if pe != NIL:
                # --- remove_back_edges(pe), inlined ---
                u = head[pe ^ 1]
                hu = height[u]
                while sp2 > 0:
                    q = pair_stack[sp2 - 1]
                    if pll[q] == NIL and plh[q] == NIL:
                        low = lowpt[prl[q]]
                    elif prl[q] == NIL and prh[q] == NIL:
                        low = lowpt[pll[q]]
                    else:
                        a = lowpt[pll[q]]
                        b = lowpt[prl[q]]
                        low = a if a < b else b
                    if low != hu:
                        break
                    sp2 -= 1
                if sp2 > 0:
                    q = pair_stack[sp2 - 1]
                    while plh[q] != NIL and head[plh[q]] == u:
                        plh[q] = ref[plh[q]]
                    if plh[q] == NIL and pll[q] != NIL:  # left just emptied
                        ref[pll[q]] = prl[q]
                        pll[q] = NIL
                    while prh[q] != NIL and head[prh[q]] == u:
                        prh[q] = ref[prh[q]]
                    if prh[q] == NIL and prl[q] != NIL:  # right just emptied
                        ref[prl[q]] = pll[q]
                        prl[q] = NIL
                # --- end remove_back_edges ---
    return True
