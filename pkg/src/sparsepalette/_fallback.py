"""Pure-Python kernel implementations.

Same contracts as the compiled module `_speedups`; selected by
`sparsepalette.kernels` when the extension is unavailable.  All arrays are
int64, adjacency and color lists are CSR with sorted rows.
"""

from __future__ import annotations

import numpy as np


def _row(indptr, indices, v):
    return indices[indptr[v] : indptr[v + 1]]


def common_neighbor_counts(indptr, indices, eu, ev):
    """|N(u) ∩ N(v)| for each pair (eu[i], ev[i])."""
    out = np.zeros(len(eu), dtype=np.int64)
    for i in range(len(eu)):
        a = _row(indptr, indices, eu[i])
        b = _row(indptr, indices, ev[i])
        if len(a) > len(b):
            a, b = b, a
        if len(a) == 0:
            continue
        pos = np.searchsorted(b, a)
        pos[pos == len(b)] = len(b) - 1
        out[i] = int(np.count_nonzero(b[pos] == a))
    return out


def count_triangles(indptr, indices, eu, ev):
    """Number of triangles, via per-edge common-neighbor counts."""
    return int(common_neighbor_counts(indptr, indices, eu, ev).sum()) // 3


def lists_intersect(lptr, lcol, eu, ev):
    """1 where the color lists of the endpoints share a color."""
    n = len(lptr) - 1
    sets = [None] * n
    out = np.zeros(len(eu), dtype=np.uint8)
    for i in range(len(eu)):
        u = int(eu[i])
        v = int(ev[i])
        if sets[u] is None:
            sets[u] = frozenset(lcol[lptr[u] : lptr[u + 1]].tolist())
        if sets[v] is None:
            sets[v] = frozenset(lcol[lptr[v] : lptr[v + 1]].tolist())
        if not sets[u].isdisjoint(sets[v]):
            out[i] = 1
    return out


def c_degree_table(indptr, indices, lptr, lcol):
    """For every vertex v and color lcol[j] in its list, the number of
    neighbors u of v whose list also contains that color.  Aligned with lcol."""
    n = len(lptr) - 1
    table = np.zeros(len(lcol), dtype=np.int64)
    pos = [None] * n

    def positions(v):
        if pos[v] is None:
            base = lptr[v]
            pos[v] = {int(c): base + j for j, c in enumerate(lcol[base : lptr[v + 1]])}
        return pos[v]

    for u in range(n):
        pu = positions(u)
        for v in _row(indptr, indices, u):
            v = int(v)
            if v <= u:
                continue
            pv = positions(v)
            small, big = (pu, pv) if len(pu) <= len(pv) else (pv, pu)
            for c, j in small.items():
                k = big.get(c)
                if k is not None:
                    table[j] += 1
                    table[k] += 1
    return table


def greedy_fill(indptr, indices, lptr, lcol, order, colors):
    """Process `order`; give each vertex the lowest color in its list unused
    by already-colored neighbors.  Returns the first vertex with no available
    color, or -1.  `colors` (0 = uncolored) is updated in place."""
    for v in order:
        v = int(v)
        used = set()
        for u in _row(indptr, indices, v):
            c = colors[u]
            if c:
                used.add(int(c))
        chosen = 0
        for c in lcol[lptr[v] : lptr[v + 1]]:
            if int(c) not in used:
                chosen = int(c)
                break
        if chosen == 0:
            return v
        colors[v] = chosen
    return -1


def first_monochromatic(indptr, indices, colors):
    """Lexicographically first edge whose endpoints share a nonzero color,
    or (-1, -1)."""
    n = len(indptr) - 1
    for u in range(n):
        cu = colors[u]
        if cu == 0:
            continue
        for v in _row(indptr, indices, u):
            if v > u and colors[v] == cu:
                return int(u), int(v)
    return -1, -1
