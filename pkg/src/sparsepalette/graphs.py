"""Immutable CSR graphs, seeded generators, degeneracy ordering, and
small-instance brute-force oracles."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from . import rng
from .errors import BudgetError, MalformedInputError
from .kernels import common_neighbor_counts, count_triangles as _tri_kernel

BRUTE_FORCE_LIMIT = 24


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph in CSR form; neighbor rows sorted ascending."""

    indptr: np.ndarray
    indices: np.ndarray
    _edges: tuple = field(repr=False, default=None)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """All edges as (eu, ev) with eu < ev, lexicographically sorted."""
        if self._edges is None:
            eu = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
            keep = self.indices > eu
            object.__setattr__(self, "_edges", (eu[keep], self.indices[keep].astype(np.int64)))
        return self._edges

    def subgraph(self, vertices: np.ndarray) -> tuple["Graph", np.ndarray]:
        """Induced subgraph on `vertices` plus the local->global id map."""
        vertices = np.asarray(sorted(int(v) for v in vertices), dtype=np.int64)
        local = -np.ones(self.n, dtype=np.int64)
        local[vertices] = np.arange(len(vertices))
        eu, ev = self.edges()
        keep = (local[eu] >= 0) & (local[ev] >= 0)
        pairs = list(zip(local[eu[keep]].tolist(), local[ev[keep]].tolist()))
        return new_graph(len(vertices), pairs), vertices

    def validate(self) -> None:
        """Structural invariants: sorted rows, symmetry, no loops/duplicates."""
        for v in range(self.n):
            row = self.neighbors(v)
            if len(row) and (np.any(np.diff(row) <= 0) or row[0] < 0 or row[-1] >= self.n):
                raise MalformedInputError(f"bad adjacency row at vertex {v}")
            if np.any(row == v):
                raise MalformedInputError(f"self-loop at vertex {v}")
            for u in row:
                if not self.has_edge(int(u), v):
                    raise MalformedInputError(f"asymmetric edge ({v},{u})")
        if len(self.indices) % 2:
            raise MalformedInputError("odd total adjacency length")


@dataclass(frozen=True)
class DegeneracyResult:
    order: np.ndarray        # coloring order; preceding neighbors of v number kappa_v[v]
    kappa: int
    kappa_v: np.ndarray      # back-degree along `order`, indexed by vertex id


def _from_pair_arrays(n: int, eu: np.ndarray, ev: np.ndarray) -> Graph:
    both_u = np.concatenate([eu, ev])
    both_v = np.concatenate([ev, eu])
    order = np.lexsort((both_v, both_u))
    both_u, both_v = both_u[order], both_v[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, both_u + 1, 1)
    indptr = np.cumsum(indptr)
    g = Graph(indptr, both_v.astype(np.int64))
    object.__setattr__(g, "_edges", (eu.astype(np.int64), ev.astype(np.int64)))
    return g


def new_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a graph from vertex pairs; duplicates collapse, loops rejected."""
    if n < 0:
        raise MalformedInputError("negative vertex count")
    eu, ev = [], []
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise MalformedInputError(f"self-loop ({u},{u})")
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedInputError(f"vertex out of range in ({u},{v})")
        if u > v:
            u, v = v, u
        eu.append(u)
        ev.append(v)
    if eu:
        enc = np.unique(np.asarray(eu, dtype=np.int64) * n + np.asarray(ev, dtype=np.int64))
        eu_arr, ev_arr = enc // n, enc % n
    else:
        eu_arr = ev_arr = np.zeros(0, dtype=np.int64)
    return _from_pair_arrays(n, eu_arr, ev_arr)


def gnp(n: int, p: float, seed: int) -> Graph:
    """Erdős–Rényi G(n,p), bit-reproducible for a fixed seed."""
    if not 0.0 <= p <= 1.0:
        raise MalformedInputError(f"edge probability {p} outside [0,1]")
    gen = rng.substream(seed, 0, rng.GNP)
    eu_parts, ev_parts = [], []
    for u in range(n - 1):
        draws = gen.random(n - u - 1)
        hits = np.nonzero(draws < p)[0]
        if len(hits):
            eu_parts.append(np.full(len(hits), u, dtype=np.int64))
            ev_parts.append(hits.astype(np.int64) + u + 1)
    if eu_parts:
        eu = np.concatenate(eu_parts)
        ev = np.concatenate(ev_parts)
    else:
        eu = ev = np.zeros(0, dtype=np.int64)
    return _from_pair_arrays(n, eu, ev)


def gnp_triangle_free(n: int, p: float, seed: int) -> Graph:
    """G(n,p) with every edge that lay on a triangle of the realization removed."""
    g = gnp(n, p, seed)
    eu, ev = g.edges()
    on_triangle = common_neighbor_counts(g.indptr, g.indices, eu, ev) > 0
    return _from_pair_arrays(n, eu[~on_triangle], ev[~on_triangle])


def clique_collection(ell: int, k: int) -> Graph:
    """k disjoint copies of the complete graph on ell+1 vertices."""
    if ell < 1 or k < 1:
        raise MalformedInputError("clique_collection needs ell >= 1 and k >= 1")
    size = ell + 1
    eu, ev = [], []
    for block in range(k):
        base = block * size
        for i in range(size):
            for j in range(i + 1, size):
                eu.append(base + i)
                ev.append(base + j)
    return _from_pair_arrays(k * size, np.asarray(eu, dtype=np.int64), np.asarray(ev, dtype=np.int64))


def count_triangles(g: Graph) -> int:
    eu, ev = g.edges()
    return _tri_kernel(g.indptr, g.indices, eu, ev)


def degeneracy_order(g: Graph) -> DegeneracyResult:
    """Repeated minimum-remaining-degree elimination, ties to the lowest id.

    `order` is the reversed elimination sequence, so the neighbors of v that
    precede v in `order` are exactly the kappa_v[v] ones remaining when v was
    eliminated."""
    n = g.n
    remaining_deg = g.degrees.astype(np.int64).copy()
    removed = np.zeros(n, dtype=bool)
    heap = [(int(remaining_deg[v]), v) for v in range(n)]
    heapq.heapify(heap)
    elim = []
    removal_deg = np.zeros(n, dtype=np.int64)
    while heap:
        d, v = heapq.heappop(heap)
        if removed[v] or d != remaining_deg[v]:
            continue
        removed[v] = True
        removal_deg[v] = d
        elim.append(v)
        for u in g.neighbors(v):
            u = int(u)
            if not removed[u]:
                remaining_deg[u] -= 1
                heapq.heappush(heap, (int(remaining_deg[u]), u))
    order = np.asarray(elim[::-1], dtype=np.int64)
    kappa = int(removal_deg.max()) if n else 0
    return DegeneracyResult(order=order, kappa=kappa, kappa_v=removal_deg)


def brute_force_list_color(g: Graph, lists) -> Optional["Coloring"]:
    """Exhaustive backtracking list-coloring oracle (lexicographic order).

    Returns the first coloring in lexicographic search order, or None."""
    from .solver import Coloring

    if g.n > BRUTE_FORCE_LIMIT:
        raise BudgetError(f"brute force limited to n <= {BRUTE_FORCE_LIMIT}")
    colors = np.zeros(g.n, dtype=np.int64)
    rows = [lists.colors(v).tolist() for v in range(g.n)]
    adj = [g.neighbors(v).tolist() for v in range(g.n)]

    def extend(v: int) -> bool:
        if v == g.n:
            return True
        for c in rows[v]:
            if all(colors[u] != c for u in adj[v] if u < v):
                colors[v] = c
                if extend(v + 1):
                    return True
                colors[v] = 0
        return False

    return Coloring(colors) if extend(0) else None


def max_independent_set(g: Graph) -> int:
    """Exact maximum independent set size by branching on the lowest vertex."""
    if g.n > BRUTE_FORCE_LIMIT:
        raise BudgetError(f"exhaustive search limited to n <= {BRUTE_FORCE_LIMIT}")
    closed = [1 << v for v in range(g.n)]
    for v in range(g.n):
        for u in g.neighbors(v):
            closed[v] |= 1 << int(u)
    memo: dict[int, int] = {}

    def best(mask: int) -> int:
        if mask == 0:
            return 0
        got = memo.get(mask)
        if got is not None:
            return got
        v = (mask & -mask).bit_length() - 1
        res = max(best(mask & ~(1 << v)), 1 + best(mask & ~closed[v]))
        memo[mask] = res
        return res

    return best((1 << g.n) - 1)


def save_edge_list(g: Graph, path: str) -> None:
    """Write the "n m" header plus one "u v" line per edge."""
    eu, ev = g.edges()
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in zip(eu.tolist(), ev.tolist()):
            fh.write(f"{u} {v}\n")


def load_edge_list(path: str) -> Graph:
    """Parse the edge-list format, reporting the offending line on error."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise MalformedInputError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2:
        raise MalformedInputError(f"{path}: line 1: expected 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError:
        raise MalformedInputError(f"{path}: line 1: expected integers 'n m'") from None
    pairs = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedInputError(f"{path}: line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedInputError(f"{path}: line {lineno}: expected integers") from None
        if u == v or not (0 <= u < n and 0 <= v < n):
            raise MalformedInputError(f"{path}: line {lineno}: bad edge ({u},{v})")
        pairs.append((u, v))
    if len(pairs) != m:
        raise MalformedInputError(f"{path}: header declares {m} edges, found {len(pairs)}")
    return new_graph(n, pairs)


def independent_set_bound(n: int, p: float) -> float:
    """3·ln(np)/p, the high-probability ceiling used in generator checks."""
    return 3.0 * math.log(n * p) / p
