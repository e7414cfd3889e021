"""Local-degree graph decomposition: balanced/friend edges, dense vertices,
almost-clique blocks, and sparse/uneven classification, with a clause-by-
clause verifier.

The decomposition runs on the induced subgraph left after routing vertices
below the minimum-degree floor to `low_degree`; all degree quantities below
refer to that subgraph."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ParameterError
from .graphs import Graph
from .kernels import common_neighbor_counts


@dataclass(frozen=True, eq=False)
class FriendEdgeSet:
    theta: float
    eu: np.ndarray          # friend edges, u < v
    ev: np.ndarray
    dense: np.ndarray       # bool per vertex

    @property
    def edge_count(self) -> int:
        return len(self.eu)


@dataclass(frozen=True, eq=False)
class Decomposition:
    eps: float
    d_min: int
    uneven: np.ndarray              # sorted vertex ids
    sparse: np.ndarray
    cliques: tuple                  # tuple of sorted vertex-id arrays
    clique_deltas: tuple            # max (reduced-graph) degree per block
    low_degree: np.ndarray

    def label_of(self) -> list[str]:
        labels = [""] * self._n()
        for v in self.uneven.tolist():
            labels[v] = "uneven"
        for v in self.sparse.tolist():
            labels[v] = "sparse"
        for v in self.low_degree.tolist():
            labels[v] = "low"
        for i, block in enumerate(self.cliques):
            for v in block.tolist():
                labels[v] = f"K{i}"
        return labels

    def _n(self) -> int:
        parts = [self.uneven, self.sparse, self.low_degree, *self.cliques]
        return int(max((arr.max() for arr in parts if len(arr)), default=-1)) + 1

    def to_text(self) -> str:
        return "\n".join(f"{v}: {label}" for v, label in enumerate(self.label_of())) + "\n"


def friend_edges(g: Graph, theta: float) -> FriendEdgeSet:
    """Balanced edges sharing a (1-theta) fraction of the smaller neighborhood,
    and the vertices mostly covered by such edges."""
    if not 0 < theta < 1:
        raise ParameterError("theta must lie in (0,1)")
    deg = g.degrees.astype(np.int64)
    eu, ev = g.edges()
    du, dv = deg[eu], deg[ev]
    lo = np.minimum(du, dv)
    hi = np.maximum(du, dv)
    balanced = lo >= (1.0 - theta) * hi
    common = np.zeros(len(eu), dtype=np.int64)
    if balanced.any():
        common[balanced] = common_neighbor_counts(g.indptr, g.indices, eu[balanced], ev[balanced])
    friend = balanced & (common >= (1.0 - theta) * lo)
    feu, fev = eu[friend], ev[friend]
    incident = np.zeros(g.n, dtype=np.int64)
    np.add.at(incident, feu, 1)
    np.add.at(incident, fev, 1)
    dense = incident >= (1.0 - theta) * deg
    dense &= deg > 0
    return FriendEdgeSet(theta=theta, eu=feu, ev=fev, dense=dense)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def _neighborhood_edge_counts(g: Graph) -> np.ndarray:
    """Edges inside N(v), for every v: half the sum of common-neighbor counts
    over v's incident edges."""
    eu, ev = g.edges()
    common = common_neighbor_counts(g.indptr, g.indices, eu, ev)
    acc = np.zeros(g.n, dtype=np.int64)
    np.add.at(acc, eu, common)
    np.add.at(acc, ev, common)
    return acc // 2


def default_d_min(n: int, eps: float, alpha: float = 1.0) -> int:
    """Minimum-degree floor alpha·eps^10·ln n, floored at 1."""
    if n <= 1:
        return 1
    return max(1, math.ceil(alpha * eps**10 * math.log(n)))


def decompose(g: Graph, eps: float, d_min: Optional[int] = None, alpha: float = 1.0) -> Decomposition:
    """Partition V into low-degree / almost-clique / sparse / uneven sets.

    Components of the friend-edge subgraph at theta = 4·eps that contain a
    vertex dense at eps itself become blocks; every other (non-low) vertex is
    classified sparse when its neighborhood misses enough edges, else uneven."""
    if not 0 < eps < 0.25:
        raise ParameterError("eps must lie in (0, 1/4) so the friend-edge scale 4·eps stays below 1")
    if d_min is None:
        d_min = default_d_min(g.n, eps, alpha)
    deg_full = g.degrees
    low = np.nonzero(deg_full < d_min)[0].astype(np.int64)
    high = np.nonzero(deg_full >= d_min)[0].astype(np.int64)
    sub, back = g.subgraph(high)

    theta = 4.0 * eps
    friends = friend_edges(sub, theta)
    eps_dense = friend_edges(sub, eps).dense

    uf = _UnionFind(sub.n)
    for a, b in zip(friends.eu.tolist(), friends.ev.tolist()):
        if friends.dense[a] and friends.dense[b]:
            uf.union(a, b)
    components: dict[int, list[int]] = {}
    for v in range(sub.n):
        if friends.dense[v]:
            components.setdefault(uf.find(v), []).append(v)

    sub_deg = sub.degrees
    blocks = []
    in_block = np.zeros(sub.n, dtype=bool)
    for root in sorted(components):
        members = components[root]
        if any(eps_dense[v] for v in members):
            blocks.append(np.asarray(sorted(members), dtype=np.int64))
            in_block[members] = True

    nbhd_edges = _neighborhood_edge_counts(sub)
    sparse, uneven = [], []
    half = eps / 2.0
    for v in range(sub.n):
        if in_block[v]:
            continue
        d = int(sub_deg[v])
        non_edges = d * (d - 1) // 2 - int(nbhd_edges[v])
        if non_edges >= half * half * d * (d - 1) / 2.0:
            sparse.append(v)
        else:
            uneven.append(v)

    deltas = tuple(int(sub_deg[b].max()) for b in blocks)
    return Decomposition(
        eps=eps,
        d_min=int(d_min),
        uneven=back[np.asarray(uneven, dtype=np.int64)] if uneven else np.zeros(0, dtype=np.int64),
        sparse=back[np.asarray(sparse, dtype=np.int64)] if sparse else np.zeros(0, dtype=np.int64),
        cliques=tuple(back[b] for b in blocks),
        clique_deltas=deltas,
        low_degree=low,
    )


def verify_decomposition(g: Graph, d: Decomposition) -> list[tuple[int, str]]:
    """Check every clause of every block and every classified vertex by direct
    counting; empty report = valid."""
    report: list[tuple[int, str]] = []
    eps = d.eps

    parts = [("uneven", d.uneven), ("sparse", d.sparse), ("low", d.low_degree)]
    parts += [(f"K{i}", blk) for i, blk in enumerate(d.cliques)]
    seen = np.zeros(g.n, dtype=np.int64)
    for _, arr in parts:
        seen[arr] += 1
    for v in np.nonzero(seen != 1)[0].tolist():
        report.append((int(v), "partition"))

    for v in d.low_degree.tolist():
        if g.degree(v) >= d.d_min:
            report.append((v, "low-degree routing"))

    high = np.asarray(sorted(set(range(g.n)) - set(d.low_degree.tolist())), dtype=np.int64)
    sub, back = g.subgraph(high)
    local = {int(x): i for i, x in enumerate(back.tolist())}
    sub_deg = sub.degrees
    nbhd_edges = _neighborhood_edge_counts(sub)

    for i, blk in enumerate(d.cliques):
        members_local = [local[int(v)] for v in blk.tolist()]
        member_set = set(members_local)
        delta_k = max(int(sub_deg[v]) for v in members_local)
        size = len(members_local)
        if not ((1 - eps) * delta_k <= size <= (1 + 8 * eps) * delta_k):
            for v in blk.tolist():
                report.append((int(v), f"K{i} clause (ii) size"))
        for lv, v in zip(members_local, blk.tolist()):
            deg_v = int(sub_deg[lv])
            inside = sum(1 for u in sub.neighbors(lv) if int(u) in member_set)
            if deg_v < (1 - 8 * eps) * delta_k:
                report.append((int(v), f"K{i} clause (i) degree"))
            if (size - 1 - inside) > 8 * eps * delta_k:
                report.append((int(v), f"K{i} clause (iii) non-neighbors"))
            if (deg_v - inside) > 9 * eps * delta_k:
                report.append((int(v), f"K{i} clause (iv) out-neighbors"))

    half = eps / 2.0
    for v in d.sparse.tolist():
        lv = local[int(v)]
        dd = int(sub_deg[lv])
        non_edges = dd * (dd - 1) // 2 - int(nbhd_edges[lv])
        if non_edges < half * half * dd * (dd - 1) / 2.0:
            report.append((int(v), "sparse predicate"))

    quarter = eps / 4.0
    for v in d.uneven.tolist():
        lv = local[int(v)]
        dd = int(sub_deg[lv])
        bigger = sum(1 for u in sub.neighbors(lv) if dd < (1 - quarter) * int(sub_deg[u]))
        if bigger < quarter * dd:
            report.append((int(v), "uneven predicate"))

    return report
