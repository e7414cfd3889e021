"""Conflict graph: the edges whose endpoint lists intersect, with the
low-to-high degree orientation used to account its size."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .kernels import lists_intersect
from .palette import ListAssignment


@dataclass(frozen=True, eq=False)
class ConflictGraph:
    base: Graph
    eu: np.ndarray
    ev: np.ndarray
    indptr: np.ndarray   # conflict adjacency, CSR over the base vertex ids
    indices: np.ndarray

    @property
    def edge_count(self) -> int:
        return len(self.eu)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]


def _csr_from_pairs(n: int, eu: np.ndarray, ev: np.ndarray):
    both_u = np.concatenate([eu, ev])
    both_v = np.concatenate([ev, eu])
    order = np.lexsort((both_v, both_u))
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, both_u + 1, 1)
    return np.cumsum(indptr), both_v[order].astype(np.int64)


def build_conflict_graph(g: Graph, lists: ListAssignment) -> ConflictGraph:
    """Keep exactly the edges (u,v) with L(u) ∩ L(v) nonempty."""
    eu, ev = g.edges()
    mask = lists_intersect(lists.lptr, lists.lcol, eu, ev).astype(bool)
    ceu, cev = eu[mask], ev[mask]
    indptr, indices = _csr_from_pairs(g.n, ceu, cev)
    return ConflictGraph(base=g, eu=ceu, ev=cev, indptr=indptr, indices=indices)


def oriented_out_degrees(cg: ConflictGraph) -> np.ndarray:
    """Charge every conflict edge to its lower-degree endpoint (ties to the
    lower id); the charges sum to the conflict edge count."""
    deg = cg.base.degrees
    charges = np.zeros(cg.base.n, dtype=np.int64)
    if len(cg.eu) == 0:
        return charges
    du, dv = deg[cg.eu], deg[cg.ev]
    target = np.where(du < dv, cg.eu, np.where(dv < du, cg.ev, np.minimum(cg.eu, cg.ev)))
    np.add.at(charges, target, 1)
    return charges
