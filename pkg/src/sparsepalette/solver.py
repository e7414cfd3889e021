"""List-coloring engines: ordered greedy, resampling-based local-lemma search,
matching-based almost-clique coloring, and the universal verifier."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import rng
from .errors import ParameterError
from .graphs import Graph
from .kernels import first_monochromatic, greedy_fill, lists_intersect
from .palette import ListAssignment

DEFAULT_RESAMPLE_FACTOR = 1000


@dataclass(eq=False)
class Coloring:
    """Partial vertex -> color map; 0 encodes uncolored."""

    assignment: np.ndarray

    @classmethod
    def empty(cls, n: int) -> "Coloring":
        return cls(np.zeros(n, dtype=np.int64))

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def colored_count(self) -> int:
        return int(np.count_nonzero(self.assignment))

    def color_of(self, v: int) -> Optional[int]:
        c = int(self.assignment[v])
        return c if c else None

    def distinct_colors(self) -> int:
        used = self.assignment[self.assignment > 0]
        return len(np.unique(used))

    def copy(self) -> "Coloring":
        return Coloring(self.assignment.copy())


@dataclass(frozen=True)
class SolveOutcome:
    status: str                       # "success" | "abort" | "budget"
    coloring: Optional[Coloring] = None
    vertex: Optional[int] = None
    reason: Optional[str] = None
    steps: int = 0

    @property
    def is_success(self) -> bool:
        return self.status == "success"

    @classmethod
    def success(cls, coloring: Coloring, steps: int = 0) -> "SolveOutcome":
        return cls(status="success", coloring=coloring, steps=steps)

    @classmethod
    def abort(cls, vertex: int, reason: str) -> "SolveOutcome":
        return cls(status="abort", vertex=vertex, reason=reason)

    @classmethod
    def budget(cls, steps: int) -> "SolveOutcome":
        return cls(status="budget", steps=steps)


def verify_coloring(
    g: Graph, lists: Optional[ListAssignment], col: Coloring
) -> tuple[bool, Optional[tuple]]:
    """True iff no assigned-assigned edge is monochromatic and every assigned
    color sits in its vertex's list.  On failure reports the first violation
    as ("edge", u, v) or ("list", v)."""
    u, v = first_monochromatic(g.indptr, g.indices, col.assignment)
    if u != -1:
        return False, ("edge", u, v)
    if lists is not None:
        for w in range(g.n):
            c = int(col.assignment[w])
            if c and not lists.contains(w, c):
                return False, ("list", w)
    return True, None


def _assert_proper(g: Graph, lists: Optional[ListAssignment], col: Coloring) -> None:
    ok, violation = verify_coloring(g, lists, col)
    if not ok:
        raise AssertionError(f"solver produced an improper coloring: {violation}")


def greedy_color(
    g: Graph,
    lists: ListAssignment,
    order: Sequence[int],
    pre_colored: Optional[Coloring] = None,
) -> SolveOutcome:
    """Lowest available list color along `order`; Abort on exhaustion."""
    colors = pre_colored.assignment.copy() if pre_colored is not None else np.zeros(g.n, dtype=np.int64)
    order = np.asarray(order, dtype=np.int64)
    uncolored = set(np.nonzero(colors == 0)[0].tolist())
    if set(order.tolist()) != uncolored:
        raise ParameterError("order must be a permutation of the uncolored vertices")
    abort_at = greedy_fill(g.indptr, g.indices, lists.lptr, lists.lcol, order, colors)
    if abort_at != -1:
        return SolveOutcome.abort(int(abort_at), "list exhausted")
    out = Coloring(colors)
    _assert_proper(g, lists, out)
    return SolveOutcome.success(out)


def moser_tardos_list_color(
    g: Graph,
    lists: ListAssignment,
    max_resamples: Optional[int] = None,
    seed: int = 0,
) -> SolveOutcome:
    """Uniform initial colors, then repeatedly resample both endpoints of the
    lexicographically least monochromatic edge."""
    n = g.n
    if max_resamples is None:
        max_resamples = DEFAULT_RESAMPLE_FACTOR * max(n, 1)
    rows = [lists.colors(v) for v in range(n)]
    for v in range(n):
        if len(rows[v]) == 0:
            return SolveOutcome.abort(v, "empty list")
    colors = np.zeros(n, dtype=np.int64)
    for v in range(n):
        gen = rng.substream(seed, v, rng.MT_INIT)
        colors[v] = rows[v][gen.integers(len(rows[v]))]

    # only conflict edges can ever become monochromatic
    eu, ev = g.edges()
    mask = lists_intersect(lists.lptr, lists.lcol, eu, ev).astype(bool)
    ceu, cev = eu[mask], ev[mask]
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for a, b in zip(ceu.tolist(), cev.tolist()):
        adjacency[a].append(b)
        adjacency[b].append(a)

    heap = [(a, b) for a, b in zip(ceu.tolist(), cev.tolist()) if colors[a] == colors[b]]
    heapq.heapify(heap)
    resampler = rng.substream(seed, 0, rng.MT_RESAMPLE)
    steps = 0
    while heap:
        u, v = heapq.heappop(heap)
        if colors[u] != colors[v]:
            continue
        if steps >= max_resamples:
            return SolveOutcome.budget(steps)
        steps += 1
        colors[u] = rows[u][resampler.integers(len(rows[u]))]
        colors[v] = rows[v][resampler.integers(len(rows[v]))]
        for w in (u, v):
            for x in adjacency[w]:
                if colors[x] == colors[w]:
                    heapq.heappush(heap, (min(w, x), max(w, x)))
    out = Coloring(colors)
    _assert_proper(g, lists, out)
    return SolveOutcome.success(out, steps=steps)


def _hopcroft_karp(adj: list[list[int]], n_left: int, n_right: int) -> list[int]:
    """Maximum bipartite matching via layered augmenting paths.
    Returns match_left (right index or -1 per left vertex)."""
    INF = float("inf")
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    while True:
        dist = [INF] * n_left
        queue = [u for u in range(n_left) if match_l[u] == -1]
        for u in queue:
            dist[u] = 0
        found_free = False
        qi = 0
        while qi < len(queue):
            u = queue[qi]
            qi += 1
            for r in adj[u]:
                w = match_r[r]
                if w == -1:
                    found_free = True
                elif dist[w] is INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        if not found_free:
            break

        def try_augment(u: int) -> bool:
            for r in adj[u]:
                w = match_r[r]
                if w == -1 or (dist[w] == dist[u] + 1 and try_augment(w)):
                    match_l[u] = r
                    match_r[r] = u
                    return True
            dist[u] = INF
            return False

        for u in range(n_left):
            if match_l[u] == -1:
                try_augment(u)
    return match_l


def color_almost_clique(
    g: Graph,
    K: Sequence[int],
    lists: ListAssignment,
    blocked: Mapping[int, Iterable[int]],
    backtrack_budget: int = 10**6,
) -> SolveOutcome:
    """Proper coloring of G[K] from L(v) minus the blocked colors.

    Strategy ladder: all-distinct colors via maximum bipartite matching;
    then bounded backtracking that may reuse colors on non-adjacent pairs;
    then greedy in decreasing-degree order."""
    members = sorted(int(v) for v in K)
    residual = {}
    for v in members:
        r = sorted(set(lists.colors(v).tolist()) - set(int(c) for c in blocked.get(v, ())))
        if not r:
            return SolveOutcome.abort(v, "no residual colors")
        residual[v] = r

    color_ids = sorted({c for r in residual.values() for c in r})
    color_index = {c: i for i, c in enumerate(color_ids)}
    adj = [[color_index[c] for c in residual[v]] for v in members]
    match = _hopcroft_karp(adj, len(members), len(color_ids))
    if all(r != -1 for r in match):
        colors = np.zeros(g.n, dtype=np.int64)
        for u, r in enumerate(match):
            colors[members[u]] = color_ids[r]
        out = Coloring(colors)
        assert len({int(out.assignment[v]) for v in members}) == len(members)
        _assert_proper(g, lists, out)
        return SolveOutcome.success(out)

    # matching failed: allow repeated colors on non-adjacent pairs inside K
    member_set = set(members)
    inner = {v: [int(u) for u in g.neighbors(v) if int(u) in member_set] for v in members}
    colors = np.zeros(g.n, dtype=np.int64)
    budget = [backtrack_budget]

    def extend(i: int) -> bool:
        if budget[0] <= 0:
            return False
        budget[0] -= 1
        if i == len(members):
            return True
        v = members[i]
        for c in residual[v]:
            if all(colors[u] != c for u in inner[v]):
                colors[v] = c
                if extend(i + 1):
                    return True
                colors[v] = 0
        return False

    if extend(0):
        out = Coloring(colors)
        _assert_proper(g, lists, out)
        return SolveOutcome.success(out)
    if budget[0] > 0:
        return SolveOutcome.abort(members[0], "no proper coloring of the block")

    # budget exceeded: greedy, largest degree first
    colors[:] = 0
    by_degree = sorted(members, key=lambda v: (-g.degree(v), v))
    for v in by_degree:
        used = {int(colors[u]) for u in inner[v] if colors[u]}
        pick = next((c for c in residual[v] if c not in used), None)
        if pick is None:
            return SolveOutcome.abort(v, "greedy exhausted residual colors")
        colors[v] = pick
    out = Coloring(colors)
    _assert_proper(g, lists, out)
    return SolveOutcome.success(out)
