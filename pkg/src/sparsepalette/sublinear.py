"""Single-pass streaming and non-adaptive query-model simulators with exact
resource accounting.

Memory is accounted in words: one per stored edge, per stored list color,
and per degree record; `peak_words` tracks the maximum held at any time."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

import numpy as np

from . import rng
from .errors import MalformedInputError, ParameterError, PreconditionError
from .graphs import Graph, new_graph
from .palette import (
    GlobalPalette,
    DegPlusOnePalette,
    OneEpsDegPalette,
    PotentialListFamily,
    lists_from_rows,
    potential_lists,
    resolve_global,
    sample_lists,
    scale_floor,
)
from .pipelines import (
    od_list_size,
    od_palette_size,
    onedeg_list_size,
    solve_deg_plus_one_from_lists,
    solve_od_from_lists,
    solve_trifree_from_lists,
    trifree_list_size,
    trifree_palette_size,
)
from .solver import SolveOutcome, greedy_color

MODES = ("od", "trifree", "onedeg", "degp1")


@dataclass
class ResourceLedger:
    """Monotone counters; one word per stored edge, list color, or degree
    record."""

    stored_edges: int = 0
    degree_queries: int = 0
    neighbor_queries: int = 0
    pair_queries: int = 0
    peak_words: int = 0

    def count_stored(self, k: int = 1) -> None:
        self.stored_edges += k

    def count_degree(self, k: int) -> None:
        self.degree_queries += k

    def count_neighbor(self, k: int) -> None:
        self.neighbor_queries += k

    def count_pair(self, k: int) -> None:
        self.pair_queries += k

    def note_words(self, words: int) -> None:
        if words > self.peak_words:
            self.peak_words = words

    @property
    def total_queries(self) -> int:
        return self.degree_queries + self.neighbor_queries + self.pair_queries

    def snapshot(self) -> dict:
        return {
            "stored_edges": self.stored_edges,
            "degree_queries": self.degree_queries,
            "neighbor_queries": self.neighbor_queries,
            "pair_queries": self.pair_queries,
            "peak_words": self.peak_words,
        }


class EdgeStream:
    """One-shot forward-only edge sequence with the vertex count declared up
    front."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        self._edges = iter(edges)
        self._consumed = False

    @classmethod
    def from_file(cls, path: str) -> "EdgeStream":
        fh = open(path)
        head = fh.readline().split()
        if len(head) != 2:
            fh.close()
            raise MalformedInputError(f"{path}: line 1: expected 'n m'")
        n = int(head[0])

        def gen():
            with fh:
                for lineno, line in enumerate(fh, start=2):
                    if not line.strip():
                        continue
                    parts = line.split()
                    if len(parts) != 2:
                        raise MalformedInputError(f"{path}: line {lineno}: expected 'u v'")
                    yield int(parts[0]), int(parts[1])

        return cls(n, gen())

    @classmethod
    def from_graph(cls, g: Graph, reverse: bool = False) -> "EdgeStream":
        eu, ev = g.edges()
        pairs = list(zip(eu.tolist(), ev.tolist()))
        if reverse:
            pairs.reverse()
        return cls(g.n, pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        if self._consumed:
            raise RuntimeError("edge stream is forward-only and already consumed")
        self._consumed = True
        return self._edges


@dataclass
class SimulationResult:
    outcome: SolveOutcome
    ledger: ResourceLedger
    lists: Optional[object]
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_success(self) -> bool:
        return self.outcome.is_success


def _default_ell(mode: str, n: int, eps: float, gamma: float, delta_hint: Optional[int]) -> int:
    if mode == "degp1":
        return max(1, math.ceil(2.0 * math.log(max(n, 2))))
    if mode == "onedeg":
        return onedeg_list_size(n, eps)
    if mode == "od":
        return od_list_size(n, eps)
    if mode == "trifree":
        return trifree_list_size(n, delta_hint if delta_hint is not None else n - 1, gamma)
    raise ParameterError(f"unknown mode {mode!r}; expected one of {MODES}")


def _global_palette_size(mode: str, delta: int, eps: float, gamma: float) -> int:
    if mode == "od":
        return od_palette_size(max(delta, 1), eps)
    return trifree_palette_size(max(delta, 1), gamma)


def _running_floor(mode: str, r: int, eps: float) -> int:
    """Smallest plausible resolution scale given a degree lower bound r."""
    if mode == "degp1":
        return scale_floor(max(r, 1))
    # onedeg: palette tops out at ceil((1+eps)·deg)
    return scale_floor(max(1, math.ceil((1 + eps) * r)))


def _resolve_rows(
    family: PotentialListFamily,
    mode: str,
    degrees: np.ndarray,
    ell: int,
    eps: float,
    global_palette: Optional[int],
) -> tuple[list, int]:
    """Per-vertex resolved lists from final degrees; returns rows and the
    number that came up thin."""
    rows, thin = [], 0
    for v in range(len(degrees)):
        d = int(degrees[v])
        if mode == "degp1":
            top = d + 1
        elif mode == "onedeg":
            top = max(1, math.ceil((1 + eps) * d))
        else:
            top = global_palette
        resolved, ok = resolve_global(family, v, min(top, 1 << family.t), ell)
        rows.append(resolved.tolist())
        if not ok:
            thin += 1
    return rows, thin


def _solve_stored(
    mode: str,
    n: int,
    stored_pairs: list,
    rows: list,
    ell: int,
    seed: int,
    eps: float,
    gamma: float,
    delta: int,
    palette: Optional[int],
    decomposition_eps: float,
) -> tuple[SolveOutcome, object, dict]:
    """Run the mode's solver on the stored subgraph with the resolved lists."""
    g_stored = new_graph(n, stored_pairs)
    if mode == "degp1":
        lists = lists_from_rows(rows, DegPlusOnePalette(), ell)
        outcome, governing, diag = solve_deg_plus_one_from_lists(
            g_stored, lists, decomposition_eps, seed
        )
        return outcome, governing, {"solver": "degp1", **diag, "stored_graph_edges": g_stored.m}
    if mode == "onedeg":
        lists = lists_from_rows(rows, OneEpsDegPalette(eps), ell)
        outcome = greedy_color(g_stored, lists, np.arange(n, dtype=np.int64))
        return outcome, lists, {"solver": "greedy", "stored_graph_edges": g_stored.m}
    lists = lists_from_rows(rows, GlobalPalette(max(palette, 1)), ell)
    if mode == "od":
        outcome, diag = solve_od_from_lists(g_stored, lists, eps, seed)
        return outcome, lists, {"solver": "od", **diag, "stored_graph_edges": g_stored.m}
    outcome, diag = solve_trifree_from_lists(
        g_stored, lists, gamma, delta, palette, seed
    )
    return outcome, lists, {"solver": "trifree", **diag, "stored_graph_edges": g_stored.m}


def stream_color(
    stream: EdgeStream,
    mode: str,
    seed: int,
    *,
    eps: float = 0.2,
    gamma: float = 0.5,
    ell: Optional[int] = None,
    declared_delta: Optional[int] = None,
    decomposition_eps: float = 0.1,
) -> SimulationResult:
    """Single pass: keep an edge exactly when the endpoint lists can still
    collide, then solve on the stored subgraph with lists resolved from the
    final degrees.

    With a declared maximum degree, global modes sample concrete lists up
    front and the membership test is exact.  Otherwise potential palettes are
    sampled at every scale; an edge is kept while any scale pair plausible
    for the endpoints' running degree lower bounds intersects, and the kept
    set is pruned to the final-degree scales after the pass (so the stored
    set is a pure function of the lists and final degrees, not edge order)."""
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {MODES}")
    n = stream.n
    ledger = ResourceLedger()
    diag: dict = {"mode": mode, "n": n}
    if ell is None:
        ell = _default_ell(mode, n, eps, gamma, declared_delta)
    diag["ell"] = ell

    degrees = np.zeros(n, dtype=np.int64)
    is_global = mode in ("od", "trifree")

    if is_global and declared_delta is not None:
        palette = _global_palette_size(mode, declared_delta, eps, gamma)
        dummy = new_graph(n, [])
        lists = sample_lists(dummy, GlobalPalette(palette), ell, seed)
        sets = [frozenset(lists.colors(v).tolist()) for v in range(n)]
        base_words = n + len(lists.lcol)
        stored = []
        for u, v in stream:
            degrees[u] += 1
            degrees[v] += 1
            if not sets[u].isdisjoint(sets[v]):
                stored.append((u, v))
                ledger.count_stored()
            ledger.note_words(base_words + len(stored))
        delta = int(degrees.max()) if n else 0
        if declared_delta < delta:
            raise ParameterError(f"declared maximum degree {declared_delta} below actual {delta}")
        rows = [lists.colors(v).tolist() for v in range(n)]
        stored_final = stored
        diag["declared_delta"] = declared_delta
    else:
        family = potential_lists(n, ell, seed)
        # suffix[v][i] = bitmask of every color sampled at scales >= i
        suffix = []
        for v in range(n):
            per = [0] * (family.t + 2)
            acc = 0
            for i in range(family.t, 0, -1):
                row = family.rows[v][i - 1]
                if len(row):
                    bits = np.zeros(1 << family.t, dtype=np.uint8)
                    bits[row - 1] = 1
                    acc |= int.from_bytes(
                        np.packbits(bits, bitorder="little").tobytes(), "little"
                    )
                per[i] = acc
            suffix.append(per)
        base_words = n + family.total_colors()
        stored = []
        running_delta = 0
        for u, v in stream:
            degrees[u] += 1
            degrees[v] += 1
            running_delta = max(running_delta, int(degrees[u]), int(degrees[v]))
            if is_global:
                cap = min(_global_palette_size(mode, running_delta, eps, gamma), 1 << family.t)
                fu = fv = min(scale_floor(cap), family.t)
            else:
                fu = min(_running_floor(mode, int(degrees[u]), eps), family.t)
                fv = min(_running_floor(mode, int(degrees[v]), eps), family.t)
            if suffix[u][fu] & suffix[v][fv]:
                stored.append((u, v))
                ledger.count_stored()
            ledger.note_words(base_words + len(stored))
        delta = int(degrees.max()) if n else 0
        palette = (
            min(_global_palette_size(mode, delta, eps, gamma), 1 << family.t)
            if is_global
            else None
        )
        # prune with the final-degree scales: order-independent final set
        stored_final = []
        for u, v in stored:
            if is_global:
                fu = fv = min(scale_floor(palette), family.t)
            else:
                fu = min(_running_floor(mode, int(degrees[u]), eps), family.t)
                fv = min(_running_floor(mode, int(degrees[v]), eps), family.t)
            if suffix[u][fu] & suffix[v][fv]:
                stored_final.append((u, v))
        rows, thin = _resolve_rows(family, mode, degrees, ell, eps, palette)
        diag["thin_lists"] = thin

    diag["stored_total"] = ledger.stored_edges
    diag["stored_final"] = len(stored_final)
    diag["delta"] = delta

    if mode == "trifree":
        probe = new_graph(n, stored_final)
        from .graphs import count_triangles

        if count_triangles(probe) > 0:
            raise PreconditionError("stored subgraph contains a triangle")
    outcome, lists_out, solve_diag = _solve_stored(
        mode,
        n,
        stored_final,
        rows,
        ell,
        seed,
        eps,
        gamma,
        delta,
        palette if is_global else None,
        decomposition_eps,
    )
    diag.update(solve_diag)
    return SimulationResult(outcome=outcome, ledger=ledger, lists=lists_out, diagnostics=diag)


# ---------------------------------------------------------------------------
# Query model


class CountingOracle:
    """Degree / i-th neighbor / pair adjacency access, counted in batches."""

    def __init__(self, g: Graph, ledger: ResourceLedger):
        self._g = g
        self._ledger = ledger

    def degrees_all(self) -> np.ndarray:
        self._ledger.count_degree(self._g.n)
        return self._g.degrees.copy()

    def neighbor_block(self, v: int, count: int) -> np.ndarray:
        """Answers to `count` neighbor queries on v (clamped to deg(v))."""
        self._ledger.count_neighbor(count)
        return self._g.neighbors(v)[:count].copy()

    def pair_many(self, pairs: Iterable[tuple[int, int]]) -> list:
        out = []
        k = 0
        for u, v in pairs:
            k += 1
            out.append(self._g.has_edge(u, v))
        self._ledger.count_pair(k)
        return out

    def all_pairs_adjacent(self) -> list:
        """Answers to every unordered pair query: the full edge set."""
        n = self._g.n
        self._ledger.count_pair(n * (n - 1) // 2)
        eu, ev = self._g.edges()
        return list(zip(eu.tolist(), ev.tolist()))


def _pair_plan(family: PotentialListFamily, n: int, i0: int, ell: int):
    """The pair-query set: all (v,u) whose sampled scale-lists intersect at
    some scale pair at or above i0.  When a scale at or above i0 is fully
    sampled this is every pair (detected exactly, not enumerated)."""
    capped = any((1 << i) <= 10 * ell for i in range(i0, family.t + 1))
    masks = [family.union_mask(v, i0) for v in range(n)]
    if capped:
        return masks, None, n * (n - 1) // 2
    holders: dict[int, list] = {}
    for v in range(n):
        row_union = np.unique(
            np.concatenate([family.rows[v][i - 1] for i in range(i0, family.t + 1)])
        ) if family.t >= i0 else np.zeros(0, dtype=np.int64)
        for c in row_union.tolist():
            holders.setdefault(int(c), []).append(v)
    pairs = set()
    for c, vs in holders.items():
        for a in range(len(vs)):
            for b in range(a + 1, len(vs)):
                pairs.add((vs[a], vs[b]))
    return masks, sorted(pairs), len(pairs)


def query_color(
    g: Graph,
    mode: str,
    seed: int,
    *,
    eps: float = 0.2,
    gamma: float = 0.5,
    ell: Optional[int] = None,
    max_retries: int = 3,
    decomposition_eps: float = 0.1,
) -> SimulationResult:
    """Non-adaptive plan (degree, neighbor, pair queries fixed up front from
    the seed alone), then conflict-graph assembly from the answers and the
    mode's solver on it.  Thin resolved lists trigger a fresh-seed retry, at
    most `max_retries` times; every attempt's queries stay on the ledger."""
    if mode not in MODES:
        raise ParameterError(f"unknown mode {mode!r}; expected one of {MODES}")
    n = g.n
    ledger = ResourceLedger()
    diag: dict = {"mode": mode, "n": n}
    if ell is None:
        ell = _default_ell(mode, n, eps, gamma, None)
    diag["ell"] = ell
    nq = math.ceil(10.0 * math.sqrt(n))
    i0 = scale_floor(math.ceil(math.sqrt(n)))

    attempt = 0
    while True:
        aseed = seed if attempt == 0 else rng.derive_seed(seed, 7000 + attempt)
        family = potential_lists(n, ell, aseed)
        masks, pair_list, pair_count = _pair_plan(family, n, i0, ell)
        hasher = hashlib.sha256()
        hasher.update(f"{n}|{mode}|{ell}|{i0}|{nq}|".encode())
        width = (1 << family.t) // 8 + 1
        for m in masks:
            hasher.update(m.to_bytes(width, "little"))
        plan_hash = hasher.hexdigest()

        oracle = CountingOracle(g, ledger)
        degrees = oracle.degrees_all()
        neighbor_answers = [oracle.neighbor_block(v, nq) for v in range(n)]
        if pair_list is None:
            adjacent_pairs = oracle.all_pairs_adjacent()
        else:
            answers = oracle.pair_many(pair_list)
            adjacent_pairs = [p for p, hit in zip(pair_list, answers) if hit]
        delta = int(degrees.max()) if n else 0
        palette = (
            min(_global_palette_size(mode, delta, eps, gamma), 1 << family.t)
            if mode in ("od", "trifree")
            else None
        )
        rows, thin = _resolve_rows(family, mode, degrees, ell, eps, palette)
        if thin == 0 or attempt >= max_retries:
            break
        attempt += 1

    diag.update(
        {
            "plan_hash": plan_hash,
            "pair_plan_size": pair_count,
            "retries": attempt,
            "thin_lists": thin,
            "delta": delta,
            "neighbor_plan_per_vertex": nq,
        }
    )

    # conflict candidates: full neighborhoods of low-degree endpoints plus
    # adjacent queried pairs
    candidates = set()
    for v in range(n):
        if degrees[v] < nq:
            for u in neighbor_answers[v].tolist():
                candidates.add((min(v, u), max(v, u)))
    for u, v in adjacent_pairs:
        candidates.add((min(u, v), max(u, v)))
    row_sets = [frozenset(r) for r in rows]
    conflict = [(u, v) for u, v in sorted(candidates) if not row_sets[u].isdisjoint(row_sets[v])]
    ledger.count_stored(len(conflict))
    words = (
        n
        + family.total_colors()
        + sum(len(a) for a in neighbor_answers)
        + len(adjacent_pairs)
        + len(conflict)
    )
    ledger.note_words(words)
    diag["conflict_edges"] = len(conflict)

    if mode == "trifree":
        probe = new_graph(n, conflict)
        from .graphs import count_triangles

        if count_triangles(probe) > 0:
            raise PreconditionError("assembled subgraph contains a triangle")
    outcome, lists_out, solve_diag = _solve_stored(
        mode,
        n,
        conflict,
        rows,
        ell,
        seed,
        eps,
        gamma,
        delta,
        palette,
        decomposition_eps,
    )
    diag.update(solve_diag)
    return SimulationResult(outcome=outcome, ledger=ledger, lists=lists_out, diagnostics=diag)
