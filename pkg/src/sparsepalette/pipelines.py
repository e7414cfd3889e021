"""End-to-end coloring pipelines over sampled palettes, plus the
lower-bound demonstrator for small sampled lists."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .decompose import Decomposition, decompose, default_d_min
from .errors import ParameterError, PreconditionError
from .graphs import Graph, brute_force_list_color, count_triangles, degeneracy_order
from .nibble import DEFAULT_D_FLOOR, nibble_schedule, run_nibble
from .palette import (
    DegeneracyPalette,
    DegPlusOnePalette,
    GlobalPalette,
    ListAssignment,
    OneEpsDegPalette,
    lists_from_rows,
    sample_lists,
)
from .solver import (
    Coloring,
    SolveOutcome,
    color_almost_clique,
    greedy_color,
    moser_tardos_list_color,
    verify_coloring,
)

BRUTE_FORCE_FALLBACK_LIMIT = 24


@dataclass
class PipelineResult:
    outcome: SolveOutcome
    lists: Optional[ListAssignment]      # the governing lists for verification
    diagnostics: dict = field(default_factory=dict)

    @property
    def is_success(self) -> bool:
        return self.outcome.is_success

    def verify(self, g: Graph) -> bool:
        if not self.outcome.is_success:
            return False
        ok, _ = verify_coloring(g, self.lists, self.outcome.coloring)
        return ok


def _ln(n: int) -> float:
    return math.log(max(n, 2))


def od_list_size(n: int, eps: float, constant: float = 20.0) -> int:
    return max(1, math.ceil(constant * math.sqrt(_ln(n)) / eps**1.5))


def od_palette_size(delta: int, eps: float) -> int:
    return max(1, math.ceil((1 + eps) * delta))


def trifree_palette_size(delta: float, gamma: float) -> int:
    if delta < 3:
        return int(delta) + 1
    return max(1, math.ceil(9.0 * delta / (gamma * math.log(delta))))


def trifree_list_size(
    n: int, delta: int, gamma: float, b: float = 1.0, sqrt_log: bool = False
) -> int:
    tail = math.sqrt(_ln(n)) if sqrt_log else _ln(n)
    return max(1, math.ceil(b * (delta**gamma + tail)))


def onedeg_list_size(n: int, eps: float) -> int:
    return max(1, math.ceil((10.0 / eps) * _ln(n)))


def degp1_list_size(n: int, factor: float = 3.0) -> int:
    return max(4, math.ceil(factor * _ln(n)))


# ---------------------------------------------------------------------------
# (1+eps)·Delta coloring


def solve_od_from_lists(
    g: Graph,
    lists: ListAssignment,
    eps: float,
    seed: int,
    resample_factor: int = 1000,
) -> tuple[SolveOutcome, dict]:
    """Trim over-subscribed colors, then attack the conflict graph with the
    resampling solver; brute force rescues tiny instances."""
    from .palette import trim_bad_colors

    trimmed, removed = trim_bad_colors(g, lists, eps, lists.ell)
    diag = {
        "trim_removed_max": int(removed.max()) if g.n else 0,
        "trim_removed_mean": float(removed.mean()) if g.n else 0.0,
        "solver": "moser-tardos",
    }
    outcome = moser_tardos_list_color(
        g, trimmed, max_resamples=resample_factor * max(g.n, 1), seed=seed
    )
    if not outcome.is_success and g.n <= BRUTE_FORCE_FALLBACK_LIMIT:
        found = brute_force_list_color(g, trimmed)
        if found is not None:
            diag["solver"] = "brute-force"
            outcome = SolveOutcome.success(found)
    return outcome, diag


def color_one_eps_delta(
    g: Graph,
    eps: float,
    seed: int,
    ell: Optional[int] = None,
    ell_constant: float = 20.0,
    resample_factor: int = 1000,
) -> PipelineResult:
    """Sample small lists from a palette of (1+eps)·Delta colors and solve."""
    if not 0 < eps < 0.5:
        raise ParameterError("eps must lie in (0, 1/2)")
    delta = g.max_degree
    if delta < 1:
        raise ParameterError("graph must contain at least one edge")
    palette = od_palette_size(delta, eps)
    if ell is None:
        ell = od_list_size(g.n, eps, ell_constant)
    lists = sample_lists(g, GlobalPalette(palette), ell, seed)
    outcome, diag = solve_od_from_lists(g, lists, eps, seed, resample_factor)
    diag.update({"palette": palette, "ell": ell, "delta": delta})
    return PipelineResult(outcome=outcome, lists=lists, diagnostics=diag)


# ---------------------------------------------------------------------------
# Triangle-free coloring


def solve_trifree_from_lists(
    g: Graph,
    lists: ListAssignment,
    gamma: float,
    delta: int,
    palette: int,
    seed: int,
    d_floor: float = DEFAULT_D_FLOOR,
    resample_factor: int = 1000,
) -> tuple[SolveOutcome, dict]:
    n = g.n
    ell_eff = min(lists.ell, palette)
    d = 1.1 * (ell_eff / palette) * delta if palette else 0.0
    diag = {"palette": palette, "ell": lists.ell, "delta": delta, "d": d}
    if palette >= delta + 1 or d < d_floor:
        diag["mode"] = "greedy-bypass"
        outcome = greedy_color(g, lists, np.arange(n, dtype=np.int64))
        return outcome, diag

    diag["mode"] = "nibble"
    schedule = nibble_schedule(d, d_floor)
    state = run_nibble(g, lists, schedule, seed)
    diag["nibble_rounds"] = state.round_index - 1
    diag["nibble_colored"] = state.coloring.colored_count
    remaining = sorted(state.remaining)
    if not remaining:
        return SolveOutcome.success(state.coloring), diag
    for v in remaining:
        if len(state.lists[v]) == 0:
            return SolveOutcome.abort(v, "empty residual list after nibble"), diag
    sub, back = g.subgraph(np.asarray(remaining, dtype=np.int64))
    rows = [state.lists[int(v)].tolist() for v in back.tolist()]
    sub_lists = lists_from_rows(rows, lists.spec, lists.ell)
    finish = moser_tardos_list_color(
        sub, sub_lists, max_resamples=resample_factor * max(sub.n, 1), seed=rng.derive_seed(seed, 1)
    )
    if not finish.is_success:
        if finish.vertex is not None:
            finish = SolveOutcome(
                status=finish.status,
                vertex=int(back[finish.vertex]),
                reason=finish.reason,
                steps=finish.steps,
            )
        return finish, diag
    colors = state.coloring.assignment.copy()
    colors[back] = finish.coloring.assignment
    return SolveOutcome.success(Coloring(colors)), diag


def color_triangle_free(
    g: Graph,
    gamma: float,
    seed: int,
    b: float = 1.0,
    ell: Optional[int] = None,
    sqrt_log: bool = False,
    d_floor: float = DEFAULT_D_FLOOR,
    resample_factor: int = 1000,
) -> PipelineResult:
    """Iterative partial coloring over a Delta/ln(Delta)-sized palette; the
    palette must belong to a triangle-free graph."""
    if not 0 < gamma < 1:
        raise ParameterError("gamma must lie in (0,1)")
    if count_triangles(g) > 0:
        raise PreconditionError("graph contains a triangle")
    delta = g.max_degree
    if delta == 0:
        coloring = Coloring(np.ones(g.n, dtype=np.int64))
        lists = lists_from_rows([[1]] * g.n, GlobalPalette(1), 1)
        return PipelineResult(SolveOutcome.success(coloring), lists, {"mode": "trivial"})
    palette = trifree_palette_size(delta, gamma)
    if ell is None:
        ell = trifree_list_size(g.n, delta, gamma, b, sqrt_log)
    lists = sample_lists(g, GlobalPalette(palette), ell, seed)
    outcome, diag = solve_trifree_from_lists(
        g, lists, gamma, delta, palette, seed, d_floor, resample_factor
    )
    return PipelineResult(outcome=outcome, lists=lists, diagnostics=diag)


# ---------------------------------------------------------------------------
# (deg+1) coloring


def _split_batches(lists: ListAssignment, vertices: Sequence[int], seed: int):
    """Random disjoint sub-lists per vertex: one first-step color, then two
    halves for the greedy and almost-clique phases."""
    batch_a, batch_b, batch_c = {}, {}, {}
    for v in vertices:
        row = lists.colors(v)
        perm = rng.substream(seed, v, rng.BATCH_SPLIT).permutation(len(row))
        shuffled = row[perm]
        rest = shuffled[1:]
        half = math.ceil(len(rest) / 2)
        batch_a[v] = int(shuffled[0]) if len(shuffled) else 0
        batch_b[v] = sorted(int(c) for c in rest[:half])
        batch_c[v] = sorted(int(c) for c in rest[half:])
    return batch_a, batch_b, batch_c


def solve_deg_plus_one_from_lists(
    g: Graph,
    lists: ListAssignment,
    eps: float,
    seed: int,
    dec: Optional[Decomposition] = None,
    alpha: float = 1.0,
) -> tuple[SolveOutcome, ListAssignment, dict]:
    """Two-step coloring of sparse/uneven vertices, matching-based coloring
    of almost-clique blocks, greedy finish for low-degree vertices.

    Vertices whose whole palette fits in the sample (deg+1 <= ell) are routed
    to the low-degree finish, where they color greedily from the full range.
    Returns (outcome, governing lists, diagnostics)."""
    n = g.n
    ell = lists.ell
    d_min = max(default_d_min(n, eps, alpha), ell)
    if dec is None:
        dec = decompose(g, eps, d_min=d_min)
    low = set(dec.low_degree.tolist())
    sparse_uneven = set(dec.sparse.tolist()) | set(dec.uneven.tolist())
    main = [v for v in range(n) if v not in low]
    batch_a, batch_b, batch_c = _split_batches(lists, main, seed)

    diag = {
        "eps": eps,
        "ell": ell,
        "d_min": dec.d_min,
        "blocks": len(dec.cliques),
        "sparse": len(dec.sparse),
        "uneven": len(dec.uneven),
        "low": len(dec.low_degree),
    }

    # first step: sparse activation, keep a color only if no processed
    # neighbor holds it
    psi = eps * eps / 32.0
    p_active = psi / 16.0
    colors = np.zeros(n, dtype=np.int64)
    activated = 0
    for v in main:
        gen = rng.substream(seed, v, rng.ACTIVATE)
        if gen.random() >= p_active:
            continue
        activated += 1
        c = batch_a[v]
        if c and all(colors[u] != c for u in g.neighbors(v)):
            colors[v] = c
    diag["first_step_activated"] = activated
    diag["first_step_colored"] = int(np.count_nonzero(colors))

    # keep only sparse/uneven first-step colors
    for v in main:
        if colors[v] and v not in sparse_uneven:
            colors[v] = 0

    # second step: greedy over the uncolored sparse/uneven vertices
    for v in sorted(sparse_uneven):
        if colors[v]:
            continue
        used = {int(colors[u]) for u in g.neighbors(v) if colors[u]}
        pick = next((c for c in batch_b[v] if c not in used), None)
        if pick is None:
            return (
                SolveOutcome.abort(v, "second-step list exhausted"),
                lists,
                diag,
            )
        colors[v] = pick
    diag["second_step_colored"] = int(np.count_nonzero(colors))

    # almost-cliques, one block at a time, against already-used outside colors
    clique_lists = lists_from_rows(
        [batch_c.get(v, []) if v not in low else [] for v in range(n)], lists.spec, ell
    )
    for i, block in enumerate(dec.cliques):
        block_set = set(block.tolist())
        blocked = {}
        for v in block.tolist():
            v = int(v)
            blocked[v] = {
                int(colors[u]) for u in g.neighbors(v) if colors[u] and int(u) not in block_set
            }
        sub_outcome = color_almost_clique(g, block.tolist(), clique_lists, blocked)
        if not sub_outcome.is_success:
            return (
                SolveOutcome.abort(sub_outcome.vertex, f"clique block {i}: {sub_outcome.reason}"),
                lists,
                diag,
            )
        for v in block.tolist():
            colors[v] = sub_outcome.coloring.assignment[v]

    # low-degree vertices last; their sampled list is the whole palette
    # (deg+1 <= ell), so a free color always remains at default settings
    for v in sorted(low):
        used = {int(colors[u]) for u in g.neighbors(v) if colors[u]}
        pick = next((int(c) for c in lists.colors(v) if int(c) not in used), None)
        if pick is None:
            return SolveOutcome.abort(v, "low-degree finish exhausted"), lists, diag
        colors[v] = pick

    out = Coloring(colors)
    ok, violation = verify_coloring(g, lists, out)
    if not ok:
        raise AssertionError(f"deg+1 pipeline produced an improper coloring: {violation}")
    return SolveOutcome.success(out), lists, diag


def color_deg_plus_one(
    g: Graph,
    seed: int,
    eps: float = 0.1,
    ell: Optional[int] = None,
    ell_factor: float = 3.0,
    alpha: float = 1.0,
) -> PipelineResult:
    """Decompose, two-step color, finish blocks and low-degree vertices."""
    if ell is None:
        ell = degp1_list_size(g.n, ell_factor)
    lists = sample_lists(g, DegPlusOnePalette(), ell, seed)
    outcome, governing, diag = solve_deg_plus_one_from_lists(g, lists, eps, seed, alpha=alpha)
    return PipelineResult(outcome=outcome, lists=governing, diagnostics=diag)


# ---------------------------------------------------------------------------
# (1+eps)·deg list coloring and degeneracy coloring


def color_one_eps_deg(
    g: Graph,
    eps: float,
    seed: int,
    explicit_lists: Optional[Sequence[Sequence[int]]] = None,
    ell: Optional[int] = None,
) -> PipelineResult:
    """Sample from per-vertex palettes of (1+eps)·deg colors, greedy in id
    order."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if ell is None:
        ell = onedeg_list_size(g.n, eps)
    spec = OneEpsDegPalette(eps, tuple(tuple(r) for r in explicit_lists) if explicit_lists else None)
    lists = sample_lists(g, spec, ell, seed)
    outcome = greedy_color(g, lists, np.arange(g.n, dtype=np.int64))
    return PipelineResult(outcome=outcome, lists=lists, diagnostics={"ell": ell, "eps": eps})


def color_degeneracy(g: Graph, eps: float, seed: int, ell: Optional[int] = None) -> PipelineResult:
    """Palettes scaled by the per-vertex back-degree, greedy along the
    degeneracy order."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if ell is None:
        ell = onedeg_list_size(g.n, eps)
    dres = degeneracy_order(g)
    lists = sample_lists(g, DegeneracyPalette(eps), ell, seed)
    outcome = greedy_color(g, lists, dres.order)
    diag = {"ell": ell, "eps": eps, "kappa": dres.kappa}
    return PipelineResult(outcome=outcome, lists=lists, diagnostics=diag)


# ---------------------------------------------------------------------------
# Random-partition coloring


def _zeta_greedy(x: float) -> int:
    return int(math.floor(x)) + 1


def partition_color(
    g: Graph,
    k: int,
    eps: float,
    subroutine: str,
    seed: int,
    gamma: float = 0.5,
    max_widen: int = 3,
    d_floor: float = DEFAULT_D_FLOOR,
) -> PipelineResult:
    """Random k-partition; each part colored on its own palette block, with
    logged doubling of a block on subroutine failure."""
    if subroutine not in ("greedy-delta-plus-one", "triangle-free-nibble"):
        raise ParameterError(f"unknown subroutine {subroutine!r}")
    if k < 1:
        raise ParameterError("k must be >= 1")
    delta = g.max_degree
    n = g.n
    limit = eps * eps * delta / (9.0 * _ln(n))
    if k > limit:
        warnings.warn(
            f"k={k} exceeds the guidance bound {limit:.2f} for this graph",
            stacklevel=2,
        )
    part_of = rng.substream(seed, 0, rng.PARTITION).integers(0, k, size=n)
    target_degree = (1 + eps) * delta / k
    if subroutine == "greedy-delta-plus-one":
        base_block = _zeta_greedy(target_degree)
    else:
        base_block = trifree_palette_size(target_degree, gamma)

    colors = np.zeros(n, dtype=np.int64)
    widths, part_rows = [], []
    diag_parts = []
    widenings_total = 0
    offset = 0
    for i in range(k):
        members = np.nonzero(part_of == i)[0].astype(np.int64)
        part_rows.append(members)
        if len(members) == 0:
            widths.append(0)
            diag_parts.append({"part": i, "size": 0, "max_degree": 0, "block": 0, "widenings": 0})
            continue
        sub, back = g.subgraph(members)
        block = base_block
        attempt = 0
        local = None
        while attempt <= max_widen:
            local = _color_part(sub, block, subroutine, gamma, rng.derive_seed(seed, i * 31 + attempt), d_floor)
            if local is not None:
                break
            attempt += 1
            block *= 2
        widenings_total += attempt
        if local is None:
            return PipelineResult(
                SolveOutcome.abort(int(members[0]), f"part {i} uncolorable after widening"),
                None,
                {"part": i, "widenings": widenings_total},
            )
        colors[back] = local + offset
        widths.append(block)
        diag_parts.append(
            {
                "part": i,
                "size": int(len(members)),
                "max_degree": sub.max_degree,
                "block": block,
                "widenings": attempt,
            }
        )
        offset += block

    out = Coloring(colors)
    ok, violation = verify_coloring(g, None, out)
    if not ok:
        raise AssertionError(f"partition coloring improper: {violation}")
    diag = {
        "k": k,
        "eps": eps,
        "delta": delta,
        "base_block": base_block,
        "parts": diag_parts,
        "widenings": widenings_total,
        "total_colors": out.distinct_colors(),
        "max_part_degree": max((p["max_degree"] for p in diag_parts), default=0),
        "max_part_size": max((p["size"] for p in diag_parts), default=0),
    }
    return PipelineResult(SolveOutcome.success(out), None, diag)


def _color_part(
    sub: Graph, block: int, subroutine: str, gamma: float, seed: int, d_floor: float
) -> Optional[np.ndarray]:
    """Color one part with at most `block` colors; None on failure."""
    if subroutine == "greedy-delta-plus-one":
        rows = [list(range(1, block + 1)) for _ in range(sub.n)]
        lists = lists_from_rows(rows, GlobalPalette(block), block)
        outcome = greedy_color(sub, lists, np.arange(sub.n, dtype=np.int64))
        return outcome.coloring.assignment.copy() if outcome.is_success else None
    # triangle-free subroutine: run the pipeline, accept if it fits the block
    delta = sub.max_degree
    if delta == 0:
        return np.ones(sub.n, dtype=np.int64)
    palette = min(trifree_palette_size(delta, gamma), block)
    ell = trifree_list_size(sub.n, delta, gamma)
    lists = sample_lists(sub, GlobalPalette(palette), ell, seed)
    outcome, _ = solve_trifree_from_lists(sub, lists, gamma, delta, palette, seed, d_floor)
    if outcome.is_success:
        return outcome.coloring.assignment.copy()
    return None


# ---------------------------------------------------------------------------
# Lower-bound demonstrator


def lower_bound_demo_od(ell: int, trials: int, seed: int) -> dict:
    """Sampling ell colors from 2·ell on disjoint (ell+1)-cliques: measure how
    often a clique's sampled lists all equal {1..ell}, an unavoidable failure,
    against the exact product probability."""
    if ell < 1 or trials < 1:
        raise ParameterError("ell and trials must be >= 1")
    from .graphs import clique_collection

    q = math.comb(2 * ell, ell) ** -(ell + 1)
    k = math.ceil(5.0 / q)
    graph = clique_collection(ell, k)
    assert graph.max_degree == ell

    gen = rng.substream(seed, 0, rng.DEMO)
    size = ell + 1
    canonical = (1 << ell) - 1
    per_clique_hits = 0
    union_size_hits = 0
    trials_with_failure = 0
    trials_with_union_failure = 0
    for _ in range(trials):
        draws = gen.random((k * size, 2 * ell))
        picks = np.argpartition(draws, ell - 1, axis=1)[:, :ell]
        masks = np.bitwise_or.reduce(1 << picks.astype(np.int64), axis=1)
        clique_masks = np.bitwise_or.reduceat(masks, np.arange(0, k * size, size))
        canonical_fail = clique_masks == canonical
        sizes = np.array([bin(int(m)).count("1") for m in clique_masks])
        union_fail = sizes == ell
        per_clique_hits += int(canonical_fail.sum())
        union_size_hits += int(union_fail.sum())
        trials_with_failure += bool(canonical_fail.any())
        trials_with_union_failure += bool(union_fail.any())

    total_cliques = trials * k
    return {
        "ell": ell,
        "k": k,
        "trials": trials,
        "q_exact": q,
        "per_clique_freq": per_clique_hits / total_cliques,
        "union_size_freq": union_size_hits / total_cliques,
        "overall_failure_freq": trials_with_union_failure / trials,
        "overall_canonical_freq": trials_with_failure / trials,
        "predicted_overall": 1.0 - (1.0 - q) ** k,
        "total_cliques": total_cliques,
    }
