"""Schedule recursion invariants and single-round behavior."""

import math

import numpy as np
import pytest

from sparsepalette import nibble_round, nibble_schedule, nibble_start, new_graph
from sparsepalette.errors import ParameterError
from sparsepalette.nibble import run_nibble
from sparsepalette.palette import lists_from_rows
from sparsepalette.solver import verify_coloring


def test_schedule_starting_values():
    for d in (20, 50, 313, 1000):
        s = nibble_schedule(d)
        assert s.alphas[0] == pytest.approx(8 * d / math.log(d))
        assert s.betas[0] == d


def test_schedule_invariants_spot():
    for d in (25, 100, 777):
        s = nibble_schedule(d)
        assert np.all(s.keeps >= 0.75)
        ratios = s.betas / s.alphas
        assert np.all(np.diff(ratios) <= 1e-12)
        assert ratios[0] <= math.log(d) / 8 + 1e-12
        assert s.betas[-1] < s.alphas[-1] / 100


def test_schedule_floor():
    with pytest.raises(ParameterError, match="fallback"):
        nibble_schedule(10)


def _disjoint_edges(pairs, colors):
    edges = [(2 * i, 2 * i + 1) for i in range(pairs)]
    g = new_graph(2 * pairs, edges)
    lists = lists_from_rows([list(range(1, colors + 1))] * g.n, None, colors)
    return g, lists


def test_round_zero_probability_hook():
    # with no assignments the only change is the equalization thinning
    g, lists = _disjoint_edges(2000, 3)
    schedule = nibble_schedule(50)
    state = nibble_start(g, lists)
    state = nibble_round(g, state, schedule, seed=3, p_override=0.0)
    assert state.coloring.colored_count == 0
    total_before = 3 * g.n
    kept = sum(len(state.lists[v]) for v in range(g.n))
    # thinning rate is exactly 1 - keep_1 since keep(v,c) = 1 at b = 0...
    # here b = 1 per edge-partner, so survival is keep_1/(1-p) with p = 0:
    # exactly keep_1
    expected = schedule.keeps[0] * total_before
    sigma = math.sqrt(total_before * schedule.keeps[0] * (1 - schedule.keeps[0]))
    assert abs(kept - expected) <= 4 * sigma
    for v in range(g.n):
        assert set(state.lists[v].tolist()) <= set(lists.colors(v).tolist())


def test_round_coloring_probability_on_disjoint_edges():
    # exact per-vertex coloring chance for an isolated edge with a shared
    # list: each color is usable with probability p·keep_1, independently
    g, lists = _disjoint_edges(5000, 2)
    schedule = nibble_schedule(50)
    state = nibble_start(g, lists)
    state = nibble_round(g, state, schedule, seed=11)
    p = schedule.ps[0]
    per_color = p * schedule.keeps[0]
    expected_rate = 1 - (1 - per_color) ** 2
    colored = state.coloring.colored_count
    sigma = math.sqrt(g.n * expected_rate * (1 - expected_rate))
    assert abs(colored - g.n * expected_rate) <= 3 * sigma


def test_round_keeps_partial_coloring_proper_and_lists_consistent():
    gen = np.random.default_rng(7)
    n_side = 60
    edges = [
        (i, n_side + j)
        for i in range(n_side)
        for j in gen.choice(n_side, size=12, replace=False)
    ]
    g = new_graph(2 * n_side, sorted(set(edges)))
    lists = lists_from_rows(
        [np.sort(gen.choice(40, size=25, replace=False) + 1).tolist() for _ in range(g.n)],
        None,
        25,
    )
    schedule = nibble_schedule(20)
    state = nibble_start(g, lists)
    for _ in range(3):
        before = {v: set(state.lists[v].tolist()) for v in sorted(state.remaining)}
        state = nibble_round(g, state, schedule, seed=5)
        ok, violation = verify_coloring(g, lists, state.coloring)
        assert ok, violation
        for v in sorted(state.remaining):
            assert set(state.lists[v].tolist()) <= before[v]
        # trimming bound: c-degrees within the remaining graph stay below 2β
        beta_next = schedule.betas[state.round_index - 1]
        for v in sorted(state.remaining):
            row = set(state.lists[v].tolist())
            for c in row:
                b = sum(
                    1
                    for u in g.neighbors(v)
                    if int(u) in state.remaining and c in set(state.lists[int(u)].tolist())
                )
                assert b <= 2 * beta_next
        # colors already used by neighbors never stay available
        for v in sorted(state.remaining):
            nbr_colors = {
                int(state.coloring.assignment[u])
                for u in g.neighbors(v)
                if state.coloring.assignment[u]
            }
            assert not (set(state.lists[v].tolist()) & nbr_colors)


def test_run_nibble_full_schedule_small_instance():
    gen = np.random.default_rng(3)
    n_side = 40
    edges = [
        (i, n_side + j)
        for i in range(n_side)
        for j in gen.choice(n_side, size=10, replace=False)
    ]
    g = new_graph(2 * n_side, sorted(set(edges)))
    lists = lists_from_rows(
        [np.sort(gen.choice(30, size=16, replace=False) + 1).tolist() for _ in range(g.n)],
        None,
        16,
    )
    schedule = nibble_schedule(20)
    state = run_nibble(g, lists, schedule, seed=2)
    ok, violation = verify_coloring(g, lists, state.coloring)
    assert ok, violation
    assert state.coloring.colored_count > 0


def test_round_equalization_rate_with_no_shared_colors():
    # endpoints hold disjoint lists: keep(v,c) = 1, so the equalization alone
    # thins each list at exactly 1 - keep_1 even while assignments happen
    pairs = 4000
    g = new_graph(2 * pairs, [(2 * i, 2 * i + 1) for i in range(pairs)])
    rows = []
    for _ in range(pairs):
        rows.append([1, 2, 3])
        rows.append([4, 5, 6])
    lists = lists_from_rows(rows, None, 3)
    schedule = nibble_schedule(50)
    state = nibble_start(g, lists)
    state = nibble_round(g, state, schedule, seed=9)
    rec = state.history[0]
    keep = rec["keep_target"]
    freq = rec["kept_pairs"] / rec["total_pairs"]
    sigma = math.sqrt(keep * (1 - keep) / rec["total_pairs"])
    assert abs(freq - keep) <= 3 * sigma
