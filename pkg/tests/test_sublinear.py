"""Streaming and query-model simulators: storage, accounting, non-adaptivity."""

import math

import numpy as np
import pytest

from sparsepalette import (
    EdgeStream,
    build_conflict_graph,
    gnp,
    gnp_triangle_free,
    new_graph,
    query_color,
    stream_color,
)
from sparsepalette.errors import ParameterError
from sparsepalette.solver import verify_coloring


def test_stream_is_forward_only():
    g = gnp(20, 0.2, seed=1)
    stream = EdgeStream.from_graph(g)
    list(iter(stream))
    with pytest.raises(RuntimeError):
        iter(stream)


def test_stream_rejects_unknown_mode():
    with pytest.raises(ParameterError):
        stream_color(EdgeStream(3, [(0, 1)]), "mystery", seed=0)


def test_stream_disjoint_lists_store_nothing():
    # declared-delta global mode with a huge palette and tiny lists: find a
    # seed whose sampled singletons are pairwise distinct
    g = new_graph(4, [(0, 1), (1, 2), (2, 3)])
    for seed in range(50):
        sim = stream_color(
            EdgeStream.from_graph(g), "od", seed, eps=0.4, ell=1, declared_delta=40
        )
        if sim.ledger.stored_edges == 0:
            assert sim.outcome.is_success
            return
    pytest.fail("no seed produced pairwise-disjoint singleton lists")


def test_stream_storage_within_log_bound():
    # frozen constant c = 1.0 for the n·ln²n storage ceiling
    n, p = 2000, 0.02
    bound = 1.0 * n * math.log(n) ** 2
    for seed in range(20):
        g = gnp(n, p, seed)
        sim = stream_color(EdgeStream.from_graph(g), "degp1", seed)
        assert sim.diagnostics["stored_final"] <= bound
        assert sim.ledger.stored_edges <= bound


def test_stream_order_independent_final_set():
    g = gnp(300, 0.05, seed=9)
    fwd = stream_color(EdgeStream.from_graph(g), "degp1", seed=4)
    rev = stream_color(EdgeStream.from_graph(g, reverse=True), "degp1", seed=4)
    assert fwd.diagnostics["stored_final"] == rev.diagnostics["stored_final"]
    assert fwd.diagnostics["stored_total"] >= fwd.diagnostics["stored_final"]


def test_stream_stored_superset_of_true_conflict():
    n = 400
    g = gnp(n, 0.05, seed=3)
    sim = stream_color(EdgeStream.from_graph(g), "degp1", seed=6)
    lists = sim.lists
    cg = build_conflict_graph(g, lists)
    # every true conflict edge must appear in the stored graph
    stored = sim.diagnostics["stored_graph_edges"]
    assert stored >= cg.edge_count
    # and the coloring, when it exists, is proper on the full graph
    if sim.outcome.is_success:
        ok, violation = verify_coloring(g, lists, sim.outcome.coloring)
        assert ok, violation


def test_stream_modes_run_and_verify():
    g = gnp(200, 0.06, seed=2)
    for mode in ("od", "onedeg", "degp1"):
        sim = stream_color(EdgeStream.from_graph(g), mode, seed=5)
        if sim.outcome.is_success:
            ok, violation = verify_coloring(g, None, sim.outcome.coloring)
            assert ok, violation
    tf = gnp_triangle_free(300, 0.015, seed=2)
    sim = stream_color(EdgeStream.from_graph(tf), "trifree", seed=5)
    if sim.outcome.is_success:
        assert verify_coloring(tf, None, sim.outcome.coloring)[0]


def test_stream_from_file(tmp_path):
    from sparsepalette import save_edge_list

    g = gnp(80, 0.1, seed=4)
    path = tmp_path / "g.el"
    save_edge_list(g, str(path))
    sim = stream_color(EdgeStream.from_file(str(path)), "onedeg", seed=1)
    assert sim.ledger.peak_words > 0


def test_query_plan_is_nonadaptive():
    n, seed = 128, 5
    g1 = gnp(n, 0.05, seed=1)
    g2 = gnp(n, 0.3, seed=2)
    q1 = query_color(g1, "degp1", seed)
    q2 = query_color(g2, "degp1", seed)
    assert q1.diagnostics["plan_hash"] == q2.diagnostics["plan_hash"]
    assert q1.diagnostics["pair_plan_size"] == q2.diagnostics["pair_plan_size"]
    q3 = query_color(g1, "degp1", seed + 1)
    assert q3.diagnostics["plan_hash"] != q1.diagnostics["plan_hash"]


def test_query_ledger_matches_plan_recount():
    n = 128
    g = gnp(n, 0.1, seed=3)
    sim = query_color(g, "degp1", seed=2)
    attempts = sim.diagnostics["retries"] + 1
    nq = sim.diagnostics["neighbor_plan_per_vertex"]
    assert sim.ledger.degree_queries == attempts * n
    assert sim.ledger.neighbor_queries == attempts * n * nq
    assert sim.ledger.pair_queries >= sim.diagnostics["pair_plan_size"]
    assert (
        sim.ledger.total_queries
        == sim.ledger.degree_queries + sim.ledger.neighbor_queries + sim.ledger.pair_queries
    )


def test_query_low_degree_edges_found_by_neighbor_queries():
    n = 100  # every degree sits far below 10*sqrt(n)
    g = gnp(n, 0.08, seed=7)
    sim = query_color(g, "degp1", seed=4)
    lists = sim.lists
    rows = [set(lists.colors(v).tolist()) for v in range(n)]
    eu, ev = g.edges()
    expected = sum(1 for u, v in zip(eu.tolist(), ev.tolist()) if rows[u] & rows[v])
    assert sim.diagnostics["conflict_edges"] == expected


def test_query_modes_run_and_verify():
    g = gnp(150, 0.08, seed=11)
    for mode in ("od", "onedeg", "degp1"):
        sim = query_color(g, mode, seed=3)
        if sim.outcome.is_success:
            ok, violation = verify_coloring(g, None, sim.outcome.coloring)
            assert ok, violation
    tf = gnp_triangle_free(200, 0.02, seed=3)
    sim = query_color(tf, "trifree", seed=3)
    if sim.outcome.is_success:
        assert verify_coloring(tf, None, sim.outcome.coloring)[0]


def test_query_uncapped_pair_plan_matches_mask_rule():
    # with ell = 1 and sqrt(n) > 10 no scale in the pair stage is fully
    # sampled, so the plan is enumerated; it must equal the pairwise
    # mask-intersection rule exactly
    from sparsepalette.palette import potential_lists, scale_floor
    from sparsepalette.sublinear import _pair_plan

    n, ell, seed = 256, 1, 3
    family = potential_lists(n, ell, seed)
    i0 = scale_floor(math.ceil(math.sqrt(n)))
    masks, pair_list, count = _pair_plan(family, n, i0, ell)
    assert pair_list is not None
    expected = {
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if masks[u] & masks[v]
    }
    assert set(pair_list) == expected
    assert count == len(expected)


def test_query_words_accounting_monotone():
    g = gnp(100, 0.1, seed=5)
    sim = query_color(g, "degp1", seed=6)
    assert sim.ledger.peak_words >= sim.diagnostics["conflict_edges"]


def test_query_empty_graph_trivial_success():
    # the plan is a pure function of (n, seed, mode), so the pair stage still
    # issues its graph-independent queries; they just find no edges
    g = new_graph(64, [])
    sim = query_color(g, "degp1", seed=1)
    assert sim.outcome.is_success
    assert sim.ledger.degree_queries == 64
    assert sim.diagnostics["conflict_edges"] == 0


def test_stream_trifree_with_declared_delta():
    tf = gnp_triangle_free(250, 0.02, seed=4)
    sim = stream_color(
        EdgeStream.from_graph(tf), "trifree", seed=2, declared_delta=tf.max_degree
    )
    assert sim.diagnostics["declared_delta"] == tf.max_degree
    if sim.outcome.is_success:
        assert verify_coloring(tf, None, sim.outcome.coloring)[0]


def test_stream_declared_delta_too_small_rejected():
    g = gnp(100, 0.2, seed=1)
    with pytest.raises(ParameterError):
        stream_color(EdgeStream.from_graph(g), "od", seed=0, declared_delta=1)


def test_query_high_degree_edges_found_by_pair_queries():
    # every degree above the 10*sqrt(n) neighbor budget: neighbor answers are
    # truncated and completeness must come from the pair stage
    n = 400
    g = gnp(n, 0.6, seed=9)
    nq = math.ceil(10 * math.sqrt(n))
    assert int(g.degrees.min()) >= nq
    sim = query_color(g, "degp1", seed=5)
    lists = sim.lists
    rows = [set(lists.colors(v).tolist()) for v in range(n)]
    eu, ev = g.edges()
    expected = sum(1 for u, v in zip(eu.tolist(), ev.tolist()) if rows[u] & rows[v])
    assert sim.diagnostics["conflict_edges"] == expected
