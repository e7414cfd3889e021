"""Friend edges, the decomposition, and its clause-by-clause verifier."""

import numpy as np

from sparsepalette import (
    clique_collection,
    decompose,
    friend_edges,
    gnp,
    new_graph,
    verify_decomposition,
)
from sparsepalette.decompose import Decomposition
from sparsepalette.kernels import common_neighbor_counts


def test_friend_edges_complete_graph():
    theta = 0.1
    g = clique_collection(11, 1)  # K12, 1/theta + 2 = 12
    fs = friend_edges(g, theta)
    assert fs.edge_count == g.m
    assert fs.dense.all()


def test_friend_edges_star_unbalanced():
    g = new_graph(6, [(0, i) for i in range(1, 6)])
    fs = friend_edges(g, 0.1)
    assert fs.edge_count == 0
    assert not fs.dense.any()


def test_friend_edges_triangle_free_empty():
    cycle6 = new_graph(6, [(i, (i + 1) % 6) for i in range(6)])
    fs = friend_edges(cycle6, 0.1)
    assert fs.edge_count == 0


def test_friend_edges_match_brute_force():
    theta = 0.15
    for seed in range(3):
        g = gnp(150, 0.15, seed)
        fs = friend_edges(g, theta)
        got = set(zip(fs.eu.tolist(), fs.ev.tolist()))
        deg = g.degrees
        eu, ev = g.edges()
        common = common_neighbor_counts(g.indptr, g.indices, eu, ev)
        expected = set()
        for u, v, cn in zip(eu.tolist(), ev.tolist(), common.tolist()):
            lo, hi = min(deg[u], deg[v]), max(deg[u], deg[v])
            if lo >= (1 - theta) * hi and cn >= (1 - theta) * lo:
                expected.add((u, v))
        assert got == expected
        incident = np.zeros(g.n)
        for u, v in expected:
            incident[u] += 1
            incident[v] += 1
        for v in range(g.n):
            want = g.degree(v) > 0 and incident[v] >= (1 - theta) * g.degree(v)
            assert bool(fs.dense[v]) == want


def test_decompose_disjoint_large_cliques():
    # blocks need clique size >= 1/eps + 2 before every edge is a friend edge
    g = clique_collection(119, 3)
    d = decompose(g, 0.01)
    assert len(d.cliques) == 3
    assert len(d.sparse) == 0 and len(d.uneven) == 0
    assert verify_decomposition(g, d) == []


def test_decompose_mid_size_cliques_at_matching_eps():
    g = clique_collection(19, 4)  # K20 blocks; eps must satisfy 1/eps+2 <= 20
    d = decompose(g, 0.07)
    assert len(d.cliques) == 4
    assert verify_decomposition(g, d) == []


def test_decompose_gnp_densities_validate():
    for p in (0.05, 0.15, 0.5):
        g = gnp(300, p, seed=4)
        d = decompose(g, 0.01)
        assert verify_decomposition(g, d) == []
        if p == 0.05:
            assert len(d.cliques) == 0


def test_decompose_cliques_with_pendants():
    base = clique_collection(119, 1)
    edges = list(zip(*[arr.tolist() for arr in base.edges()]))
    n = base.n
    # pendant vertices hanging off the first three clique members
    for i in range(3):
        edges.append((i, n + i))
    g = new_graph(n + 3, edges)
    d = decompose(g, 0.01)
    assert len(d.cliques) == 1 and len(d.cliques[0]) == 120
    assert verify_decomposition(g, d) == []


def test_decompose_half_clique_attachment_is_uneven():
    # degree-d vertex joined to d members of a 2d-clique: neither sparse nor
    # block material, but its higher-degree neighbors make it uneven
    dd = 60
    block = clique_collection(2 * dd - 1, 1)  # K120
    edges = list(zip(*[arr.tolist() for arr in block.edges()]))
    v = block.n
    for i in range(dd):
        edges.append((i, v))
    g = new_graph(block.n + 1, edges)
    d = decompose(g, 0.01)
    assert len(d.cliques) == 1
    assert v in d.uneven.tolist()
    assert verify_decomposition(g, d) == []


def test_decompose_empty_graph_routes_low():
    g = new_graph(5, [])
    d = decompose(g, 0.01)
    assert sorted(d.low_degree.tolist()) == [0, 1, 2, 3, 4]
    assert verify_decomposition(g, d) == []


def test_decompose_deterministic():
    g = gnp(200, 0.1, seed=9)
    d1, d2 = decompose(g, 0.01), decompose(g, 0.01)
    assert [b.tolist() for b in d1.cliques] == [b.tolist() for b in d2.cliques]
    assert d1.sparse.tolist() == d2.sparse.tolist()
    assert d1.uneven.tolist() == d2.uneven.tolist()


def test_degree_ratio_inside_blocks():
    g = clique_collection(119, 2)
    eps = 0.01
    d = decompose(g, eps)
    theta = 4 * eps
    for block in d.cliques:
        degs = [g.degree(v) for v in block.tolist()]
        assert min(degs) >= (1 - 2 * theta) * max(degs)


def test_verifier_flags_merged_blocks():
    g = clique_collection(4, 2)  # two K5s
    fake = Decomposition(
        eps=0.01,
        d_min=1,
        uneven=np.zeros(0, dtype=np.int64),
        sparse=np.zeros(0, dtype=np.int64),
        cliques=(np.arange(10, dtype=np.int64),),
        clique_deltas=(4,),
        low_degree=np.zeros(0, dtype=np.int64),
    )
    report = verify_decomposition(g, fake)
    non_neighbor_rows = [v for v, clause in report if "non-neighbors" in clause]
    assert sorted(set(non_neighbor_rows)) == list(range(10))


def test_verifier_flags_bogus_sparse_vertex():
    g = clique_collection(4, 1)  # K5: neighborhoods are complete
    fake = Decomposition(
        eps=0.01,
        d_min=1,
        uneven=np.arange(1, 5, dtype=np.int64),
        sparse=np.asarray([0], dtype=np.int64),
        cliques=(),
        clique_deltas=(),
        low_degree=np.zeros(0, dtype=np.int64),
    )
    report = verify_decomposition(g, fake)
    assert (0, "sparse predicate") in report


def test_partition_labels_cover_everything():
    g = gnp(150, 0.08, seed=2)
    d = decompose(g, 0.05)
    labels = d.label_of()
    assert len(labels) == g.n
    assert all(lab for lab in labels)
    text = d.to_text()
    assert text.count("\n") == g.n
