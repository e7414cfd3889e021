"""Parity between the compiled kernels and the pure-Python fallback."""

import numpy as np
import pytest

from sparsepalette import _fallback, gnp, sample_lists
from sparsepalette.kernels import BACKEND
from sparsepalette.palette import DegPlusOnePalette

try:
    from sparsepalette import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None, reason="compiled kernels unavailable")


def _fixture(seed):
    g = gnp(120, 0.08, seed)
    lists = sample_lists(g, DegPlusOnePalette(), 4, seed)
    return g, lists


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_common_neighbor_counts_parity(seed):
    g, _ = _fixture(seed)
    eu, ev = g.edges()
    a = _speedups.common_neighbor_counts(g.indptr, g.indices, eu, ev)
    b = _fallback.common_neighbor_counts(g.indptr, g.indices, eu, ev)
    assert np.array_equal(a, b)


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_count_triangles_parity(seed):
    g, _ = _fixture(seed)
    eu, ev = g.edges()
    assert _speedups.count_triangles(g.indptr, g.indices, eu, ev) == _fallback.count_triangles(
        g.indptr, g.indices, eu, ev
    )


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_lists_intersect_parity(seed):
    g, lists = _fixture(seed)
    eu, ev = g.edges()
    a = _speedups.lists_intersect(lists.lptr, lists.lcol, eu, ev)
    b = _fallback.lists_intersect(lists.lptr, lists.lcol, eu, ev)
    assert np.array_equal(a, b)


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_c_degree_table_parity(seed):
    g, lists = _fixture(seed)
    a = _speedups.c_degree_table(g.indptr, g.indices, lists.lptr, lists.lcol)
    b = _fallback.c_degree_table(g.indptr, g.indices, lists.lptr, lists.lcol)
    assert np.array_equal(a, b)


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_greedy_fill_parity(seed):
    g, lists = _fixture(seed)
    order = np.arange(g.n, dtype=np.int64)
    ca = np.zeros(g.n, dtype=np.int64)
    cb = np.zeros(g.n, dtype=np.int64)
    ra = _speedups.greedy_fill(g.indptr, g.indices, lists.lptr, lists.lcol, order, ca)
    rb = _fallback.greedy_fill(g.indptr, g.indices, lists.lptr, lists.lcol, order, cb)
    assert ra == rb
    assert np.array_equal(ca, cb)


@needs_ext
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_first_monochromatic_parity(seed):
    g, _ = _fixture(seed)
    rng = np.random.default_rng(seed)
    colors = rng.integers(0, 4, size=g.n).astype(np.int64)
    assert _speedups.first_monochromatic(g.indptr, g.indices, colors) == tuple(
        _fallback.first_monochromatic(g.indptr, g.indices, colors)
    )


def test_backend_reported():
    assert BACKEND in ("cython", "python")
