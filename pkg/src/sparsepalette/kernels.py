"""Kernel backend selection: compiled extension if it built, else the
pure-Python fallback.  `BACKEND` records which one is active; setting
SPARSEPALETTE_PURE_PYTHON=1 forces the fallback."""

import os

from . import _fallback

if os.environ.get("SPARSEPALETTE_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _speedups as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
        BACKEND = "python"

count_triangles = _impl.count_triangles
common_neighbor_counts = _impl.common_neighbor_counts
lists_intersect = _impl.lists_intersect
c_degree_table = _impl.c_degree_table
greedy_fill = _impl.greedy_fill
first_monochromatic = _impl.first_monochromatic
