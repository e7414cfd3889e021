"""Per-vertex color list sampling, c-degrees, bad-color trimming, and the
potential-palette mechanism for unknown degrees."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from . import rng
from .errors import MalformedInputError, ParameterError
from .graphs import Graph, degeneracy_order
from .kernels import c_degree_table


@dataclass(frozen=True)
class GlobalPalette:
    """Every vertex draws from {1..colors}."""

    colors: int

    def __post_init__(self):
        if self.colors < 1:
            raise ParameterError("global palette needs at least one color")


@dataclass(frozen=True)
class DegPlusOnePalette:
    """S(v) = {1..deg(v)+1}."""


@dataclass(frozen=True)
class OneEpsDegPalette:
    """S(v) holds ceil((1+eps)·deg(v)) colors; canonical range unless
    explicit lists are supplied."""

    eps: float
    lists: Optional[tuple] = None


@dataclass(frozen=True)
class DegeneracyPalette:
    """S(v) = {1..ceil((1+eps)·kappa(v))} along the degeneracy order."""

    eps: float


@dataclass(frozen=True)
class ExplicitPalette:
    lists: tuple


PaletteSpec = Union[
    GlobalPalette, DegPlusOnePalette, OneEpsDegPalette, DegeneracyPalette, ExplicitPalette
]


@dataclass(frozen=True, eq=False)
class ListAssignment:
    """Sampled per-vertex color lists L(v), CSR over sorted colors."""

    lptr: np.ndarray
    lcol: np.ndarray
    spec: PaletteSpec
    ell: int

    @property
    def n(self) -> int:
        return len(self.lptr) - 1

    def size(self, v: int) -> int:
        return int(self.lptr[v + 1] - self.lptr[v])

    def colors(self, v: int) -> np.ndarray:
        return self.lcol[self.lptr[v] : self.lptr[v + 1]]

    def contains(self, v: int, c: int) -> bool:
        row = self.colors(v)
        i = np.searchsorted(row, c)
        return i < len(row) and row[i] == c

    def max_color(self) -> int:
        return int(self.lcol.max()) if len(self.lcol) else 0

    def to_text(self) -> str:
        out = []
        for v in range(self.n):
            out.append(f"{v}: " + " ".join(str(int(c)) for c in self.colors(v)))
        return "\n".join(out) + "\n"


def lists_from_rows(rows: Sequence[Sequence[int]], spec: PaletteSpec, ell: int) -> ListAssignment:
    """Assemble a ListAssignment from per-vertex color sequences."""
    lptr = np.zeros(len(rows) + 1, dtype=np.int64)
    cols = []
    for v, row in enumerate(rows):
        vals = sorted(set(int(c) for c in row))
        if vals and vals[0] < 1:
            raise MalformedInputError("colors are positive integers")
        cols.extend(vals)
        lptr[v + 1] = lptr[v] + len(vals)
    return ListAssignment(lptr, np.asarray(cols, dtype=np.int64), spec, ell)


def parse_lists(text: str, spec: PaletteSpec = None, ell: int = 0) -> ListAssignment:
    """Inverse of ListAssignment.to_text."""
    rows = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        head, _, rest = line.partition(":")
        try:
            v = int(head)
            colors = [int(tok) for tok in rest.split()]
        except ValueError:
            raise MalformedInputError(f"line {lineno}: expected 'v: c1 c2 ...'") from None
        rows[v] = colors
    n = max(rows) + 1 if rows else 0
    return lists_from_rows([rows.get(v, []) for v in range(n)], spec, ell)


def palette_universe(g: Graph, spec: PaletteSpec, v: int, kappa_v: np.ndarray = None) -> np.ndarray:
    """The source palette S(v) as a sorted array."""
    if isinstance(spec, GlobalPalette):
        return np.arange(1, spec.colors + 1, dtype=np.int64)
    if isinstance(spec, DegPlusOnePalette):
        return np.arange(1, g.degree(v) + 2, dtype=np.int64)
    if isinstance(spec, OneEpsDegPalette):
        if spec.lists is not None:
            row = np.asarray(sorted(spec.lists[v]), dtype=np.int64)
            need = math.ceil((1 + spec.eps) * g.degree(v))
            if len(row) < need:
                raise ParameterError(
                    f"explicit list at vertex {v} has {len(row)} colors, needs {need}"
                )
            return row
        return np.arange(1, max(1, math.ceil((1 + spec.eps) * g.degree(v))) + 1, dtype=np.int64)
    if isinstance(spec, DegeneracyPalette):
        if kappa_v is None:
            kappa_v = degeneracy_order(g).kappa_v
        top = max(1, math.ceil((1 + spec.eps) * int(kappa_v[v])))
        return np.arange(1, top + 1, dtype=np.int64)
    if isinstance(spec, ExplicitPalette):
        return np.asarray(sorted(spec.lists[v]), dtype=np.int64)
    raise ParameterError(f"unknown palette spec {spec!r}")


def sample_lists(g: Graph, spec: PaletteSpec, ell: int, seed: int) -> ListAssignment:
    """Uniform size-min(ell,|S(v)|) subset of S(v) per vertex, independently
    across vertices (one RNG substream per vertex)."""
    if ell < 1:
        raise ParameterError("list size must be >= 1")
    kappa_v = degeneracy_order(g).kappa_v if isinstance(spec, DegeneracyPalette) else None
    lptr = np.zeros(g.n + 1, dtype=np.int64)
    cols = []
    for v in range(g.n):
        universe = palette_universe(g, spec, v, kappa_v)
        k = min(ell, len(universe))
        if k == len(universe):
            chosen = universe
        else:
            gen = rng.substream(seed, v, rng.SAMPLE)
            chosen = np.sort(universe[gen.choice(len(universe), size=k, replace=False)])
        cols.append(chosen)
        lptr[v + 1] = lptr[v] + k
    lcol = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
    return ListAssignment(lptr, lcol.astype(np.int64), spec, ell)


def c_degree(g: Graph, lists: ListAssignment, v: int, c: int) -> int:
    """Number of neighbors of v whose list contains color c."""
    return sum(1 for u in g.neighbors(v) if lists.contains(int(u), c))


def trim_bad_colors(
    g: Graph, lists: ListAssignment, eps: float, ell: int
) -> tuple[ListAssignment, np.ndarray]:
    """Drop every color whose list c-degree exceeds (1+eps/2)·ell/(1+eps).

    Returns the trimmed assignment and the per-vertex removed-color counts."""
    if not isinstance(lists.spec, GlobalPalette):
        raise ParameterError("trimming is defined for lists drawn from a global palette")
    table = c_degree_table(g.indptr, g.indices, lists.lptr, lists.lcol)
    threshold = (1 + eps / 2.0) * ell / (1 + eps)
    keep = table <= threshold
    new_lptr = np.zeros(g.n + 1, dtype=np.int64)
    removed = np.zeros(g.n, dtype=np.int64)
    for v in range(g.n):
        lo, hi = lists.lptr[v], lists.lptr[v + 1]
        kept = int(np.count_nonzero(keep[lo:hi]))
        new_lptr[v + 1] = new_lptr[v] + kept
        removed[v] = (hi - lo) - kept
    return ListAssignment(new_lptr, lists.lcol[keep], lists.spec, lists.ell), removed


@dataclass(frozen=True, eq=False)
class PotentialListFamily:
    """Bernoulli-sampled lists from the nested palettes {1..2^i}, i = 1..t.

    Only the sampled colors are stored; scales where the sampling rate caps
    at one hold the entire palette."""

    n: int
    ell: int
    t: int
    seed: int
    rows: tuple  # rows[v][i-1] = sorted int64 array, the sample from {1..2^i}

    def scale_list(self, v: int, i: int) -> np.ndarray:
        return self.rows[v][i - 1]

    def union_mask(self, v: int, i_min: int) -> int:
        """Bitmask (bit c-1 = color c) of all colors sampled at scales >= i_min."""
        arrays = self.rows[v][max(i_min, 1) - 1 :]
        if not arrays:
            return 0
        colors = np.unique(np.concatenate(arrays))
        bits = np.zeros(1 << self.t, dtype=np.uint8)
        bits[colors - 1] = 1
        return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")

    def total_colors(self) -> int:
        return sum(len(row) for rows_v in self.rows for row in rows_v)


def n_scales(n: int) -> int:
    return max(1, math.ceil(math.log2(max(n, 2))))


def scale_floor(target: int) -> int:
    """Smallest i with 2^i >= target (at least 1)."""
    return max(1, math.ceil(math.log2(max(target, 2))))


def potential_lists(n: int, ell: int, seed: int) -> PotentialListFamily:
    """Independent samples at every scale: each color of {1..2^i} kept with
    probability min(1, 10·ell/2^i)."""
    if ell < 1:
        raise ParameterError("list size must be >= 1")
    t = n_scales(n)
    rows = []
    for v in range(n):
        per_scale = []
        for i in range(1, t + 1):
            size = 1 << i
            rate = 10.0 * ell / size
            if rate >= 1.0:
                per_scale.append(np.arange(1, size + 1, dtype=np.int64))
                continue
            gen = rng.substream(seed, v, rng.POTENTIAL + i)
            count = int(gen.binomial(size, rate))
            chosen = gen.choice(size, size=count, replace=False) + 1
            per_scale.append(np.sort(chosen.astype(np.int64)))
        rows.append(tuple(per_scale))
    return PotentialListFamily(n=n, ell=ell, t=t, seed=seed, rows=tuple(rows))


def _truncate(family: PotentialListFamily, v: int, resolved: np.ndarray, ell: int) -> np.ndarray:
    """Cut a resolved list down to ell colors by a seeded uniform choice.

    A lowest-ids cut would hand every vertex whose scale was fully sampled
    the same {1..ell} prefix; the uniform cut keeps the resolved list a
    uniform random subset of its range."""
    if len(resolved) <= ell:
        return resolved
    gen = rng.substream(family.seed, v, rng.RESOLVE)
    idx = gen.choice(len(resolved), size=ell, replace=False)
    return np.sort(resolved[idx])


def resolve_list(
    family: PotentialListFamily, v: int, deg_v: int, ell: int
) -> tuple[np.ndarray, bool]:
    """Post-query list: the sample at the smallest scale covering deg_v,
    restricted to {1..deg_v+1} and truncated to ell colors.

    The flag is False when the resolved list came up short of
    min(ell, deg_v+1); callers retry with a fresh seed."""
    i = scale_floor(max(deg_v, 1))
    row = family.scale_list(v, i)
    resolved = row[row <= deg_v + 1]
    return _truncate(family, v, resolved, ell), len(resolved) >= min(ell, deg_v + 1)


def resolve_global(
    family: PotentialListFamily, v: int, palette_size: int, ell: int
) -> tuple[np.ndarray, bool]:
    """Same mechanism against a global palette {1..palette_size} whose size
    was unknown when the potential lists were drawn."""
    i = min(scale_floor(palette_size), family.t)
    row = family.scale_list(v, i)
    resolved = row[row <= palette_size]
    return _truncate(family, v, resolved, ell), len(resolved) >= min(ell, palette_size)
