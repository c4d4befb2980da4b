"""Trace graphs of lattice walks.

A trace graph records which vertices a walk visited and which lattice edges
connect them. Two kinds exist: the edge trace keeps only traversed step edges;
the vertex trace keeps every lattice edge between visited vertices. Vertices
are indexed in first-visit order, which downstream tie-breaking relies on.

This module also hosts the linear-time cut-edge sweeps. An edge of the walk is
a cut edge when the vertices seen up to it and the vertices seen after it are
disjoint; the induced variant additionally forbids any lattice adjacency
between the two sides other than the edge's own endpoints. Both reduce to
running maxima of per-vertex last-visit indices, so a whole walk is swept with
a handful of numpy passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .errors import BudgetExceededError, ConfigError, FormatError
from .lattice import LatticePoint, StepSequence, Walk, origin, random_steps, rng_stream

SCHEMA = "walk-locus/1"

_TRACE_FIELDS = ("dimension", "kind", "vertices", "edges", "first_visit", "source_index")


def _row_index(rows: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Factorize (N, d) coordinate rows into first-visit-ordered vertex ids.

    Returns (ids, unique_rows, first_visit, last_visit): ids[t] is the vertex
    id of row t, unique_rows[v] its coordinates, and first/last_visit[v] the
    first and last row index at which vertex v occurs.
    """
    n = rows.shape[0]
    if n == 0:
        empty = np.empty(0, dtype=np.int64)
        return empty, rows.copy(), empty.copy(), empty.copy()
    order = np.lexsort(rows.T[::-1])
    srows = rows[order]
    new = np.empty(n, dtype=bool)
    new[0] = True
    if n > 1:
        np.any(srows[1:] != srows[:-1], axis=1, out=new[1:])
    gid_sorted = np.cumsum(new) - 1
    gids = np.empty(n, dtype=np.int64)
    gids[order] = gid_sorted
    starts = np.flatnonzero(new)
    ends = np.append(starts[1:], n) - 1
    # lexsort is stable, so each group's order[] entries ascend in time
    first_time = order[starts]
    last_time = order[ends]
    rank = np.empty(starts.size, dtype=np.int64)
    rank[np.argsort(first_time, kind="stable")] = np.arange(starts.size)
    ids = rank[gids]
    fv = np.sort(first_time)
    inv = np.empty(starts.size, dtype=np.int64)
    inv[rank] = np.arange(starts.size)
    return ids, rows[fv], fv, last_time[inv]


def _box_keys(coords: np.ndarray) -> Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Pack coordinate rows into collision-free int64 keys.

    The bounding box is widened by one cell per side so that the key of any
    lattice neighbour of an in-box point is still unique; this is what lets
    adjacency probing work by pure key arithmetic. Returns (keys, strides,
    lows) or None when the box would overflow 63 bits.
    """
    if coords.shape[0] == 0:
        return np.empty(0, dtype=np.int64), np.ones(coords.shape[1], dtype=np.int64), np.zeros(
            coords.shape[1], dtype=np.int64
        )
    lows = coords.min(axis=0).astype(np.int64) - 1
    spans = coords.max(axis=0).astype(np.int64) - lows + 2
    total_bits = 0.0
    for s in spans.tolist():
        total_bits += float(np.log2(float(s)))
    if total_bits >= 62.0:
        return None
    strides = np.empty(coords.shape[1], dtype=np.int64)
    acc = 1
    for a in range(coords.shape[1] - 1, -1, -1):
        strides[a] = acc
        acc *= int(spans[a])
    keys = (coords - lows) @ strides
    return keys, strides, lows


def _adjacent_pairs(coords: np.ndarray) -> np.ndarray:
    """All unordered pairs of rows at l1 distance exactly 1, as (E, 2) ids."""
    nv, d = coords.shape
    if nv == 0:
        return np.empty((0, 2), dtype=np.int64)
    packed = _box_keys(coords)
    pairs = []
    if packed is not None:
        keys, strides, _ = packed
        order = np.argsort(keys, kind="stable")
        skeys = keys[order]
        for a in range(d):
            probe = keys + strides[a]
            pos = np.searchsorted(skeys, probe)
            pos[pos == nv] = 0
            hit = skeys[pos] == probe
            left = np.flatnonzero(hit)
            if left.size:
                pairs.append(np.column_stack([left, order[pos[left]]]))
    else:
        index = {tuple(int(x) for x in coords[v]): v for v in range(nv)}
        rows = []
        for v in range(nv):
            base = tuple(int(x) for x in coords[v])
            for a in range(d):
                u = index.get(base[:a] + (base[a] + 1,) + base[a + 1 :])
                if u is not None:
                    rows.append((v, u))
        if rows:
            pairs.append(np.asarray(rows, dtype=np.int64))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    out = np.concatenate(pairs, axis=0)
    return np.sort(out, axis=1)


@dataclass
class TraceProvenance:
    """Walk segment a trace was built from; enables the fast diameter path."""

    walk: Walk
    i: int
    j: int


class TraceGraph:
    """Immutable visited-vertex graph of a walk segment (or a parsed file)."""

    __slots__ = (
        "dimension",
        "kind",
        "coords",
        "first_visit",
        "edges",
        "source_index",
        "provenance",
        "_adj",
        "_point_index",
    )

    def __init__(
        self,
        dimension: int,
        kind: str,
        coords: np.ndarray,
        first_visit: np.ndarray,
        edges: np.ndarray,
        source_index: Optional[int],
        provenance: Optional[TraceProvenance] = None,
    ) -> None:
        if kind not in ("edge", "vertex"):
            raise ConfigError(f"unknown trace kind {kind!r}")
        self.dimension = dimension
        self.kind = kind
        self.coords = coords
        self.first_visit = first_visit
        self.edges = edges
        self.source_index = source_index
        self.provenance = provenance
        self._adj = None
        self._point_index = None

    @property
    def n_vertices(self) -> int:
        return int(self.coords.shape[0])

    @property
    def n_edges(self) -> int:
        return int(self.edges.shape[0])

    def vertex(self, idx: int) -> LatticePoint:
        return tuple(int(x) for x in self.coords[idx])

    def index_of(self, point: LatticePoint) -> Optional[int]:
        if self._point_index is None:
            self._point_index = {
                tuple(int(x) for x in self.coords[v]): v for v in range(self.n_vertices)
            }
        return self._point_index.get(tuple(point))

    def adjacency(self) -> Tuple[np.ndarray, np.ndarray]:
        """CSR adjacency: (indptr, flat neighbour ids)."""
        if self._adj is None:
            nv = self.n_vertices
            if self.n_edges:
                src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
                dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
                order = np.argsort(src, kind="stable")
                counts = np.bincount(src, minlength=nv)
                indptr = np.zeros(nv + 1, dtype=np.int64)
                np.cumsum(counts, out=indptr[1:])
                self._adj = (indptr, dst[order])
            else:
                self._adj = (np.zeros(nv + 1, dtype=np.int64), np.empty(0, dtype=np.int64))
        return self._adj

    def degree(self) -> np.ndarray:
        indptr, _ = self.adjacency()
        return np.diff(indptr)


def _dedupe_edges(pairs: np.ndarray, n_vertices: int) -> np.ndarray:
    if pairs.shape[0] == 0:
        return np.empty((0, 2), dtype=np.int64)
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    packed = np.unique(lo * np.int64(n_vertices) + hi)
    return np.column_stack([packed // n_vertices, packed % n_vertices])


def _segment_bounds(walk: Walk, i: int, j: Optional[int]) -> Tuple[int, int]:
    jj = walk.n if j is None else j
    if not 0 <= i <= jj <= walk.n:
        raise ConfigError(f"segment [{i}, {jj}] outside walk of {walk.n} steps")
    return i, jj


def build_trace(walk: Walk, i: int = 0, j: Optional[int] = None) -> TraceGraph:
    """Edge trace of the walk segment [i, j]: traversed step edges only."""
    i, j = _segment_bounds(walk, i, j)
    pos = walk.positions()[i : j + 1]
    ids, coords, fv, _ = _row_index(pos)
    if j > i:
        pairs = np.column_stack([ids[:-1], ids[1:]])
        edges = _dedupe_edges(pairs, coords.shape[0])
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    return TraceGraph(
        walk.dimension, "edge", coords, fv, edges, 0, TraceProvenance(walk, i, j)
    )


def build_vertex_trace(walk: Walk, i: int = 0, j: Optional[int] = None) -> TraceGraph:
    """Vertex trace: every lattice edge between visited vertices is present."""
    i, j = _segment_bounds(walk, i, j)
    pos = walk.positions()[i : j + 1]
    _, coords, fv, _ = _row_index(pos)
    edges = _dedupe_edges(_adjacent_pairs(coords), max(coords.shape[0], 1))
    return TraceGraph(
        walk.dimension, "vertex", coords, fv, edges, 0, TraceProvenance(walk, i, j)
    )


def segment_cut_flags(
    walk: Walk, i: int = 0, j: Optional[int] = None, induced: bool = False
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Cut-edge flags for every edge of the walk segment [i, j].

    Edge k (segment-relative, 0-based) is flagged when the vertex sets of
    [i, i+k] and [i+k+1, j] are disjoint. With induced=True a second flag
    array is returned that additionally requires the two sides to have no
    lattice adjacency besides the edge's own endpoint pair.
    """
    i, j = _segment_bounds(walk, i, j)
    length = j - i
    if length == 0:
        empty = np.zeros(0, dtype=bool)
        return empty, (empty.copy() if induced else None)
    pos = walk.positions()[i : j + 1]
    ids, coords, first, last = _row_index(pos)
    arr_last = last[ids]
    acc = np.maximum.accumulate(arr_last)
    k = np.arange(length, dtype=np.int64)
    cut = acc[:length] <= k
    if not induced:
        return cut, None
    # An adjacent vertex pair (a, b) joins the two sides of edge k exactly
    # when last(a) <= k < first(b). Under cut[k] the edge's own endpoint pair
    # always does, so the edge is an induced cut iff it is the only one.
    pairs = _adjacent_pairs(coords)
    lo_parts = []
    hi_parts = []
    for a, b in ((pairs[:, 0], pairs[:, 1]), (pairs[:, 1], pairs[:, 0])):
        crosses = last[a] < first[b]
        lo_parts.append(last[a][crosses])
        hi_parts.append(first[b][crosses])
    lo = np.concatenate(lo_parts) if lo_parts else np.empty(0, dtype=np.int64)
    hi = np.concatenate(hi_parts) if hi_parts else np.empty(0, dtype=np.int64)
    delta = np.bincount(lo, minlength=length + 1).astype(np.int64)
    delta -= np.bincount(hi, minlength=length + 1)
    crossings = np.cumsum(delta)[:length]
    ind = cut & (crossings == 1)
    return cut, ind


def walk_until_range(
    dimension: int,
    target: int,
    seed: int,
    budget: Optional[int] = None,
    start: Optional[LatticePoint] = None,
    stream_path: Tuple[int, ...] = (),
) -> Walk:
    """Walk until exactly `target` distinct vertices have been visited.

    The returned walk is stopped at the step that discovered the target-th
    vertex (zero steps when target == 1). Raises BudgetExceededError if the
    step budget (default 10_000 * target, essential for d <= 2) runs out.
    """
    if target < 1:
        raise ConfigError("target range must be >= 1")
    cap = 10_000 * target if budget is None else budget
    if cap < 0:
        raise ConfigError("budget must be >= 0")
    rng = rng_stream(seed, *stream_path)
    base = start if start is not None else origin(dimension)
    seen = {base}
    if target == 1:
        return Walk(base, StepSequence.from_pairs(dimension, []))
    axes_chunks = []
    signs_chunks = []
    current = np.asarray(base, dtype=np.int64)
    taken = 0
    while taken < cap:
        chunk = min(max(1024, target), cap - taken)
        steps = random_steps(dimension, chunk, rng)
        disp = steps.displacements()
        np.cumsum(disp, axis=0, out=disp)
        disp += current
        axes_chunks.append(steps.axes)
        signs_chunks.append(steps.signs)
        for t in range(chunk):
            seen.add(tuple(int(x) for x in disp[t]))
            if len(seen) == target:
                tau = taken + t + 1
                axes = np.concatenate(axes_chunks)[:tau]
                signs = np.concatenate(signs_chunks)[:tau]
                return Walk(base, StepSequence(dimension, axes, signs))
        current = disp[-1].copy()
        taken += chunk
    raise BudgetExceededError(
        f"visited {len(seen)} < {target} distinct vertices within {cap} steps"
    )


def trace_to_json_dict(g: TraceGraph) -> dict:
    return {
        "schema": SCHEMA,
        "dimension": g.dimension,
        "kind": g.kind,
        "vertices": g.coords.tolist(),
        "edges": g.edges.tolist(),
        "first_visit": g.first_visit.tolist(),
        "source_index": None if g.source_index is None else int(g.source_index),
    }


def trace_from_json_dict(doc: dict) -> TraceGraph:
    missing = [f for f in _TRACE_FIELDS if f not in doc]
    if missing:
        raise FormatError(f"trace document missing fields: {missing}")
    kind = doc["kind"]
    if kind not in ("edge", "vertex"):
        raise FormatError(f"unknown trace kind {kind!r}")
    dimension = int(doc["dimension"])
    if dimension < 1:
        raise FormatError("dimension must be >= 1")
    coords = np.asarray(doc["vertices"], dtype=np.int64)
    if coords.size == 0:
        coords = coords.reshape(0, dimension)
    if coords.ndim != 2 or coords.shape[1] != dimension:
        raise FormatError("vertices must be a list of d-tuples")
    nv = coords.shape[0]
    edges = np.asarray(doc["edges"], dtype=np.int64)
    if edges.size == 0:
        edges = edges.reshape(0, 2)
    if edges.ndim != 2 or edges.shape[1] != 2:
        raise FormatError("edges must be a list of [u, v] index pairs")
    if edges.shape[0]:
        if edges.min() < 0 or edges.max() >= nv:
            raise FormatError("edge endpoint out of range")
        gaps = np.abs(coords[edges[:, 0]] - coords[edges[:, 1]]).sum(axis=1)
        if not np.all(gaps == 1):
            raise FormatError("edges must join lattice neighbours")
    fv = np.asarray(doc["first_visit"], dtype=np.int64)
    if fv.shape != (nv,):
        raise FormatError("first_visit length must match vertex count")
    src = doc["source_index"]
    if src is not None:
        src = int(src)
        if not 0 <= src < nv:
            raise FormatError("source_index out of range")
    edges = _dedupe_edges(edges, max(nv, 1))
    return TraceGraph(dimension, kind, coords, fv, edges, src)


def walk_to_json_dict(walk: Walk) -> dict:
    return {
        "schema": SCHEMA,
        "kind": "walk",
        "dimension": walk.dimension,
        "start": [int(x) for x in walk.start],
        "axes": walk.steps.axes.tolist(),
        "signs": walk.steps.signs.tolist(),
    }


def walk_from_json_dict(doc: dict) -> Walk:
    for f in ("dimension", "start", "axes", "signs"):
        if f not in doc:
            raise FormatError(f"walk document missing field {f!r}")
    dimension = int(doc["dimension"])
    start = tuple(int(x) for x in doc["start"])
    axes = np.asarray(doc["axes"], dtype=np.int64)
    signs = np.asarray(doc["signs"], dtype=np.int8)
    try:
        steps = StepSequence(dimension, axes, signs)
        return Walk(start, steps)
    except ConfigError as exc:
        raise FormatError(str(exc)) from exc
