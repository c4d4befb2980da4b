"""Exact graph computations on trace graphs.

Distances, balls, components, and the diameter machinery: the diameter of a
trace, the complete list of diametric vertex pairs, and arbitrary-precision
shortest-path counts per pair. Estimators consume the pair list as sampling
weights, so completeness and exactness here are load-bearing.

Two diameter engines live here. The generic one finds all diametric pairs
through eccentricity-bounded sweeps and works on any connected graph. The
chain engine applies to traces that carry their generating walk: cut edges
are bridges that split the trace into temporally ordered chunks threaded on
a path, so cross-chunk distances decompose as alpha(u) + beta(v) + 1 with
per-vertex offsets, and a prefix-max scan finds the diameter without touching
all pairs. Chunks without revisits are plain paths handled by index
arithmetic; the rest get batched all-pairs in compiled code. Both engines
agree exactly; tests cross-check them on random walks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components as _scipy_components
from scipy.sparse.csgraph import dijkstra as _scipy_dijkstra

from .errors import ConfigError
from .trace import TraceGraph, segment_cut_flags
from .trace import _row_index  # shared vertex labeling; ids must match TraceGraph

_DENSE_LIMIT = 6000  # largest vertex count for a dense all-pairs matrix


# ----------------------------------------------------------------- primitives


def _csr_bfs(
    indptr: np.ndarray,
    nbrs: np.ndarray,
    sources: np.ndarray,
    n: int,
    max_radius: Optional[int] = None,
) -> np.ndarray:
    """Vectorized multi-source BFS; -1 marks unreached vertices."""
    dist = np.full(n, -1, dtype=np.int64)
    frontier = np.asarray(sources, dtype=np.int64)
    if frontier.size == 0:
        return dist
    dist[frontier] = 0
    radius = 0
    while frontier.size and (max_radius is None or radius < max_radius):
        radius += 1
        starts = indptr[frontier]
        counts = indptr[frontier + 1] - starts
        total = int(counts.sum())
        if total == 0:
            break
        base = np.repeat(starts, counts)
        step = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(counts) - counts, counts)
        cand = nbrs[base + step]
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        cand = np.unique(cand)
        dist[cand] = radius
        frontier = cand
    return dist


def _sparse_matrix(n: int, edges: np.ndarray) -> csr_matrix:
    if edges.shape[0]:
        data = np.ones(edges.shape[0], dtype=np.int8)
        return csr_matrix((data, (edges[:, 0], edges[:, 1])), shape=(n, n))
    return csr_matrix((n, n), dtype=np.int8)


def _dense_all_pairs(n: int, edges: np.ndarray) -> np.ndarray:
    """All-pairs hop distances in compiled code; inf marks other components."""
    return _scipy_dijkstra(_sparse_matrix(n, edges), directed=False, unweighted=True)


def _check_vertex(g: TraceGraph, idx: int) -> None:
    if not 0 <= idx < g.n_vertices:
        raise ConfigError(f"vertex index {idx} out of range (graph has {g.n_vertices})")


def bfs_distances(g: TraceGraph, source: int) -> np.ndarray:
    """Exact hop distances from source; -1 for unreachable vertices."""
    _check_vertex(g, source)
    row = _scipy_dijkstra(
        _sparse_matrix(g.n_vertices, g.edges),
        directed=False,
        unweighted=True,
        indices=source,
    )
    return np.where(np.isinf(row), -1, row).astype(np.int64)


def ball(g: TraceGraph, center: int, radius: int) -> np.ndarray:
    """Vertex ids at graph distance <= radius from center, ascending."""
    _check_vertex(g, center)
    if radius < 0:
        raise ConfigError("radius must be >= 0")
    indptr, nbrs = g.adjacency()
    dist = _csr_bfs(indptr, nbrs, np.array([center]), g.n_vertices, max_radius=radius)
    return np.flatnonzero(dist >= 0)


def shortest_path_counts(
    g: TraceGraph, source: int, dist: Optional[np.ndarray] = None
) -> list:
    """Number of shortest paths from source to every vertex (Python ints)."""
    _check_vertex(g, source)
    if dist is None:
        dist = bfs_distances(g, source)
    indptr, nbrs = g.adjacency()
    order = np.argsort(dist, kind="stable")
    counts = [0] * g.n_vertices
    counts[source] = 1
    for v in order.tolist():
        dv = int(dist[v])
        if dv <= 0:
            continue
        total = 0
        for w in nbrs[indptr[v] : indptr[v + 1]].tolist():
            if dist[w] == dv - 1:
                total += counts[w]
        counts[v] = total
    return counts


def all_pairs_distances(g: TraceGraph, limit: int = _DENSE_LIMIT) -> np.ndarray:
    """Dense (V, V) distance matrix; guarded against accidental huge inputs."""
    nv = g.n_vertices
    if nv > limit:
        raise ConfigError(f"all-pairs matrix for {nv} vertices exceeds limit {limit}")
    mat = _dense_all_pairs(nv, g.edges)
    out = np.where(np.isfinite(mat), mat, -1).astype(np.int32)
    return out


def connected_component_labels(g: TraceGraph, keep_edges: Optional[np.ndarray] = None):
    """(n_components, label array) using an optional boolean edge mask."""
    edges = g.edges if keep_edges is None else g.edges[keep_edges]
    return _scipy_components(_sparse_matrix(g.n_vertices, edges), directed=False)


def residual_components(g: TraceGraph, removed_edges: Sequence[Tuple[int, int]]) -> List[np.ndarray]:
    """Components left after deleting the given edges, in temporal order.

    Each removed edge must exist in g. Components are sorted by their earliest
    first_visit, which is unique since first visits are distinct instants.
    """
    edge_index = {}
    for row in range(g.n_edges):
        u, v = int(g.edges[row, 0]), int(g.edges[row, 1])
        edge_index[(u, v)] = row
        edge_index[(v, u)] = row
    keep = np.ones(g.n_edges, dtype=bool)
    for u, v in removed_edges:
        row = edge_index.get((int(u), int(v)))
        if row is None:
            raise ConfigError(f"edge ({u}, {v}) is not an edge of the trace")
        keep[row] = False
    ncomp, labels = connected_component_labels(g, keep)
    comps = [np.flatnonzero(labels == c) for c in range(ncomp)]
    earliest = [int(g.first_visit[c].min()) for c in comps]
    assert len(set(earliest)) == len(earliest)
    return [comp for _, comp in sorted(zip(earliest, comps))]


def induced_subgraph(g: TraceGraph, vertex_ids: np.ndarray) -> Tuple[TraceGraph, np.ndarray]:
    """Induced subgraph on the given vertex ids.

    Returns (subgraph, kept_ids): kept_ids[i] is the original id of the
    subgraph's vertex i. Vertex order (hence first-visit order) is preserved.
    The subgraph keeps original first_visit values so temporal tie-breaking
    still works; source_index survives only if the source vertex is kept.
    """
    ids = np.unique(np.asarray(vertex_ids, dtype=np.int64))
    if ids.size and (ids[0] < 0 or ids[-1] >= g.n_vertices):
        raise ConfigError("vertex id out of range")
    relabel = np.full(g.n_vertices, -1, dtype=np.int64)
    relabel[ids] = np.arange(ids.size)
    if g.n_edges:
        mask = (relabel[g.edges[:, 0]] >= 0) & (relabel[g.edges[:, 1]] >= 0)
        edges = relabel[g.edges[mask]]
    else:
        edges = np.empty((0, 2), dtype=np.int64)
    src = None
    if g.source_index is not None and relabel[g.source_index] >= 0:
        src = int(relabel[g.source_index])
    sub = TraceGraph(
        g.dimension, g.kind, g.coords[ids], g.first_visit[ids], edges, src
    )
    return sub, ids


# ------------------------------------------------------------ pair structures


@dataclass
class PairGroup:
    """A structured family of diametric pairs sharing one distance witness.

    cross=True: every (u, v) in us x vs is diametric, with shortest-path
    count u_counts[i] * between * v_counts[j]. cross=False: pairs are
    zip(us, vs) with counts u_counts (between and v_counts unused).
    """

    us: np.ndarray
    vs: np.ndarray
    u_counts: list
    v_counts: list
    between: int = 1
    cross: bool = True

    @property
    def n_pairs(self) -> int:
        return len(self.us) * len(self.vs) if self.cross else len(self.us)

    @property
    def weight(self) -> int:
        if self.cross:
            return self.between * sum(self.u_counts) * sum(self.v_counts)
        return sum(self.u_counts)

    def iter_pairs(self):
        if self.cross:
            for i, u in enumerate(self.us.tolist()):
                for j, v in enumerate(self.vs.tolist()):
                    yield int(u), int(v), self.u_counts[i] * self.between * self.v_counts[j]
        else:
            for i, u in enumerate(self.us.tolist()):
                yield int(u), int(self.vs[i]), self.u_counts[i]


@dataclass
class DiameterSummary:
    """Exact diameter with the complete set of diametric pairs.

    Pairs are stored as groups to keep astronomically large families
    implicit; `pairs` and `path_counts` materialize them for small graphs.
    """

    diameter: int
    groups: List[PairGroup]
    n_vertices: int

    @property
    def n_pairs(self) -> int:
        return sum(gr.n_pairs for gr in self.groups)

    @property
    def total_weight(self) -> int:
        return sum(gr.weight for gr in self.groups)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return [(u, v) for gr in self.groups for u, v, _ in gr.iter_pairs()]

    @property
    def path_counts(self) -> List[int]:
        return [c for gr in self.groups for _, _, c in gr.iter_pairs()]


def _single_vertex_summary() -> DiameterSummary:
    one = np.zeros(1, dtype=np.int64)
    return DiameterSummary(0, [PairGroup(one, one.copy(), [1], [1], 1, False)], 1)


# ------------------------------------------------------------- generic engine


def diametric_mates(g: TraceGraph) -> Tuple[int, List[Tuple[int, np.ndarray]]]:
    """Exact diameter with every diametric pair, but no path counts.

    Each unordered pair appears exactly once as (u, mates) with u < mate,
    u ascending. Sweeps start from vertex 0 and its farthest vertex; after
    that, only vertices whose eccentricity upper bound min_s(d_s(v) + ecc(s))
    still reaches the best diameter get swept. A vertex of maximum
    eccentricity always keeps a bound >= its true value, so no diametric
    endpoint is ever pruned. Near-path traces finish in a handful of sweeps;
    the worst case degrades to one sweep per vertex.
    """
    nv = g.n_vertices
    if nv == 0:
        raise ConfigError("empty graph has no diameter")
    if nv == 1:
        return 0, []
    mat = _sparse_matrix(nv, g.edges)

    def sweep(source: int) -> np.ndarray:
        row = _scipy_dijkstra(mat, directed=False, unweighted=True, indices=source)
        if np.isinf(row).any():
            raise ConfigError("trace graph is disconnected")
        return row.astype(np.int64)

    upper = np.full(nv, np.iinfo(np.int64).max, dtype=np.int64)
    ecc = np.full(nv, -1, dtype=np.int64)
    rows: dict = {}
    diam = -1
    seeded = False
    pending = [0]
    while True:
        if pending:
            s = pending.pop()
            if ecc[s] >= 0:
                continue
        else:
            cand = np.flatnonzero((ecc < 0) & (upper >= diam))
            if cand.size == 0:
                break
            s = int(cand[np.argmax(upper[cand])])
        row = sweep(s)
        far = int(row.max())
        ecc[s] = far
        if far > diam:
            diam = far
            rows = {v: r for v, r in rows.items() if ecc[v] == diam}
        if far == diam:
            rows[s] = row
        np.minimum(upper, row + far, out=upper)
        if not seeded:
            seeded = True
            pending.append(int(np.argmax(row)))
    pairs = []
    for s in sorted(rows):
        hits = np.flatnonzero(rows[s] == diam)
        hits = hits[hits > s]
        if hits.size:
            pairs.append((s, hits))
    return diam, pairs


def _generic_summary(g: TraceGraph) -> DiameterSummary:
    nv = g.n_vertices
    if nv == 0:
        raise ConfigError("empty graph has no diameter")
    if nv == 1:
        return _single_vertex_summary()
    best, mates = diametric_mates(g)
    groups = []
    for s, hits in mates:
        counts = shortest_path_counts(g, s)
        groups.append(
            PairGroup(
                np.array([s], dtype=np.int64),
                hits,
                [1],
                [counts[int(v)] for v in hits],
                1,
                True,
            )
        )
    return DiameterSummary(best, groups, nv)


# --------------------------------------------------------------- chain engine


def _adjacency_dict(members: np.ndarray, edges: np.ndarray) -> dict:
    adj = {int(v): [] for v in members.tolist()}
    for a, b in edges.tolist():
        adj[a].append(b)
        adj[b].append(a)
    return adj


def _per_vertex_counts(adj: dict, source: int) -> dict:
    """Big-int shortest-path counts from source over a dict adjacency."""
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    counts = {source: 1}
    for u in sorted(dist, key=dist.get):
        if u == source:
            continue
        counts[u] = sum(counts[w] for w in adj[u] if dist.get(w) == dist[u] - 1)
    return counts


class _RevisitChunks:
    """Exact per-chunk distances and path counts for chunks with revisits.

    Vertex ids are contiguous per chunk, so the union of revisit chunks forms
    a block-diagonal graph and compiled multi-source sweeps cover every block
    at once. Full all-pairs runs only per chunk, on demand, for the few
    chunks whose size bound lets them reach the diameter candidate.
    """

    def __init__(self, sub_ids: np.ndarray, edges: np.ndarray, n_total: int, sizes: np.ndarray):
        self.sub_ids = sub_ids
        self.n = sub_ids.size
        # block r occupies sub index range [bounds[r], bounds[r+1])
        self.bounds = np.zeros(sizes.size + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.bounds[1:])
        self.block_rank = np.repeat(np.arange(sizes.size), sizes)
        self.relabel = np.full(n_total, -1, dtype=np.int64)
        self.relabel[sub_ids] = np.arange(self.n)
        self.edges = self.relabel[edges] if edges.shape[0] else edges.reshape(0, 2)
        self.ea = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        self.eb = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        degree = np.bincount(self.eb, minlength=self.n) if self.eb.size else np.ones(1)
        self._guard = (1 << 62) // max(int(degree.max()), 1)
        self._matrix = _sparse_matrix(self.n, self.edges)

    def _block_slice(self, rank: int) -> slice:
        return slice(int(self.bounds[rank]), int(self.bounds[rank + 1]))

    def source_distances(self, sources_global: np.ndarray) -> np.ndarray:
        """Distance from each sub vertex to its own block's source vertex."""
        rows = self.relabel[sources_global]
        mat = _scipy_dijkstra(self._matrix, directed=False, unweighted=True, indices=rows)
        out = mat[self.block_rank, np.arange(self.n)]
        assert np.isfinite(out).all()  # each chunk subgraph is connected
        return out.astype(np.int64)

    def exact_intra(self, rank: int) -> np.ndarray:
        """Dense all-pairs distance matrix for one block."""
        sl = self._block_slice(rank)
        block_edges = self.edges[
            (self.edges[:, 0] >= sl.start) & (self.edges[:, 0] < sl.stop)
        ] - sl.start
        mat = _dense_all_pairs(sl.stop - sl.start, block_edges)
        assert np.isfinite(mat).all()
        return mat.astype(np.int64)

    def path_counts(self, dist: np.ndarray) -> np.ndarray:
        """Int64 DP shortest-path counts toward per-block sources at dist 0."""
        counts = np.zeros(self.n, dtype=np.int64)
        counts[dist == 0] = 1
        lev = dist[self.ea]
        order = np.argsort(lev, kind="stable")
        ea, eb, lev = self.ea[order], self.eb[order], lev[order]
        top = int(dist.max()) if self.n else 0
        cuts = np.searchsorted(lev, np.arange(top + 1))
        for level in range(1, top + 1):
            sel = slice(int(cuts[level - 1]), int(cuts[level]))
            heads = eb[sel]
            tails = ea[sel]
            keep = dist[heads] == level
            heads, tails = heads[keep], tails[keep]
            if heads.size == 0:
                continue
            if counts[tails].max() > self._guard:
                raise OverflowError
            np.add.at(counts, heads, counts[tails])
        return counts

    def chunk_edges_global(self, rank: int) -> np.ndarray:
        sl = self._block_slice(rank)
        keep = (self.edges[:, 0] >= sl.start) & (self.edges[:, 0] < sl.stop)
        return self.sub_ids[self.edges[keep]]


def _chain_summary(g: TraceGraph) -> DiameterSummary:
    prov = g.provenance
    walk, i, j = prov.walk, prov.i, prov.j
    length = j - i
    if length == 0:
        return _single_vertex_summary()
    pos = walk.positions()[i : j + 1]
    ids, coords, first, last = _row_index(pos)
    nv = coords.shape[0]
    assert nv == g.n_vertices
    cut, ind = segment_cut_flags(walk, i, j, induced=(g.kind == "vertex"))
    flags = ind if g.kind == "vertex" else cut
    seps = np.flatnonzero(flags)
    s = seps.size
    if s == 0:
        return _generic_summary(g)
    nchunks = s + 1
    starts = np.concatenate([[0], seps + 1])
    cv = np.searchsorted(starts, first, side="right") - 1
    # first visits ascend with vertex id, so chunks occupy contiguous id blocks
    assert cv[0] == 0 and np.all(np.diff(cv) >= 0)
    sizes = np.bincount(cv, minlength=nchunks)
    vstart = np.zeros(nchunks + 1, dtype=np.int64)
    np.cumsum(sizes, out=vstart[1:])
    entry_id = ids[starts]
    exit_pos = np.concatenate([seps, [length]])
    exit_id = ids[exit_pos]

    t_arr = np.arange(length + 1, dtype=np.int64)
    chunk_pos = np.searchsorted(starts, t_arr, side="right") - 1
    revisit = first[ids] != t_arr
    rev_count = np.bincount(chunk_pos[revisit], minlength=nchunks)

    if g.n_edges:
        ecu = cv[g.edges[:, 0]]
        same = ecu == cv[g.edges[:, 1]]
        inner_edges = g.edges[same]
        inner_chunk = ecu[same]
        edge_count = np.bincount(inner_chunk, minlength=nchunks)
        assert int((~same).sum()) == s
    else:
        inner_edges = np.empty((0, 2), dtype=np.int64)
        inner_chunk = np.empty(0, dtype=np.int64)
        edge_count = np.zeros(nchunks, dtype=np.int64)
    simple = rev_count == 0
    if g.kind == "vertex":
        simple &= edge_count == sizes - 1

    r_v = first - starts[cv]
    dist_entry = np.where(simple[cv], r_v, -1)
    dist_exit = np.where(simple[cv], sizes[cv] - 1 - r_v, -1)
    counts_entry = np.ones(nv, dtype=object)
    counts_exit = np.ones(nv, dtype=object)

    ns = np.flatnonzero(~simple)
    chunks: Optional[_RevisitChunks] = None
    ns_rank = np.full(nchunks, -1, dtype=np.int64)
    if ns.size:
        ns_rank[ns] = np.arange(ns.size)
        member = ~simple[cv]
        sub_ids = np.flatnonzero(member)
        sub_edges = inner_edges[member[inner_edges[:, 0]]] if inner_edges.shape[0] else inner_edges
        chunks = _RevisitChunks(sub_ids, sub_edges, nv, sizes[ns])
        de = chunks.source_distances(entry_id[ns])
        dx = chunks.source_distances(exit_id[ns])
        try:
            ce_list = chunks.path_counts(de).tolist()
            cx_list = chunks.path_counts(dx).tolist()
        except OverflowError:
            ce_list = [0] * chunks.n
            cx_list = [0] * chunks.n
            for rank, t in enumerate(ns.tolist()):
                members = np.arange(vstart[t], vstart[t + 1])
                adj = _adjacency_dict(members, chunks.chunk_edges_global(rank))
                for src_id, dest in ((int(entry_id[t]), ce_list), (int(exit_id[t]), cx_list)):
                    for v, c in _per_vertex_counts(adj, src_id).items():
                        dest[int(chunks.relabel[v])] = c
        dist_entry[sub_ids] = de
        dist_exit[sub_ids] = dx
        counts_entry[sub_ids] = np.array(ce_list, dtype=object)
        counts_exit[sub_ids] = np.array(cx_list, dtype=object)

    through = np.where(simple, sizes - 1, np.int64(-1))
    if ns.size:
        through[ns] = dist_entry[exit_id[ns]]
    w_arr = np.zeros(nchunks, dtype=np.int64)
    np.cumsum(through[:-1] + 1, out=w_arr[1:])
    thr_count = [1] * nchunks
    for t in ns.tolist():
        thr_count[t] = int(counts_entry[int(exit_id[t])])
    cumprod = [1] * (nchunks + 1)
    for t in range(nchunks):
        cumprod[t + 1] = cumprod[t] * thr_count[t]

    w_next = np.concatenate([w_arr[1:], [0]])
    alpha = dist_exit - w_next[cv]
    alpha[cv == nchunks - 1] = np.iinfo(np.int64).min // 2
    beta = dist_entry + w_arr[cv]
    alpha_max = np.maximum.reduceat(alpha, vstart[:-1])
    beta_max = np.maximum.reduceat(beta, vstart[:-1])

    prefix = np.maximum.accumulate(alpha_max)
    cross_best = prefix[:-1] + beta_max[1:] + 1
    d_cross = int(cross_best.max())

    # Exact intra diameters are needed only for chunks whose size bound
    # (distance in a chunk of size m is at most m - 1) can reach d_cross.
    # Simple chunks are paths, so sizes - 1 is already exact for them.
    intra_diam = np.where(simple, sizes - 1, np.int64(-1))
    intra_mats: dict = {}
    if ns.size:
        for t in ns[sizes[ns] - 1 >= d_cross].tolist():
            mat = chunks.exact_intra(int(ns_rank[t]))
            intra_mats[t] = mat
            intra_diam[t] = int(mat.max())
    d_intra = int(intra_diam.max())
    diameter = max(d_cross, d_intra)

    groups: List[PairGroup] = []
    for t in np.flatnonzero(intra_diam == diameter).tolist():
        if simple[t]:
            groups.append(
                PairGroup(
                    np.array([entry_id[t]], dtype=np.int64),
                    np.array([ids[exit_pos[t]]], dtype=np.int64),
                    [1],
                    [1],
                    1,
                    False,
                )
            )
            continue
        members = np.arange(vstart[t], vstart[t + 1])
        block = intra_mats[t]
        aa, bb = np.nonzero(block == diameter)
        keep = aa < bb
        us = members[aa[keep]]
        vs = members[bb[keep]]
        adj = _adjacency_dict(members, chunks.chunk_edges_global(int(ns_rank[t])))
        pair_counts = []
        by_src: dict = {}
        for u, v in zip(us.tolist(), vs.tolist()):
            if u not in by_src:
                by_src[u] = _per_vertex_counts(adj, u)
            pair_counts.append(by_src[u][v])
        groups.append(PairGroup(us, vs, pair_counts, [1] * len(us), 1, False))

    if d_cross == diameter:
        for q in (np.flatnonzero(cross_best == diameter) + 1).tolist():
            target = diameter - 1 - int(beta_max[q])
            v_block = slice(int(vstart[q]), int(vstart[q + 1]))
            v_sel = np.flatnonzero(beta[v_block] == beta_max[q]) + vstart[q]
            v_counts = [int(c) for c in counts_entry[v_sel]]
            for p in np.flatnonzero(alpha_max[:q] == target).tolist():
                u_block = slice(int(vstart[p]), int(vstart[p + 1]))
                u_sel = np.flatnonzero(alpha[u_block] == alpha_max[p]) + vstart[p]
                u_counts = [int(c) for c in counts_exit[u_sel]]
                between = cumprod[q] // cumprod[p + 1]
                groups.append(PairGroup(u_sel, v_sel, u_counts, v_counts, between, True))

    return DiameterSummary(diameter, groups, nv)


def diameter_summary(g: TraceGraph) -> DiameterSummary:
    """Exact diameter, complete diametric pair list, and path counts.

    Uses the chain engine when the trace knows its generating walk, and
    all-pairs BFS otherwise. Raises ConfigError on disconnected input.
    """
    if g.n_vertices == 0:
        raise ConfigError("empty graph has no diameter")
    if g.provenance is not None:
        return _chain_summary(g)
    return _generic_summary(g)
