"""Source estimators that read a walk's trace.

Three strategies are implemented. psi draws a diametrical path uniformly at
random and returns one of its endpoints: realized exactly by sampling a
diametric pair with probability proportional to its shortest-path count,
then flipping a fair endpoint coin. lambda_k draws a diametric *pair*
uniformly (pairs, not paths) and returns the k/2 nearest vertices around
each endpoint. gamma anchors at the lexicographically least visited vertex,
trims the trace at doubling ball horizons, and watches the near endpoints
of the trimmed diameters until they stop moving.

psi and lambda_k are functions of the abstract graph alone; first-visit
order enters only through documented tie-breaks. gamma additionally uses
the walk's final vertex to decide which trimmed component plays the role
of the escaping tail, so it needs the walk, not just the trace.

Path counts can exceed 64 bits, so every weighted draw goes through an
arbitrary-precision rejection sampler; nothing here rounds to float.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import List, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .graphalg import (
    DiameterSummary,
    bfs_distances,
    connected_component_labels,
    diameter_summary,
    diametric_mates,
    induced_subgraph,
)
from .lattice import LatticePoint, Walk
from .trace import TraceGraph, build_trace


# ------------------------------------------------------------------- outcomes


@dataclass(frozen=True)
class EstimatorOutcome:
    """What one estimator run produced.

    chosen_ids/chosen_points hold a single vertex for psi and gamma and a
    set (as a sorted tuple) for lambda_k. unstable=True means gamma never
    settled and chose nothing.
    """

    estimator: str
    chosen_ids: Tuple[int, ...]
    chosen_points: Tuple[LatticePoint, ...]
    diametric_pair: Optional[Tuple[LatticePoint, LatticePoint]] = None
    success: Optional[bool] = None
    unstable: bool = False

    def to_json_dict(self) -> dict:
        pair = None
        if self.diametric_pair is not None:
            pair = [list(self.diametric_pair[0]), list(self.diametric_pair[1])]
        return {
            "estimator": self.estimator,
            "chosen": [list(p) for p in self.chosen_points],
            "diametric_pair": pair,
            "success": self.success,
            "unstable": self.unstable,
        }


@dataclass(frozen=True, eq=False)
class GammaState:
    """Trimming trajectory behind one gamma run.

    history records (horizon, near-endpoint ids) for every evaluated
    horizon; h_graph and h_vertex_ids describe the last trimmed trace,
    with ids mapping its vertices back to the full trace.
    """

    anchor: LatticePoint
    anchor_id: int
    horizon: int
    h_graph: TraceGraph
    h_vertex_ids: np.ndarray
    u_ids: Tuple[int, ...]
    u_points: Tuple[LatticePoint, ...]
    stabilized: bool
    history: Tuple[Tuple[int, Tuple[int, ...]], ...]


# ------------------------------------------------------------------- sampling


def _uniform_below(rng: np.random.Generator, bound: int) -> int:
    """Exact uniform integer in [0, bound) for arbitrarily large bound."""
    if bound <= 0:
        raise ConfigError("cannot sample from an empty range")
    if bound <= (1 << 63):
        return int(rng.integers(bound))
    nbits = bound.bit_length()
    nbytes = (nbits + 7) // 8
    shift = 8 * nbytes - nbits
    while True:
        draw = int.from_bytes(rng.bytes(nbytes), "big") >> shift
        if draw < bound:
            return draw


def _pick_weighted(rng: np.random.Generator, weights: List[int]) -> int:
    r = _uniform_below(rng, sum(weights))
    for idx, weight in enumerate(weights):
        if r < weight:
            return idx
        r -= weight
    raise AssertionError("weights changed under the sampler")


# ------------------------------------------------------------------------ psi


def psi(
    g: TraceGraph,
    rng: np.random.Generator,
    summary: Optional[DiameterSummary] = None,
) -> EstimatorOutcome:
    """Uniform diametrical path, uniform endpoint.

    Sampling a pair proportionally to its shortest-path count and then an
    endpoint uniformly is exactly the endpoint marginal of a uniform draw
    over all diametrical paths. A precomputed summary for g may be passed
    to skip the diameter computation.
    """
    if summary is None:
        summary = diameter_summary(g)
    group = summary.groups[_pick_weighted(rng, [gr.weight for gr in summary.groups])]
    if group.cross:
        u = int(group.us[_pick_weighted(rng, group.u_counts)])
        v = int(group.vs[_pick_weighted(rng, group.v_counts)])
    else:
        row = _pick_weighted(rng, group.u_counts)
        u, v = int(group.us[row]), int(group.vs[row])
    pick = u if int(rng.integers(2)) == 0 else v
    return EstimatorOutcome(
        estimator="psi",
        chosen_ids=(pick,),
        chosen_points=(g.vertex(pick),),
        diametric_pair=(g.vertex(u), g.vertex(v)),
    )


# ------------------------------------------------------------------- lambda_k


def _nearest_ids(g: TraceGraph, center: int, count: int) -> np.ndarray:
    """The count nearest vertex ids around center, center itself first.

    Order: hop distance, then first visit, then lexicographic coordinates.
    """
    dist = bfs_distances(g, center)
    keys = tuple(g.coords[:, axis] for axis in range(g.dimension - 1, -1, -1))
    order = np.lexsort(keys + (g.first_visit, dist))
    return order[: min(count, g.n_vertices)]


def lambda_k(
    g: TraceGraph,
    k: int,
    rng: np.random.Generator,
    summary: Optional[DiameterSummary] = None,
) -> EstimatorOutcome:
    """Uniform diametric pair, then the k/2 nearest vertices per endpoint."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 2 or k % 2:
        raise ConfigError("set size k must be an even integer >= 2")
    if summary is None:
        summary = diameter_summary(g)
    r = _uniform_below(rng, summary.n_pairs)
    for group in summary.groups:
        if r < group.n_pairs:
            break
        r -= group.n_pairs
    if group.cross:
        u = int(group.us[r // len(group.vs)])
        v = int(group.vs[r % len(group.vs)])
    else:
        u, v = int(group.us[r]), int(group.vs[r])
    half = k // 2
    ids = np.union1d(_nearest_ids(g, u, half), _nearest_ids(g, v, half))
    return EstimatorOutcome(
        estimator=f"lambda:{k}",
        chosen_ids=tuple(int(i) for i in ids),
        chosen_points=tuple(g.vertex(int(i)) for i in ids),
        diametric_pair=(g.vertex(u), g.vertex(v)),
    )


# ---------------------------------------------------------------------- gamma


def _lex_least_vertex(g: TraceGraph) -> int:
    keys = tuple(g.coords[:, axis] for axis in range(g.dimension - 1, -1, -1))
    return int(np.lexsort(keys)[0])


def _near_endpoint_ids(
    mates: List[Tuple[int, np.ndarray]], dist: np.ndarray, first_visit: np.ndarray
) -> frozenset:
    """Near endpoint of every diametric pair: smaller distance, then earlier
    first visit on ties."""
    picked = set()
    for u, vs in mates:
        du, fu = int(dist[u]), int(first_visit[u])
        v_wins = (dist[vs] < du) | ((dist[vs] == du) & (first_visit[vs] < fu))
        picked.update(vs[v_wins].tolist())
        if not v_wins.all():
            picked.add(int(u))
    return frozenset(picked)


def gamma_finite(
    walk: Walk,
    rng: np.random.Generator,
    max_horizon: Optional[int] = None,
) -> Tuple[EstimatorOutcome, GammaState]:
    """Trim-and-stabilize estimator on the full edge trace.

    For each doubling horizon h the ball of radius h around the anchor is
    cut out of the trace: delete every edge inside the ball, find the
    component holding the walk's final vertex (the stand-in for the
    escaping tail), and keep everything except that component's non-ball
    vertices. The kept part is connected: ball geodesics survive, and any
    other leftover component can only border the ball. The near endpoints
    of the trimmed trace's diametrical paths form U_h; once U agrees across
    two consecutive doublings the estimator returns a uniform element of
    it. Walks whose U never settles within max_horizon (default: four
    times the first power of two reaching the trace diameter) yield an
    explicit unstable outcome instead of a guess.

    Only the final uniform choice consumes randomness.
    """
    if max_horizon is not None and (
        isinstance(max_horizon, bool) or not isinstance(max_horizon, int) or max_horizon < 1
    ):
        raise ConfigError("max_horizon must be a positive integer")
    g = build_trace(walk)
    anchor = _lex_least_vertex(g)
    anchor_point = g.vertex(anchor)

    if g.n_edges == 0:
        # a lone vertex is isolated by any trim, so nothing can stabilize
        empty, kept = induced_subgraph(g, np.empty(0, dtype=np.int64))
        state = GammaState(
            anchor=anchor_point,
            anchor_id=anchor,
            horizon=1,
            h_graph=empty,
            h_vertex_ids=kept,
            u_ids=(),
            u_points=(),
            stabilized=False,
            history=((1, ()),),
        )
        return EstimatorOutcome("gamma", (), (), unstable=True), state

    dist_x = bfs_distances(g, anchor)
    final = int(
        np.flatnonzero((g.coords == np.asarray(walk.position(walk.n))).all(axis=1))[0]
    )
    full_diam, full_mates = diametric_mates(g)
    full_u = _near_endpoint_ids(full_mates, dist_x, g.first_visit)
    if max_horizon is None:
        cap = 1
        while cap < full_diam:
            cap *= 2
        max_horizon = 4 * cap

    src, dst = g.edges[:, 0], g.edges[:, 1]
    all_ids = np.arange(g.n_vertices, dtype=np.int64)
    history: List[Tuple[int, Tuple[int, ...]]] = []
    prev_drop: Optional[np.ndarray] = None
    u_ids: frozenset = frozenset()
    h_graph, kept = g, all_ids
    stabilized = False
    h = 1
    while h <= max_horizon:
        in_ball_edge = (dist_x[src] <= h) & (dist_x[dst] <= h)
        _, labels = connected_component_labels(g, keep_edges=~in_ball_edge)
        drop = (labels == labels[final]) & (dist_x > h)
        if not drop.any():
            u_ids, h_graph, kept = full_u, g, all_ids
        elif prev_drop is None or not np.array_equal(drop, prev_drop):
            h_graph, kept = induced_subgraph(g, np.flatnonzero(~drop))
            anchor_h = int(np.searchsorted(kept, anchor))
            dist_h = bfs_distances(h_graph, anchor_h)
            assert (dist_h >= 0).all()  # trim keeps everything attached to the ball
            _, mates_h = diametric_mates(h_graph)
            u_ids = frozenset(kept[sorted(_near_endpoint_ids(mates_h, dist_h, h_graph.first_visit))].tolist())
        prev_drop = drop
        history.append((h, tuple(sorted(u_ids))))
        if len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1] and u_ids:
            stabilized = True
            break
        h *= 2

    last_h, last_u = history[-1]
    if stabilized:
        pick = last_u[int(rng.integers(len(last_u)))]
        outcome = EstimatorOutcome(
            "gamma", (pick,), (g.vertex(pick),), unstable=False
        )
    else:
        outcome = EstimatorOutcome("gamma", (), (), unstable=True)
    state = GammaState(
        anchor=anchor_point,
        anchor_id=anchor,
        horizon=last_h,
        h_graph=h_graph,
        h_vertex_ids=kept,
        u_ids=last_u,
        u_points=tuple(g.vertex(i) for i in last_u),
        stabilized=stabilized,
        history=tuple(history),
    )
    return outcome, state


# ------------------------------------------------------------------- dispatch


def parse_estimator(spec: str) -> Tuple[str, Optional[int]]:
    """Parse "psi", "gamma", or "lambda:K" into (name, k)."""
    if spec == "psi" or spec == "gamma":
        return spec, None
    if spec.startswith("lambda:"):
        try:
            return "lambda", int(spec.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad set size in estimator spec {spec!r}") from None
    if spec == "lambda":
        raise ConfigError("lambda needs a set size, e.g. lambda:4")
    raise ConfigError(f"unknown estimator {spec!r}")


def localize(
    trace_or_walk,
    estimator: str,
    rng: np.random.Generator,
    truth: Optional[LatticePoint] = None,
    max_horizon: Optional[int] = None,
) -> EstimatorOutcome:
    """Run one estimator; fill success when the true source is given.

    gamma requires the generating walk. psi and lambda_k accept either a
    walk (its edge trace is built) or a ready trace graph.
    """
    name, k = parse_estimator(estimator)
    if name == "gamma":
        if not isinstance(trace_or_walk, Walk):
            raise ConfigError("gamma needs the generating walk, not a bare trace")
        outcome, _ = gamma_finite(trace_or_walk, rng, max_horizon=max_horizon)
    else:
        g = (
            build_trace(trace_or_walk)
            if isinstance(trace_or_walk, Walk)
            else trace_or_walk
        )
        if not isinstance(g, TraceGraph):
            raise ConfigError("estimators need a Walk or a TraceGraph")
        outcome = psi(g, rng) if name == "psi" else lambda_k(g, k, rng)
    if truth is not None and not outcome.unstable:
        outcome = replace(outcome, success=tuple(truth) in outcome.chosen_points)
    return outcome
