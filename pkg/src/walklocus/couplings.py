"""Step-sequence bijections and the meet-then-follow coupling.

The bijections act on step sequences and leave the step distribution
invariant: reverse_steps negates and reverses (an involution), rotate_steps
cycles the last step to the front, and reroute_steps moves the first step
to the back with a sign fix-up chosen so that composing rotate after
reroute twice gives the identity. Their point is what they do to traces:
the reversed walk's trace is the original trace shifted by -X_n, and on
sequences whose first two steps cancel the rerouted walk's trace is the
original shifted by -X_1. Those shift identities are what make traces
ambiguous about their starting vertex.

The coupling half runs one reference walk and k followers from distinct
even-parity starts. Each follower steps independently until it first shares
a vertex with the reference at the same time, then copies the reference's
steps forever. On recurrent lattices all followers eventually couple and
the reference eventually re-traverses everyone's early edges, at which
point all k+1 traces are the same point set and no estimator can tell the
starts apart.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import ConfigError
from .lattice import LatticePoint, StepSequence, Walk, origin, random_steps, rng_stream
from .reporting import EstimateReport


def reverse_steps(steps: StepSequence) -> StepSequence:
    """Negated reversal (s_1..s_n) -> (-s_n..-s_1); self-inverse."""
    if len(steps) < 1:
        raise ConfigError("cannot reverse an empty step sequence")
    return StepSequence(
        steps.dimension,
        steps.axes[::-1].copy(),
        (-steps.signs[::-1]).astype(np.int8),
    )


def rotate_steps(steps: StepSequence) -> StepSequence:
    """Cycle the last step to the front: (s_1..s_n) -> (s_n, s_1..s_{n-1})."""
    if len(steps) < 1:
        raise ConfigError("cannot rotate an empty step sequence")
    return StepSequence(
        steps.dimension,
        np.roll(steps.axes, 1),
        np.roll(steps.signs, 1),
    )


def reroute_steps(steps: StepSequence) -> StepSequence:
    """Move the first step to the back, sign-fixed in two backtrack cases.

    With s = (s_1..s_n): if s_1 = -s_2 the appended step is -s_n; otherwise
    if s_1 = -s_n it is -s_2; otherwise s_1 itself. Composing rotate_steps
    after this map is an involution, which makes this map a bijection.
    """
    if len(steps) < 3:
        raise ConfigError("rerouting needs at least three steps")
    axes, signs = steps.axes, steps.signs
    if axes[0] == axes[1] and signs[0] == -signs[1]:
        tail_axis, tail_sign = axes[-1], -signs[-1]
    elif axes[0] == axes[-1] and signs[0] == -signs[-1]:
        tail_axis, tail_sign = axes[1], -signs[1]
    else:
        tail_axis, tail_sign = axes[0], signs[0]
    return StepSequence(
        steps.dimension,
        np.concatenate([axes[1:], [tail_axis]]),
        np.concatenate([signs[1:], [tail_sign]]).astype(np.int8),
    )


def middle_drift(steps: StepSequence) -> int:
    """l1 displacement of steps 3..n-1, the walk's middle stretch.

    When the first two steps cancel and this drift exceeds 5, the four
    candidate sources 0, X_n, X_1, X_1 + X_n(rerouted) are pairwise
    distinct, so the reversal and reroute shift identities pin four
    genuinely different starting vertices on one trace.
    """
    if len(steps) < 3:
        raise ConfigError("the middle stretch needs at least three steps")
    disp = steps.displacements()[2 : len(steps) - 1]
    return int(np.abs(disp.sum(axis=0)).sum())


# ---------------------------------------------------------------- couplings


def _lex_greater(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rowwise lexicographic a > b for equal-shape integer matrices."""
    out = np.zeros(a.shape[0], dtype=bool)
    open_ = np.ones(a.shape[0], dtype=bool)
    for col in range(a.shape[1]):
        gt = open_ & (a[:, col] > b[:, col])
        lt = open_ & (a[:, col] < b[:, col])
        out |= gt
        open_ &= ~(gt | lt)
    return out


def _point_sets(walk: Walk, upto: Optional[int]) -> Tuple[np.ndarray, np.ndarray]:
    pos = walk.positions()
    if upto is not None:
        if not 0 <= upto <= walk.n:
            raise ConfigError(f"prefix length {upto} outside [0, {walk.n}]")
        pos = pos[: upto + 1]
    vertices = np.unique(pos, axis=0)
    head, tail = pos[:-1], pos[1:]
    swap = _lex_greater(head, tail)
    lo = np.where(swap[:, None], tail, head)
    hi = np.where(swap[:, None], head, tail)
    edges = np.unique(np.hstack([lo, hi]), axis=0)
    return vertices, edges


def traces_coincide(walks: Sequence[Walk], upto: Optional[int] = None) -> bool:
    """Whether all walks have the same embedded trace (vertices and edges).

    With upto, only the first upto steps of each walk count.
    """
    if not walks:
        raise ConfigError("trace comparison needs at least one walk")
    ref_vertices, ref_edges = _point_sets(walks[0], upto)
    for walk in walks[1:]:
        vertices, edges = _point_sets(walk, upto)
        if vertices.shape != ref_vertices.shape or edges.shape != ref_edges.shape:
            return False
        if not (np.array_equal(vertices, ref_vertices) and np.array_equal(edges, ref_edges)):
            return False
    return True


@dataclass(frozen=True)
class CouplingOutcome:
    """One coupled replicate: the reference walk, its followers, meet times.

    meet_times[i] is the first time follower i occupies the reference's
    vertex (None if that never happens within the horizon); from that time
    on the follower's positions equal the reference's.
    """

    reference: Walk
    followers: Tuple[Walk, ...]
    meet_times: Tuple[Optional[int], ...]

    @property
    def all_coupled_by(self) -> Optional[int]:
        if any(t is None for t in self.meet_times):
            return None
        return max((t for t in self.meet_times), default=0)

    def walks(self) -> Tuple[Walk, ...]:
        return (self.reference,) + self.followers


def default_starts(dimension: int, k: int) -> Tuple[LatticePoint, ...]:
    """k distinct even-parity starts 0, 2e_1, 4e_1, ... on the first axis."""
    if dimension < 1:
        raise ConfigError("dimension must be >= 1")
    if k < 1:
        raise ConfigError(f"walk count must be >= 1, got {k}")
    zero = origin(dimension)
    return tuple((2 * i,) + zero[1:] for i in range(k))


def couple_walks(
    dimension: int,
    starts: Sequence[LatticePoint],
    n: int,
    rng: np.random.Generator,
) -> CouplingOutcome:
    """Meet-then-follow coupling of followers from starts with one reference.

    The reference walks n steps from the origin; follower i walks from
    starts[i] with its own independent steps until the first time t with
    equal positions, then mirrors the reference's steps. Steps are drawn
    from rng in a fixed order (reference first, then followers in start
    order), so outcomes are reproducible per stream.

    Starts must sit at even l1 distance from the origin; the walks move
    simultaneously, so an odd-parity follower could never meet.
    """
    if n < 1:
        raise ConfigError(f"horizon must be >= 1, got {n}")
    if not starts:
        raise ConfigError("at least one follower start is required")
    for point in starts:
        if len(point) != dimension:
            raise ConfigError(f"start {point} does not have dimension {dimension}")
        if sum(abs(c) for c in point) % 2 != 0:
            raise ConfigError(
                f"start {point} has odd distance to the origin; "
                "simultaneous walks can never meet"
            )
    if len(set(starts)) != len(starts):
        raise ConfigError("follower starts must be distinct")

    reference = Walk(origin(dimension), random_steps(dimension, n, rng))
    ref_pos = reference.positions()
    followers = []
    meet_times = []
    for point in starts:
        own = random_steps(dimension, n, rng)
        own_pos = Walk(tuple(point), own).positions()
        hits = np.flatnonzero((own_pos == ref_pos).all(axis=1))
        if hits.size == 0:
            followers.append(Walk(tuple(point), own))
            meet_times.append(None)
            continue
        met = int(hits[0])
        spliced = StepSequence(
            dimension,
            np.concatenate([own.axes[:met], reference.steps.axes[met:]]),
            np.concatenate([own.signs[:met], reference.steps.signs[met:]]).astype(np.int8),
        )
        followers.append(Walk(tuple(point), spliced))
        meet_times.append(met)
    return CouplingOutcome(reference, tuple(followers), tuple(meet_times))


def amnesia_experiment(
    dimension: int,
    k: int,
    n: int,
    t1: int,
    t2: int,
    replicates: int,
    seed: int,
    threads: int = 1,
    starts: Optional[Sequence[LatticePoint]] = None,
) -> EstimateReport:
    """Trace-equality frequency of k coupled walks on a recurrent lattice.

    A replicate succeeds when all k follower traces equal the reference
    trace at horizon n. The budgets t1 (coupling) and t2 (covering) do not
    affect success; they split the diagnostics: the extra tally records how
    many replicates had every follower coupled by t1, how many had all
    traces already equal by t1 + t2, and how many never fully coupled.
    """
    if dimension not in (1, 2):
        raise ConfigError(
            "trace coupling is only guaranteed on recurrent lattices; "
            f"use dimension 1 or 2, got {dimension}"
        )
    if t1 < 0 or t2 < 0:
        raise ConfigError("budgets must be >= 0")
    if n < 1:
        raise ConfigError(f"horizon must be >= 1, got {n}")
    if t1 + t2 > n:
        raise ConfigError(
            f"budgets t1 + t2 = {t1 + t2} exceed the horizon {n}; "
            "the covering check needs the walk to reach it"
        )
    if replicates < 1:
        raise ConfigError(f"replicates must be >= 1, got {replicates}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    chosen = tuple(tuple(p) for p in (starts if starts is not None else default_starts(dimension, k)))
    if len(chosen) != k:
        raise ConfigError(f"expected {k} starts, got {len(chosen)}")
    started = time.perf_counter()

    def run_shard(lo: int, hi: int) -> Tuple[int, int, int, int]:
        equal = coupled_in_t1 = equal_in_budget = never = 0
        for rep in range(lo, hi):
            outcome = couple_walks(dimension, chosen, n, rng_stream(seed, rep))
            walks = outcome.walks()
            equal += traces_coincide(walks)
            by = outcome.all_coupled_by
            coupled_in_t1 += by is not None and by <= t1
            equal_in_budget += traces_coincide(walks, upto=t1 + t2)
            never += by is None
        return equal, coupled_in_t1, equal_in_budget, never

    if threads == 1:
        tallies = [run_shard(0, replicates)]
    else:
        width = -(-replicates // threads)
        spans = [
            (lo, min(lo + width, replicates)) for lo in range(0, replicates, width)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(lambda s: run_shard(*s), spans))
    totals = [sum(t[i] for t in tallies) for i in range(4)]

    config = {
        "kind": "amnesia",
        "dimension": dimension,
        "walks": k,
        "horizon": n,
        "t1": t1,
        "t2": t2,
        "replicates": replicates,
        "seed": seed,
        "starts": [list(p) for p in chosen],
    }
    return EstimateReport(
        kind="amnesia",
        config=config,
        replicates=replicates,
        successes=totals[0],
        failures=0,
        extra={
            "coupled_within_t1": totals[1],
            "equal_by_t1_plus_t2": totals[2],
            "never_coupled": totals[3],
        },
        wall_clock_s=time.perf_counter() - started,
        threads=threads,
    )
