"""Cut-edge structure of a walk: detection, block schedules, event diagnostics.

Edge k of an n-step walk is a cut-edge when the vertices visited up to time
k and those visited from time k+1 on are disjoint; it is an induced cut-edge
when, additionally, the only lattice adjacency between the two sides is the
edge's own endpoint pair. Cut-edges are bridges of the trace, so they order
the trace into a chain of chunks; most of this module is arithmetic on that
chain: counting cut-edges inside geometric block schedules, deciding the
density and separation events for a segment, and estimating the two-sided
cut density c(d) (and its induced variant) from finite windows.

The window estimator never conflates finite-trace counts with the two-sided
density: it samples a single 2T-step walk and tests its middle edge, which
is distributed exactly as edge 0 of a two-sided walk restricted to T-step
windows. The window indicator dominates the two-sided one, so the estimate
is biased upward by at most an explicit tail bound carried in the report.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .analytics import _PI_LOWER, _half_power_upper, _lclt_tail, _tail_prefactor
from .errors import ConfigError
from .graphalg import PairGroup, diameter_summary
from .lattice import Walk, rng_stream
from .reporting import EstimateReport
from .trace import build_trace, segment_cut_flags

DensityLike = Union[int, float, Fraction]


def _exact_density(value: DensityLike, name: str = "density") -> Fraction:
    """Read a density parameter as an exact rational.

    Floats are taken at printed-decimal face value, so 0.8 means 4/5 rather
    than the nearest binary double; ceiling arithmetic on block sizes would
    otherwise be poisoned by the representation error.
    """
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, bool):
        raise ConfigError(f"{name} must be a number, got a bool")
    elif isinstance(value, int):
        frac = Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigError(f"{name} must be finite, got {value!r}")
        try:
            frac = Fraction(Decimal(str(value)))
        except InvalidOperation as exc:
            raise ConfigError(f"cannot read {name} {value!r} as a decimal") from exc
    else:
        raise ConfigError(f"{name} must be a number, got {type(value).__name__}")
    if not 0 < frac <= 2:
        raise ConfigError(f"{name} must lie in (0, 2], got {value!r}")
    return frac


def _exact_slack(value: DensityLike, name: str) -> Fraction:
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, (int, float)) and not isinstance(value, bool):
        if isinstance(value, float) and not math.isfinite(value):
            raise ConfigError(f"{name} must be finite, got {value!r}")
        frac = Fraction(Decimal(str(value)))
    else:
        raise ConfigError(f"{name} must be a number, got {type(value).__name__}")
    if frac < 0:
        raise ConfigError(f"{name} must be >= 0, got {value!r}")
    return frac


# --------------------------------------------------------------- indicators


@dataclass(frozen=True)
class CutEdgeRecord:
    """Per-edge cut and induced-cut indicators for one walk."""

    n_steps: int
    is_cut: np.ndarray
    is_induced_cut: np.ndarray

    def cut_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_cut)

    def induced_cut_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_induced_cut)


def finite_cut_edges(walk: Walk) -> CutEdgeRecord:
    """Exact cut/induced-cut indicators for every edge of the walk."""
    if walk.n < 1:
        raise ConfigError("cut-edge indicators need a walk of at least one step")
    cut, induced = segment_cut_flags(walk, 0, walk.n, induced=True)
    assert induced is not None
    return CutEdgeRecord(walk.n, cut, induced)


# ---------------------------------------------------------------- schedules


@dataclass(frozen=True)
class Schedule:
    """Geometric block schedule a_0, a_1, ... with partial sums b_n.

    a_0 = m, a_1 = ceil(lam * m), and a_n = ceil(lam * b_{n-2}) for n >= 2,
    where lam = c/8. Blocks are the half-open index windows [b_{n-1}, b_n)
    with b_{-1} = 0. Construction materializes blocks until the partial sum
    reaches the requested horizon.
    """

    m: int
    density: Fraction
    lam: Fraction
    a: Tuple[int, ...]
    b: Tuple[int, ...]

    @property
    def horizon(self) -> int:
        return self.b[-1]

    @property
    def n_blocks(self) -> int:
        return len(self.a)

    def blocks(self) -> List[Tuple[int, int]]:
        lows = (0,) + self.b[:-1]
        return list(zip(lows, self.b))

    def threshold(self, block: int) -> Fraction:
        """Cut-edge quota (c/2) * a_n for one block."""
        return self.density * self.a[block] / 2


def build_schedule(m: int, c: DensityLike, horizon: int) -> Schedule:
    density = _exact_density(c)
    if m < 1:
        raise ConfigError(f"base block size must be >= 1, got {m}")
    if horizon < 1:
        raise ConfigError(f"schedule horizon must be >= 1, got {horizon}")
    lam = density / 8
    a = [m]
    b = [m]
    if b[-1] < horizon:
        a.append(math.ceil(lam * m))
        b.append(b[-1] + a[-1])
    while b[-1] < horizon:
        a.append(math.ceil(lam * b[-2]))
        b.append(b[-1] + a[-1])
    if Fraction(m) >= 8 / density:
        # Both inequalities are theorems under m >= 8/c; check every
        # materialized index rather than trusting the algebra.
        growth = 1 + lam / (1 + lam)
        power = Fraction(1)
        for n in range(2, len(a)):
            assert Fraction(a[n]) >= lam * power * m, "schedule growth invariant failed"
            power *= growth
        for n in range(2, len(a) - 1):
            assert Fraction(a[n] + a[n + 1]) <= density * Fraction(b[n - 1], 2), (
                "schedule block-sum invariant failed"
            )
    return Schedule(m, density, lam, tuple(a), tuple(b))


@dataclass(frozen=True)
class BlockCutCounts:
    """Cut-edge tallies per complete schedule block of one walk."""

    bounds: Tuple[Tuple[int, int], ...]
    counts: Tuple[int, ...]
    met: Tuple[bool, ...]
    event_a: bool


def segment_cut_counts(rec: CutEdgeRecord, schedule: Schedule) -> BlockCutCounts:
    """Count cut-edges inside each complete block; the quota event over all.

    Blocks extending past the last edge index are dropped; the quota event
    is the conjunction over the complete blocks (vacuously true when the
    walk is shorter than the first block).
    """
    if schedule.horizon < rec.n_steps:
        raise ConfigError(
            f"schedule horizon {schedule.horizon} does not cover a "
            f"{rec.n_steps}-edge walk"
        )
    indices = rec.cut_indices()
    bounds: List[Tuple[int, int]] = []
    counts: List[int] = []
    met: List[bool] = []
    for block, (lo, hi) in enumerate(schedule.blocks()):
        if hi > rec.n_steps:
            break
        count = int(np.searchsorted(indices, hi) - np.searchsorted(indices, lo))
        bounds.append((lo, hi))
        counts.append(count)
        met.append(Fraction(count) >= schedule.threshold(block))
    return BlockCutCounts(tuple(bounds), tuple(counts), tuple(met), all(met))


# -------------------------------------------------------------- diagnostics


@dataclass(frozen=True)
class EventDiagnostics:
    """The three segment events, evaluated against a reference density.

    holds_m: cut-edge count within c_ref * (j-i) * [1-delta, 1+delta].
    holds_n: every diametric pair of the segment trace is separated by at
    least (1-eta) * c_ref * (j-i) cut-edges (each lies on every path
    between the pair, cut-edges being bridges).
    holds_c: the trace diameter grows when step j+1 is appended.
    """

    i: int
    j: int
    c_ref: float
    delta: float
    eta: float
    cut_count: int
    diameter: int
    next_diameter: int
    forced_min: int
    holds_m: bool
    holds_n: bool
    holds_c: bool


def _min_pair_gap(a_vals: np.ndarray, b_vals: np.ndarray) -> int:
    """min |a - b| over the full product of two integer arrays."""
    a = np.unique(a_vals)
    pos = np.searchsorted(a, b_vals)
    right = np.minimum(pos, a.size - 1)
    left = np.maximum(pos - 1, 0)
    gaps = np.minimum(np.abs(a[right] - b_vals), np.abs(a[left] - b_vals))
    return int(gaps.min())


def _min_forced_cuts(groups: Sequence[PairGroup], chunk: np.ndarray) -> int:
    """Fewest cut-edges separating any diametric pair.

    chunk[v] counts the cut-edges before v's first visit; a bridge lies on
    every u-v path exactly when it separates their chunks, so the forced
    count for a pair is the chunk difference.
    """
    best: Optional[int] = None
    for group in groups:
        cu = chunk[group.us]
        cv = chunk[group.vs]
        if group.cross:
            gap = _min_pair_gap(cu, cv)
        else:
            gap = int(np.abs(cu - cv).min())
        if best is None or gap < best:
            best = gap
        if best == 0:
            break
    assert best is not None
    return best


def diagnostics(
    walk: Walk,
    i: int,
    j: int,
    delta: DensityLike,
    eta: DensityLike,
    c_ref: DensityLike,
) -> EventDiagnostics:
    """Evaluate the density, separation, and growth events on segment [i, j].

    j must leave one step of headroom: the growth event compares the trace
    of [i, j] against the trace of [i, j+1].
    """
    if not 0 <= i <= j < walk.n:
        raise ConfigError(
            f"diagnostics needs 0 <= i <= j < n, got i={i}, j={j}, n={walk.n}"
        )
    density = _exact_density(c_ref, "c_ref")
    delta_f = _exact_slack(delta, "delta")
    eta_f = _exact_slack(eta, "eta")

    cut = segment_cut_flags(walk, i, j)[0]
    cut_count = int(cut.sum())
    span = Fraction(j - i)
    holds_m = density * span * (1 - delta_f) <= cut_count <= density * span * (1 + delta_f)

    trace_now = build_trace(walk, i, j)
    summary = diameter_summary(trace_now)
    next_summary = diameter_summary(build_trace(walk, i, j + 1))
    holds_c = summary.diameter < next_summary.diameter

    separators = np.flatnonzero(cut)
    chunk = np.searchsorted(separators, trace_now.first_visit, side="left")
    forced = _min_forced_cuts(summary.groups, chunk)
    holds_n = Fraction(forced) >= (1 - eta_f) * density * span

    return EventDiagnostics(
        i=i,
        j=j,
        c_ref=float(density),
        delta=float(delta_f),
        eta=float(eta_f),
        cut_count=cut_count,
        diameter=summary.diameter,
        next_diameter=next_summary.diameter,
        forced_min=forced,
        holds_m=bool(holds_m),
        holds_n=bool(holds_n),
        holds_c=bool(holds_c),
    )


# ---------------------------------------------------------- window sampling


def _sorted_member_count(haystack: np.ndarray, needles: np.ndarray) -> int:
    """How many needles occur in the sorted haystack (both may be empty)."""
    if haystack.size == 0 or needles.size == 0:
        return 0
    pos = np.searchsorted(haystack, needles)
    pos_c = np.minimum(pos, haystack.size - 1)
    return int(np.count_nonzero(haystack[pos_c] == needles))


def _void_rows(rows: np.ndarray) -> np.ndarray:
    width = rows.dtype.itemsize * rows.shape[1]
    return np.ascontiguousarray(rows).view(np.dtype((np.void, width))).ravel()


def _walk_key_track(axes: np.ndarray, signs: np.ndarray, dimension: int):
    """Collision-free box keys of a walk, without materializing positions.

    Each step changes one coordinate by one unit, so the packed key moves by
    exactly +-stride[axis]: the whole key sequence is one cumulative sum of
    per-step key deltas. Per-axis extremes (which size the box) come from the
    per-axis sub-cumsums, since a coordinate only changes at its own steps.
    Returns (keys, strides) or None when the box overflows 63-bit keys.
    """
    lows = np.empty(dimension, dtype=np.int64)
    spans = np.empty(dimension, dtype=np.int64)
    for axis in range(dimension):
        track = np.cumsum(signs[axes == axis])
        lo = int(track.min(initial=0))
        hi = int(track.max(initial=0))
        lows[axis] = lo - 1
        spans[axis] = hi - lo + 3
    total_bits = 0.0
    for span in spans.tolist():
        total_bits += float(np.log2(float(span)))
    if total_bits >= 62.0:
        return None
    strides = np.empty(dimension, dtype=np.int64)
    acc = 1
    for axis in range(dimension - 1, -1, -1):
        strides[axis] = acc
        acc *= int(spans[axis])
    keys = np.empty(axes.size + 1, dtype=np.int64)
    keys[0] = -(lows @ strides)
    np.cumsum(signs * strides[axes], out=keys[1:])
    keys[1:] += keys[0]
    return keys, strides


def _middle_flags_keys(keys: np.ndarray, strides: np.ndarray, window: int, induced: bool):
    prefix = np.sort(keys[: window + 1])
    plain = _sorted_member_count(prefix, keys[window + 1 :]) == 0
    if not induced:
        return plain, None
    if not plain:
        return plain, False
    # adjacent cross pairs are counted once each: deduped suffix plus one
    # probe per unit offset, each hitting at most one prefix key
    suffix = np.unique(keys[window + 1 :])
    matches = 0
    for axis in range(strides.size):
        step = int(strides[axis])
        matches += _sorted_member_count(prefix, suffix + step)
        matches += _sorted_member_count(prefix, suffix - step)
        if matches > 1:
            return plain, False
    # the edge's own endpoint pair is always adjacent across the sides
    assert matches == 1
    return plain, True


def _middle_flags_rows(pos: np.ndarray, window: int, induced: bool):
    # fallback for boxes too large to pack into 63-bit keys
    prefix = np.unique(_void_rows(pos[: window + 1]))
    plain = _sorted_member_count(prefix, _void_rows(pos[window + 1 :])) == 0
    if not induced:
        return plain, None
    if not plain:
        return plain, False
    suffix_rows = np.unique(pos[window + 1 :], axis=0)
    matches = 0
    for axis in range(pos.shape[1]):
        for sign in (1, -1):
            probe = suffix_rows.copy()
            probe[:, axis] += sign
            matches += _sorted_member_count(prefix, _void_rows(probe))
            if matches > 1:
                return plain, False
    assert matches == 1
    return plain, True


def window_flags(
    dimension: int, window: int, rng: np.random.Generator, induced: bool = False
) -> Tuple[bool, Optional[bool]]:
    """One sample of the middle-edge cut indicator over T-step windows.

    Draws a single 2T-step walk; its middle edge is distributed as edge 0 of
    a two-sided walk with each side restricted to a T-step window. Returns
    (cut, induced_cut), the latter None unless requested.
    """
    if dimension < 1:
        raise ConfigError("dimension must be >= 1")
    if window < 1:
        raise ConfigError("window must be >= 1")
    n = 2 * window
    codes = rng.integers(0, 2 * dimension, size=n, dtype=np.int64)
    axes = codes >> 1
    signs = 2 * (codes & 1) - 1
    packed = _walk_key_track(axes, signs, dimension)
    if packed is not None:
        return _middle_flags_keys(packed[0], packed[1], window, induced)
    moves = np.zeros((n, dimension), dtype=np.int64)
    moves[np.arange(n), axes] = signs
    pos = np.empty((n + 1, dimension), dtype=np.int64)
    pos[0] = 0
    np.cumsum(moves, axis=0, out=pos[1:])
    return _middle_flags_rows(pos, window, induced)


def truncation_bias_bounds(
    dimension: int, window: int
) -> Tuple[Optional[float], Optional[float]]:
    """Upper bounds on the window estimator's positive bias for c(d).

    A window sample can only miss a collision between step s of one side
    and step t of the other when s > T or t > T, so the combined time
    m = s + t exceeds T. Union-bounding over the at most m + 1 pairs at
    each even level m, with P(collision at (s, t)) = q_{m/2}, gives

        bias <= sum_{j > T/2} (2j + 1) * q_j,

    evaluated against the certified n^(-d/2) envelope. The second figure
    is the same sum under the coarser displayed envelope (2d/(pi n))^(d/2),
    as a cross-check anyone can re-derive by hand. Both series need d >= 5;
    below that no finite certificate exists and the bounds are None. For
    windows of a few steps the figures exceed 1 and certify nothing.
    """
    if dimension <= 4:
        return None, None
    half = max(1, window // 2)
    tail = 2 * _lclt_tail(dimension, half, 1) + _lclt_tail(dimension, half, 0)
    if window // 2 < 1:
        # the j = 1 term is not covered by the cutoff-1 tail
        tail += 3 * _tail_prefactor(dimension)
    displayed = _half_power_upper(Fraction(2 * dimension) / _PI_LOWER, dimension)
    conservative = tail * displayed / _tail_prefactor(dimension)
    return float(tail), float(conservative)


def estimate_c(
    dimension: int,
    window: int,
    replicates: int,
    seed: int,
    induced: bool = False,
    threads: int = 1,
) -> EstimateReport:
    """Monte Carlo estimate of the two-sided cut density c(d) (or induced).

    Each replicate draws its own Philox stream from (seed, replicate index)
    and samples the window indicator once, so the tally is independent of
    sharding. The headline estimate dominates the true density; the report
    carries the analytic bias bound alongside the Wilson interval.
    """
    if dimension <= 2:
        raise ConfigError(
            f"cut density vanishes for d <= 2 (recurrence); got d={dimension}"
        )
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    if replicates < 1:
        raise ConfigError(f"replicates must be >= 1, got {replicates}")
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    started = time.perf_counter()

    def run_shard(lo: int, hi: int) -> Tuple[int, int]:
        plain_hits = 0
        induced_hits = 0
        for rep in range(lo, hi):
            plain, ind = window_flags(dimension, window, rng_stream(seed, rep), induced)
            plain_hits += plain
            if induced:
                induced_hits += ind
        return plain_hits, induced_hits

    if threads == 1:
        tallies = [run_shard(0, replicates)]
    else:
        width = -(-replicates // threads)
        spans = [
            (lo, min(lo + width, replicates)) for lo in range(0, replicates, width)
        ]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            tallies = list(pool.map(lambda s: run_shard(*s), spans))
    plain_total = sum(t[0] for t in tallies)
    induced_total = sum(t[1] for t in tallies)

    bias, bias_conservative = truncation_bias_bounds(dimension, window)
    config = {
        "kind": "estimate-c",
        "dimension": dimension,
        "window": window,
        "replicates": replicates,
        "seed": seed,
        "induced": induced,
    }
    extra: dict = {
        "truncation_bias_bound": bias,
        "truncation_bias_conservative": bias_conservative,
    }
    if induced:
        extra["plain_successes"] = plain_total
    return EstimateReport(
        kind="estimate-c",
        config=config,
        replicates=replicates,
        successes=induced_total if induced else plain_total,
        failures=0,
        extra=extra,
        wall_clock_s=time.perf_counter() - started,
        threads=threads,
    )
