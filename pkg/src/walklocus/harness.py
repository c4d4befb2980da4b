"""Batch experiment runner: many independent replicates, one tally.

A replicate draws a fresh walk from a stream derived from (master seed,
replicate index), builds the requested trace, runs the requested estimator
against the walk's true start, and records hit or miss. Replicates where the
estimator declines to answer (gamma never stabilising) or the walk generator
runs out of budget (range traces) are failures: disclosed in the report but
excluded from the headline rate.

The tally is a sum of per-replicate indicators whose randomness is a pure
function of (seed, replicate index), so the thread count can never change the
numbers, and a replicate span [lo, hi) run elsewhere merges exactly into the
monolithic report. Ctrl-C mid-run yields the completed portion with a
``partial`` flag instead of discarding it.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

from .errors import BudgetExceededError, ConfigError
from .estimators import localize, parse_estimator
from .graphalg import diameter_summary
from .lattice import Walk, generate_walk, rng_stream
from .reporting import EstimateReport, wilson_interval
from .trace import build_trace, build_vertex_trace, walk_until_range

__all__ = [
    "ExperimentConfig",
    "run_experiment",
    "run_diameter_growth",
    "wilson_interval",
]

_TRACE_KINDS = ("edge", "vertex", "range")


def _require_int(name: str, value, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's outcome, and nothing else.

    `trace` picks how each replicate's graph is produced: "edge" and "vertex"
    walk for `steps` steps and keep traversed edges or visited vertices;
    "range" walks until `range_target` distinct vertices have been seen (so
    `steps` stays None and `budget`, if set, caps the attempt). `estimator`
    is a spec string ("psi", "lambda:K", "gamma"); it may be None only for
    diameter-growth runs, which tally a walk event rather than an estimator.

    `threads` and `out_path` are execution plumbing. They are excluded from
    the config dict embedded in reports, so runs differing only there are
    byte-identical and mergeable.
    """

    dimension: int
    estimator: Optional[str]
    replicates: int
    seed: int
    steps: Optional[int] = None
    range_target: Optional[int] = None
    trace: str = "edge"
    budget: Optional[int] = None
    max_horizon: Optional[int] = None
    threads: int = 1
    out_path: Optional[str] = None

    def __post_init__(self) -> None:
        _require_int("dimension", self.dimension, 1)
        _require_int("replicates", self.replicates, 1)
        _require_int("seed", self.seed, -(1 << 63))
        _require_int("threads", self.threads, 1)
        if self.trace not in _TRACE_KINDS:
            raise ConfigError(
                f"trace must be one of {_TRACE_KINDS}, got {self.trace!r}"
            )
        if self.trace == "range":
            if self.steps is not None:
                raise ConfigError("range traces take a vertex target, not a step count")
            _require_int("range_target", self.range_target, 1)
            if self.budget is not None:
                _require_int("budget", self.budget, 1)
        else:
            if self.range_target is not None:
                raise ConfigError(f"range_target only applies to range traces, not {self.trace!r}")
            if self.budget is not None:
                raise ConfigError("step budgets apply to range traces only")
            _require_int("steps", self.steps, 0)
        name = None
        if self.estimator is not None:
            name, _ = parse_estimator(self.estimator)
        if self.max_horizon is not None:
            if name != "gamma":
                raise ConfigError("max_horizon applies to the gamma estimator only")
            _require_int("max_horizon", self.max_horizon, 1)
        if name == "gamma" and self.trace == "vertex":
            raise ConfigError(
                "gamma reconstructs from the generating walk's edge trace; "
                "use trace 'edge' or 'range'"
            )

    def config_dict(self, kind: str) -> dict:
        """Stable-schema dict embedded in reports; identity fields only."""
        return {
            "kind": kind,
            "dimension": self.dimension,
            "trace": self.trace,
            "steps": self.steps,
            "range_target": self.range_target,
            "budget": self.budget,
            "estimator": self.estimator,
            "max_horizon": self.max_horizon,
            "replicates": self.replicates,
            "seed": self.seed,
        }


def _resolve_span(cfg: ExperimentConfig, span: Optional[Tuple[int, int]]) -> Tuple[int, int]:
    if span is None:
        return 0, cfg.replicates
    lo, hi = span
    _require_int("span start", lo, 0)
    _require_int("span end", hi, 1)
    if not lo < hi <= cfg.replicates:
        raise ConfigError(
            f"span [{lo}, {hi}) must be a nonempty window inside [0, {cfg.replicates})"
        )
    return lo, hi


def _sum_rows(rows: List[Tuple[int, ...]], width: int) -> Tuple[int, ...]:
    totals = [0] * width
    for row in rows:
        for i, v in enumerate(row):
            totals[i] += v
    return tuple(totals)


def _tally(
    lo: int,
    hi: int,
    threads: int,
    one: Callable[[int], Tuple[int, ...]],
    width: int,
) -> Tuple[Tuple[int, ...], int, bool]:
    """Sum one(rep) over [lo, hi); returns (totals, completed, interrupted).

    Single-threaded runs keep every finished replicate on interrupt. Threaded
    runs shard the span and keep finished shards; shards already running when
    the interrupt lands are allowed to finish so their tallies stay whole.
    """
    if threads == 1:
        rows: List[Tuple[int, ...]] = []
        try:
            for rep in range(lo, hi):
                rows.append(one(rep))
        except KeyboardInterrupt:
            return _sum_rows(rows, width), len(rows), True
        return _sum_rows(rows, width), len(rows), False

    def run_span(a: int, b: int) -> Tuple[Tuple[int, ...], int]:
        local = [one(rep) for rep in range(a, b)]
        return _sum_rows(local, width), len(local)

    # small shards keep the post-interrupt wait short
    shard = max(1, -(-(hi - lo) // (threads * 8)))
    spans = [(a, min(a + shard, hi)) for a in range(lo, hi, shard)]
    pool = ThreadPoolExecutor(max_workers=threads)
    futures = [pool.submit(run_span, *s) for s in spans]
    interrupted = False
    try:
        for fut in futures:
            fut.result()
    except KeyboardInterrupt:
        interrupted = True
        pool.shutdown(wait=True, cancel_futures=True)
    finally:
        pool.shutdown(wait=True)
    done = [f.result() for f in futures if f.done() and not f.cancelled()]
    totals = _sum_rows([t for t, _ in done], width)
    return totals, sum(c for _, c in done), interrupted


def _replicate_walk(cfg: ExperimentConfig, rep: int) -> Walk:
    if cfg.trace == "range":
        return walk_until_range(
            cfg.dimension, cfg.range_target, cfg.seed,
            budget=cfg.budget, stream_path=(rep,),
        )
    return generate_walk(cfg.dimension, cfg.steps, cfg.seed, stream_path=(rep,))


def run_experiment(
    cfg: ExperimentConfig,
    span: Optional[Tuple[int, int]] = None,
) -> EstimateReport:
    """Estimate the estimator's success probability under cfg.

    Per replicate: walk from stream (seed, rep), estimator randomness from
    stream (seed, rep, 1), truth = the walk's start. `span` restricts the run
    to replicate indices [lo, hi) without changing any replicate's outcome,
    so span reports merge exactly into the full-run report.
    """
    if cfg.estimator is None:
        raise ConfigError("an estimator spec is required, e.g. 'psi'")
    lo, hi = _resolve_span(cfg, span)
    started = time.perf_counter()
    name, _ = parse_estimator(cfg.estimator)

    def one(rep: int) -> Tuple[int, int, int]:
        try:
            walk = _replicate_walk(cfg, rep)
        except BudgetExceededError:
            return 0, 0, 1
        rng = rng_stream(cfg.seed, rep, 1)
        if name == "gamma":
            out = localize(walk, cfg.estimator, rng,
                           truth=walk.start, max_horizon=cfg.max_horizon)
        elif cfg.trace == "vertex":
            out = localize(build_vertex_trace(walk), cfg.estimator, rng, truth=walk.start)
        else:
            out = localize(build_trace(walk), cfg.estimator, rng, truth=walk.start)
        if out.unstable:
            return 0, 1, 0
        return int(out.success), 0, 0

    totals, completed, partial = _tally(lo, hi, cfg.threads, one, 3)
    successes, unstable, exhausted = totals
    return EstimateReport(
        kind="experiment",
        config=cfg.config_dict("experiment"),
        replicates=completed,
        successes=successes,
        failures=unstable + exhausted,
        extra={
            "unstable": unstable,
            "budget_exhausted": exhausted,
            "partial": partial,
        },
        wall_clock_s=time.perf_counter() - started,
        threads=cfg.threads,
    )


def run_diameter_growth(
    cfg: ExperimentConfig,
    span: Optional[Tuple[int, int]] = None,
) -> EstimateReport:
    """Estimate the probability that the last step grows the trace diameter.

    Success on a replicate of n steps means diam G[0, n] > diam G[0, n-1].
    Walks come from the same per-replicate streams as run_experiment, so a
    growth run and an estimator run with equal dimension/steps/seed see the
    same walks, replicate by replicate.
    """
    if cfg.estimator is not None:
        raise ConfigError("diameter growth tallies a walk event; leave the estimator unset")
    if cfg.trace != "edge":
        raise ConfigError("the growth event reads the edge trace")
    if cfg.steps < 2:
        raise ConfigError(f"growth needs at least 2 steps, got {cfg.steps}")
    lo, hi = _resolve_span(cfg, span)
    started = time.perf_counter()

    def one(rep: int) -> Tuple[int]:
        walk = _replicate_walk(cfg, rep)
        full = diameter_summary(build_trace(walk)).diameter
        clipped = diameter_summary(build_trace(walk, 0, walk.n - 1)).diameter
        return (int(full > clipped),)

    totals, completed, partial = _tally(lo, hi, cfg.threads, one, 1)
    return EstimateReport(
        kind="diameter-growth",
        config=cfg.config_dict("diameter-growth"),
        replicates=completed,
        successes=totals[0],
        failures=0,
        extra={"partial": partial},
        wall_clock_s=time.perf_counter() - started,
        threads=cfg.threads,
    )
