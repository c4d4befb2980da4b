"""Tally bookkeeping shared by every Monte Carlo entry point.

A report couples the raw counts (replicates, successes, failures) with the
exact configuration that produced them, a stable digest of that
configuration, and a Wilson score interval. Reports serialize to a
versioned JSON document whose canonical byte form excludes wall-clock and
thread count, so determinism contracts can be checked byte-for-byte across
scheduling differences. Shard reports merge by summing counts; the merge is
commutative and associative and reproduces the monolithic report exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Iterable, Optional, Tuple

from .errors import ConfigError, FormatError
from .lattice import STREAM_SCHEME

SCHEMA = "walk-locus/1"

# Report fields that legitimately vary between byte-identical runs.
_VOLATILE_FIELDS = ("wall_clock_s", "threads")


def wilson_interval(successes: int, trials: int, level: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion, clamped to [0, 1]."""
    if trials < 1:
        raise ConfigError("wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise ConfigError(f"successes {successes} outside [0, {trials}]")
    if not 0.0 < level < 1.0:
        raise ConfigError(f"confidence level must lie in (0, 1), got {level}")
    z = NormalDist().inv_cdf(0.5 + level / 2.0)
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def _canonical_json(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False)


def config_digest(config: dict) -> str:
    """sha256 hex digest of the canonicalized config document."""
    try:
        blob = _canonical_json(config)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config is not canonical-JSON serializable: {exc}") from exc
    return hashlib.sha256(blob.encode("ascii")).hexdigest()


@dataclass(frozen=True)
class EstimateReport:
    """Monte Carlo tally with its provenance.

    `failures` are replicates that produced no usable verdict (an estimator
    declining to answer, a budget running out); they are disclosed but kept
    out of the headline rate, which is successes / (replicates - failures).
    Replicates that ran to completion without success are misses.
    """

    kind: str
    config: dict
    replicates: int
    successes: int
    failures: int = 0
    extra: dict = field(default_factory=dict)
    level: float = 0.95
    wall_clock_s: float = 0.0
    threads: int = 1

    def __post_init__(self) -> None:
        if self.replicates < 0:
            raise ConfigError("replicate count must be >= 0")
        if not 0 <= self.failures <= self.replicates:
            raise ConfigError(f"failures {self.failures} outside [0, {self.replicates}]")
        if not 0 <= self.successes <= self.replicates - self.failures:
            raise ConfigError(
                f"successes {self.successes} outside [0, {self.replicates - self.failures}]"
            )
        if not 0.0 < self.level < 1.0:
            raise ConfigError(f"confidence level must lie in (0, 1), got {self.level}")

    @property
    def effective_trials(self) -> int:
        return self.replicates - self.failures

    @property
    def misses(self) -> int:
        return self.effective_trials - self.successes

    @property
    def estimate(self) -> float:
        if self.effective_trials == 0:
            return 0.0
        return self.successes / self.effective_trials

    @property
    def interval(self) -> Tuple[float, float]:
        if self.effective_trials == 0:
            return (0.0, 1.0)
        return wilson_interval(self.successes, self.effective_trials, self.level)

    @property
    def digest(self) -> str:
        return config_digest(self.config)

    def to_json_dict(self) -> dict:
        lo, hi = self.interval
        return {
            "schema": SCHEMA,
            "kind": self.kind,
            "config": self.config,
            "config_digest": self.digest,
            "seed_scheme": STREAM_SCHEME,
            "replicates": self.replicates,
            "successes": self.successes,
            "failures": self.failures,
            "misses": self.misses,
            "estimate": self.estimate,
            "level": self.level,
            "wilson_low": lo,
            "wilson_high": hi,
            "extra": self.extra,
            "wall_clock_s": self.wall_clock_s,
            "threads": self.threads,
        }

    def canonical_bytes(self) -> bytes:
        doc = self.to_json_dict()
        for key in _VOLATILE_FIELDS:
            del doc[key]
        return _canonical_json(doc).encode("ascii")


def report_from_json_dict(doc: dict) -> EstimateReport:
    """Parse and cross-validate a report document; FormatError on any lie."""
    if not isinstance(doc, dict):
        raise FormatError("report document must be a JSON object")
    if doc.get("schema") != SCHEMA:
        raise FormatError(f"unsupported report schema {doc.get('schema')!r}")
    required = (
        "kind",
        "config",
        "config_digest",
        "replicates",
        "successes",
        "failures",
        "estimate",
        "wilson_low",
        "wilson_high",
    )
    missing = [key for key in required if key not in doc]
    if missing:
        raise FormatError(f"report document missing fields: {', '.join(missing)}")
    try:
        report = EstimateReport(
            kind=doc["kind"],
            config=doc["config"],
            replicates=doc["replicates"],
            successes=doc["successes"],
            failures=doc["failures"],
            extra=doc.get("extra", {}),
            level=doc.get("level", 0.95),
            wall_clock_s=doc.get("wall_clock_s", 0.0),
            threads=doc.get("threads", 1),
        )
    except (ConfigError, TypeError) as exc:
        raise FormatError(f"inconsistent report counts: {exc}") from exc
    if doc["config_digest"] != report.digest:
        raise FormatError("config digest does not match the config document")
    if "seed_scheme" in doc and doc["seed_scheme"] != STREAM_SCHEME:
        raise FormatError(f"unknown seed scheme {doc['seed_scheme']!r}")
    checks = (
        ("estimate", report.estimate),
        ("wilson_low", report.interval[0]),
        ("wilson_high", report.interval[1]),
    )
    for key, expect in checks:
        got = doc[key]
        if not isinstance(got, (int, float)) or not math.isclose(got, expect, abs_tol=1e-12):
            raise FormatError(f"report field {key} does not match its recomputation")
    if "misses" in doc and doc["misses"] != report.misses:
        raise FormatError("report field misses does not match its recomputation")
    return report


def _merge_extra(acc: dict, new: dict) -> dict:
    """Integers accumulate across shards; anything else must agree exactly."""
    out = dict(acc)
    if set(out) != set(new):
        raise ConfigError("shard reports disagree on extra fields")
    for key, val in new.items():
        if isinstance(val, bool) or not isinstance(val, int):
            if out[key] != val:
                raise ConfigError(f"shard reports disagree on extra field {key!r}")
        else:
            out[key] = out[key] + val
    return out


def merge_reports(reports: Iterable[EstimateReport]) -> EstimateReport:
    """Combine shard tallies into one report (order-independent)."""
    shards = list(reports)
    if not shards:
        raise ConfigError("cannot merge an empty collection of reports")
    head = shards[0]
    replicates, successes, failures = 0, 0, 0
    extra: Optional[dict] = None
    wall = 0.0
    threads = 0
    for rep in shards:
        if rep.kind != head.kind or rep.digest != head.digest or rep.level != head.level:
            raise ConfigError("cannot merge reports with different configurations")
        replicates += rep.replicates
        successes += rep.successes
        failures += rep.failures
        extra = dict(rep.extra) if extra is None else _merge_extra(extra, rep.extra)
        wall += rep.wall_clock_s
        threads = max(threads, rep.threads)
    return EstimateReport(
        kind=head.kind,
        config=head.config,
        replicates=replicates,
        successes=successes,
        failures=failures,
        extra=extra if extra is not None else {},
        level=head.level,
        wall_clock_s=wall,
        threads=threads,
    )
