"""Batch runner tests: config validation, determinism, failure taxonomy."""

from itertools import product

import numpy as np
import pytest

from walklocus.errors import ConfigError
from walklocus.graphalg import diameter_summary
from walklocus.harness import ExperimentConfig, run_diameter_growth, run_experiment
from walklocus.lattice import StepSequence, Walk, origin
from walklocus.reporting import merge_reports
from walklocus.trace import build_trace


def _cfg(**kw):
    base = dict(dimension=2, estimator="psi", replicates=10, seed=1, steps=20)
    base.update(kw)
    return ExperimentConfig(**base)


# ---------------------------------------------------------------- config


def test_config_accepts_the_three_trace_kinds():
    _cfg(trace="edge")
    _cfg(trace="vertex")
    _cfg(trace="range", steps=None, range_target=30)


@pytest.mark.parametrize(
    "kw, fragment",
    [
        (dict(trace="loop"), "trace must be one of"),
        (dict(trace="range", range_target=30), "vertex target, not a step count"),
        (dict(trace="range", steps=None), "range_target"),
        (dict(range_target=30), "only applies to range traces"),
        (dict(budget=100), "range traces only"),
        (dict(trace="range", steps=None, range_target=30, budget=0), "budget"),
        (dict(steps=-1), "steps"),
        (dict(steps=None), "steps"),
        (dict(replicates=0), "replicates"),
        (dict(threads=0), "threads"),
        (dict(dimension=0), "dimension"),
        (dict(dimension=True), "dimension"),
        (dict(estimator="median"), "unknown estimator"),
        (dict(estimator="lambda"), "set size"),
        (dict(max_horizon=64), "gamma estimator only"),
        (dict(estimator="gamma", max_horizon=0), "max_horizon"),
        (dict(estimator="gamma", trace="vertex"), "edge trace"),
    ],
)
def test_config_rejects_bad_combinations(kw, fragment):
    with pytest.raises(ConfigError, match=fragment):
        _cfg(**kw)


def test_config_dict_excludes_execution_plumbing():
    a = _cfg(threads=1, out_path=None).config_dict("experiment")
    b = _cfg(threads=16, out_path="/tmp/report.json").config_dict("experiment")
    assert a == b
    assert "threads" not in a and "out_path" not in a
    assert a["kind"] == "experiment"
    assert set(a) == {
        "kind", "dimension", "trace", "steps", "range_target",
        "budget", "estimator", "max_horizon", "replicates", "seed",
    }


def test_run_experiment_requires_an_estimator():
    cfg = ExperimentConfig(dimension=1, estimator=None, replicates=5, seed=0, steps=8)
    with pytest.raises(ConfigError, match="estimator spec is required"):
        run_experiment(cfg)


# ---------------------------------------------------------------- run_experiment


def test_covering_lambda_succeeds_on_every_replicate():
    # k >= 2(n+1) >= 2|V| makes the chosen set the whole vertex set
    n = 64
    cfg = _cfg(dimension=3, estimator=f"lambda:{2 * (n + 1)}", steps=n, replicates=60)
    report = run_experiment(cfg)
    assert report.estimate == 1.0
    assert report.failures == 0
    assert report.successes == report.replicates == 60


def test_zero_step_walk_is_always_located():
    report = run_experiment(_cfg(dimension=4, steps=0, replicates=25))
    assert report.estimate == 1.0


def test_reports_are_deterministic():
    cfg = _cfg(dimension=5, steps=256, replicates=80, seed=41)
    first = run_experiment(cfg)
    second = run_experiment(cfg)
    assert first.canonical_bytes() == second.canonical_bytes()
    assert first.wall_clock_s != 0.0


def test_thread_count_never_changes_the_numbers():
    serial = run_experiment(_cfg(dimension=5, steps=256, replicates=90, seed=13))
    threaded = run_experiment(_cfg(dimension=5, steps=256, replicates=90, seed=13, threads=4))
    assert serial.canonical_bytes() == threaded.canonical_bytes()


def test_span_shards_merge_to_the_monolithic_report():
    cfg = _cfg(dimension=3, steps=128, replicates=70, seed=29)
    whole = run_experiment(cfg)
    shards = [run_experiment(cfg, span=s) for s in [(0, 23), (23, 51), (51, 70)]]
    merged = merge_reports(shards)
    assert merged.canonical_bytes() == whole.canonical_bytes()
    # merging is order-insensitive
    flipped = merge_reports(shards[::-1])
    assert flipped.canonical_bytes() == whole.canonical_bytes()


def test_each_replicate_is_a_pure_function_of_seed_and_index():
    cfg = _cfg(dimension=2, steps=64, replicates=6, seed=77)
    whole = run_experiment(cfg)
    singles = [run_experiment(cfg, span=(i, i + 1)) for i in range(6)]
    assert sum(r.successes for r in singles) == whole.successes
    assert all(r.replicates == 1 for r in singles)


@pytest.mark.parametrize("span", [(0, 0), (-1, 3), (3, 2), (0, 11)])
def test_bad_spans_are_rejected(span):
    with pytest.raises(ConfigError):
        run_experiment(_cfg(replicates=10), span=span)


def test_gamma_that_cannot_stabilise_counts_as_failure():
    cfg = _cfg(dimension=5, estimator="gamma", steps=200, replicates=12,
               max_horizon=2, seed=5)
    report = run_experiment(cfg)
    assert report.failures == report.replicates == 12
    assert report.extra["unstable"] == 12
    assert report.extra["budget_exhausted"] == 0
    assert report.estimate == 0.0


def test_gamma_with_room_to_stabilise_succeeds_sometimes():
    cfg = _cfg(dimension=5, estimator="gamma", steps=400, replicates=15, seed=6)
    report = run_experiment(cfg)
    assert report.extra["unstable"] <= 1
    assert report.successes > 0


def test_range_budget_exhaustion_is_a_failure_not_a_miss():
    # d=2 walks revisit heavily: 300 fresh vertices almost never fit in 350 steps
    cfg = ExperimentConfig(dimension=2, estimator="psi", replicates=30, seed=9,
                           trace="range", range_target=300, budget=350)
    report = run_experiment(cfg)
    assert report.failures == report.extra["budget_exhausted"] == 30
    assert report.extra["unstable"] == 0


def test_range_trace_runs_when_the_budget_is_generous():
    cfg = ExperimentConfig(dimension=5, estimator="psi", replicates=40, seed=9,
                           trace="range", range_target=256)
    report = run_experiment(cfg)
    assert report.failures == 0
    assert 0 < report.successes < 40


def test_vertex_trace_kind_runs_the_estimator_on_visited_sites():
    cfg = _cfg(dimension=5, trace="vertex", steps=256, replicates=60, seed=3)
    report = run_experiment(cfg)
    assert report.failures == 0
    assert 0 < report.successes < 60


def test_interrupt_yields_a_partial_report(monkeypatch):
    import walklocus.harness as hmod

    real = hmod.localize
    calls = {"n": 0}

    def interrupting(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] > 7:
            raise KeyboardInterrupt
        return real(*args, **kwargs)

    monkeypatch.setattr(hmod, "localize", interrupting)
    report = run_experiment(_cfg(dimension=2, steps=32, replicates=50, seed=2))
    assert report.extra["partial"] is True
    assert report.replicates == 7
    monkeypatch.undo()
    clean = run_experiment(_cfg(dimension=2, steps=32, replicates=50, seed=2, threads=1))
    assert clean.extra["partial"] is False
    # a partial shard refuses to merge with a clean one rather than lying
    with pytest.raises(ConfigError):
        merge_reports([report, clean])


# ---------------------------------------------------------------- diameter growth


def _growth_cfg(**kw):
    base = dict(dimension=1, estimator=None, replicates=400, seed=17, steps=2)
    base.update(kw)
    return ExperimentConfig(**base)


def test_growth_probability_for_two_steps_on_the_line_is_one_half():
    # exact oracle: enumerate all four two-step walks
    grown = 0
    for s1, s2 in product([1, -1], repeat=2):
        walk = Walk(origin(1), StepSequence.from_pairs(1, [(0, s1), (0, s2)]))
        full = diameter_summary(build_trace(walk)).diameter
        clipped = diameter_summary(build_trace(walk, 0, 1)).diameter
        grown += full > clipped
    assert grown / 4 == 0.5

    report = run_diameter_growth(_growth_cfg(replicates=2000, seed=3))
    sigma = (0.25 / 2000) ** 0.5
    assert abs(report.estimate - 0.5) < 3 * sigma


def test_growth_runs_share_walks_with_estimator_runs():
    # same (dimension, steps, seed) means replicate rep sees the same walk
    from walklocus.lattice import generate_walk

    cfg = _growth_cfg(dimension=2, steps=64, replicates=5, seed=99)
    report = run_diameter_growth(cfg)
    by_hand = 0
    for rep in range(5):
        walk = generate_walk(2, 64, 99, stream_path=(rep,))
        full = diameter_summary(build_trace(walk)).diameter
        clipped = diameter_summary(build_trace(walk, 0, 63)).diameter
        by_hand += full > clipped
    assert report.successes == by_hand


def test_growth_is_thread_invariant_and_mergeable():
    whole = run_diameter_growth(_growth_cfg(replicates=300, steps=16))
    threaded = run_diameter_growth(_growth_cfg(replicates=300, steps=16, threads=5))
    assert whole.canonical_bytes() == threaded.canonical_bytes()
    parts = [run_diameter_growth(_growth_cfg(replicates=300, steps=16), span=s)
             for s in [(0, 100), (100, 300)]]
    assert merge_reports(parts).canonical_bytes() == whole.canonical_bytes()


@pytest.mark.parametrize(
    "kw, fragment",
    [
        (dict(estimator="psi"), "leave the estimator unset"),
        (dict(trace="vertex"), "edge trace"),
        (dict(steps=1), "at least 2 steps"),
    ],
)
def test_growth_rejects_misconfigured_runs(kw, fragment):
    with pytest.raises(ConfigError, match=fragment):
        run_diameter_growth(_growth_cfg(**kw))


def test_growth_on_the_line_becomes_rarer_as_walks_lengthen():
    reports = [
        run_diameter_growth(_growth_cfg(steps=n, replicates=1500, seed=21))
        for n in (4, 16, 64)
    ]
    rates = [r.estimate for r in reports]
    assert rates[0] > rates[1] > rates[2] > 0
