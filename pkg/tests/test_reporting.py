import json

import pytest

from walklocus.errors import ConfigError, FormatError
from walklocus.reporting import (
    EstimateReport,
    config_digest,
    merge_reports,
    report_from_json_dict,
    wilson_interval,
)


def make_report(replicates=100, successes=40, failures=0, **kwargs):
    defaults = dict(
        kind="demo",
        config={"kind": "demo", "dimension": 5, "seed": 1},
        replicates=replicates,
        successes=successes,
        failures=failures,
    )
    defaults.update(kwargs)
    return EstimateReport(**defaults)


# ------------------------------------------------------------------- wilson


def test_wilson_boundary_cases():
    assert wilson_interval(0, 7)[0] == 0.0
    assert wilson_interval(7, 7)[1] == 1.0


def test_wilson_literature_value():
    lo, hi = wilson_interval(50, 100)
    assert lo == pytest.approx(0.40383, abs=2e-4)
    assert hi == pytest.approx(0.59617, abs=2e-4)


def test_wilson_contains_point_estimate():
    for successes, trials in ((0, 5), (1, 9), (3, 10), (49, 50), (500, 1000)):
        lo, hi = wilson_interval(successes, trials)
        assert lo <= successes / trials <= hi
        assert 0.0 <= lo <= hi <= 1.0


def test_wilson_narrows_with_trials():
    narrow = wilson_interval(400, 1000)
    wide = wilson_interval(40, 100)
    assert narrow[1] - narrow[0] < wide[1] - wide[0]


def test_wilson_validation():
    with pytest.raises(ConfigError, match="trial"):
        wilson_interval(0, 0)
    with pytest.raises(ConfigError, match="outside"):
        wilson_interval(5, 3)
    with pytest.raises(ConfigError, match="level"):
        wilson_interval(1, 2, level=1.0)


# ------------------------------------------------------------------ reports


def test_report_counts_and_headline():
    report = make_report(replicates=10, successes=3, failures=2)
    assert report.effective_trials == 8
    assert report.misses == 5
    assert report.estimate == pytest.approx(3 / 8)
    lo, hi = report.interval
    assert lo <= report.estimate <= hi


def test_report_count_validation():
    with pytest.raises(ConfigError, match="successes"):
        make_report(replicates=10, successes=9, failures=2)
    with pytest.raises(ConfigError, match="failures"):
        make_report(replicates=10, successes=0, failures=11)
    with pytest.raises(ConfigError, match="replicate"):
        make_report(replicates=-1, successes=0)


def test_all_failures_degenerate_but_serializable():
    report = make_report(replicates=5, successes=0, failures=5)
    assert report.estimate == 0.0
    assert report.interval == (0.0, 1.0)
    json.loads(report.canonical_bytes())


def test_canonical_bytes_ignore_wall_clock_and_threads():
    a = make_report(wall_clock_s=0.5, threads=1)
    b = make_report(wall_clock_s=9.5, threads=16)
    assert a.canonical_bytes() == b.canonical_bytes()
    assert a.to_json_dict()["wall_clock_s"] != b.to_json_dict()["wall_clock_s"]


def test_digest_tracks_config_only():
    a = make_report()
    b = make_report(successes=41)
    assert a.digest == b.digest
    c = make_report(config={"kind": "demo", "dimension": 6, "seed": 1})
    assert c.digest != a.digest
    assert config_digest({"b": 1, "a": 2}) == config_digest({"a": 2, "b": 1})


def test_digest_rejects_non_json_config():
    with pytest.raises(ConfigError, match="serializable"):
        make_report(config={"bad": float("nan")}).digest


def test_json_roundtrip():
    report = make_report(extra={"note": "x", "count": 3}, wall_clock_s=1.25, threads=4)
    doc = json.loads(json.dumps(report.to_json_dict()))
    back = report_from_json_dict(doc)
    assert back.canonical_bytes() == report.canonical_bytes()
    assert back.wall_clock_s == 1.25
    assert back.threads == 4


def test_from_json_rejects_tampering():
    doc = make_report().to_json_dict()
    bad = dict(doc, successes=doc["successes"] + 1)
    with pytest.raises(FormatError, match="estimate|digest|match"):
        report_from_json_dict(bad)
    bad = dict(doc, estimate=0.99)
    with pytest.raises(FormatError, match="estimate"):
        report_from_json_dict(bad)
    bad = dict(doc, config=dict(doc["config"], seed=2))
    with pytest.raises(FormatError, match="digest"):
        report_from_json_dict(bad)
    bad = dict(doc, schema="walk-locus/0")
    with pytest.raises(FormatError, match="schema"):
        report_from_json_dict(bad)
    bad = dict(doc, seed_scheme="other/v9")
    with pytest.raises(FormatError, match="seed scheme"):
        report_from_json_dict(bad)
    bad = dict(doc)
    del bad["wilson_low"]
    with pytest.raises(FormatError, match="missing"):
        report_from_json_dict(bad)
    with pytest.raises(FormatError, match="object"):
        report_from_json_dict([doc])


# -------------------------------------------------------------------- merge


def test_merge_matches_monolithic():
    whole = make_report(replicates=100, successes=37, extra={"hits": 37, "bias": 0.5})
    shards = [
        make_report(replicates=30, successes=11, extra={"hits": 11, "bias": 0.5}),
        make_report(replicates=70, successes=26, extra={"hits": 26, "bias": 0.5}),
    ]
    merged = merge_reports(shards)
    assert merged.canonical_bytes() == whole.canonical_bytes()
    flipped = merge_reports(shards[::-1])
    assert flipped.canonical_bytes() == whole.canonical_bytes()


def test_merge_sums_failures_and_takes_max_threads():
    merged = merge_reports(
        [
            make_report(replicates=10, successes=2, failures=1, threads=2, wall_clock_s=1.0),
            make_report(replicates=10, successes=3, failures=2, threads=8, wall_clock_s=2.0),
        ]
    )
    assert merged.replicates == 20
    assert merged.successes == 5
    assert merged.failures == 3
    assert merged.threads == 8
    assert merged.wall_clock_s == pytest.approx(3.0)


def test_merge_rejects_mismatched_configs():
    a = make_report()
    b = make_report(config={"kind": "demo", "dimension": 6, "seed": 1})
    with pytest.raises(ConfigError, match="different configurations"):
        merge_reports([a, b])
    with pytest.raises(ConfigError, match="empty"):
        merge_reports([])


def test_merge_extra_rules():
    # ints accumulate, everything else must agree exactly; bools are not ints
    a = make_report(extra={"n": 1, "flag": True, "tag": "x"})
    b = make_report(extra={"n": 2, "flag": True, "tag": "x"})
    assert merge_reports([a, b]).extra == {"n": 3, "flag": True, "tag": "x"}
    c = make_report(extra={"n": 1, "flag": False, "tag": "x"})
    with pytest.raises(ConfigError, match="disagree"):
        merge_reports([a, c])
    d = make_report(extra={"n": 1, "flag": True})
    with pytest.raises(ConfigError, match="extra fields"):
        merge_reports([a, d])
