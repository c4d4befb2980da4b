"""CLI tests: subcommand wiring, output formats, exit codes."""

import json

import pytest
from click.testing import CliRunner

from walklocus.cli import main


@pytest.fixture()
def runner():
    return CliRunner()


def test_help_lists_every_subcommand(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for name in ["walk", "cutedges", "estimate-c", "localize",
                 "experiment", "exact", "amnesia", "report"]:
        assert name in result.output


def test_exact_emits_the_rational_in_json(runner):
    result = runner.invoke(
        main, ["exact", "-q", "return-probability", "-d", "2", "--n", "2"]
    )
    assert result.exit_code == 0
    value = json.loads(result.output)["value"]["rational"]
    assert (value["numerator"], value["denominator"]) == ("9", "64")


def test_exact_csv_flattens_the_value(runner):
    result = runner.invoke(
        main,
        ["--format", "csv", "exact", "-q", "return-probability", "-d", "1", "--n", "1"],
    )
    header, row = result.output.strip().splitlines()
    assert "rational.numerator" in header
    assert "1,2" in row  # 1/2


def test_walk_csv_lists_one_row_per_vertex(runner):
    result = runner.invoke(
        main, ["--format", "csv", "--seed", "4", "walk", "-d", "2", "-n", "30"]
    )
    lines = result.output.strip().splitlines()
    assert lines[0] == "index,x0,x1,first_visit"
    json_result = runner.invoke(main, ["--seed", "4", "walk", "-d", "2", "-n", "30"])
    assert len(lines) - 1 == json.loads(json_result.output)["n_vertices"]


def test_walk_then_localize_round_trip(runner):
    with runner.isolated_filesystem():
        saved = runner.invoke(
            main,
            ["--seed", "9", "--out", "walk.json",
             "walk", "-d", "5", "-n", "300", "--include-walk"],
        )
        assert saved.exit_code == 0
        psi = runner.invoke(
            main,
            ["--seed", "3", "localize", "-i", "walk.json",
             "-e", "psi", "--truth", "0,0,0,0,0"],
        )
        assert psi.exit_code == 0
        assert json.loads(psi.output)["success"] in (True, False)
        gamma = runner.invoke(
            main,
            ["--seed", "3", "localize", "-i", "walk.json",
             "-e", "gamma", "--truth", "0,0,0,0,0"],
        )
        assert gamma.exit_code == 0


def test_localize_gamma_without_the_walk_document(runner):
    with runner.isolated_filesystem():
        saved = runner.invoke(
            main, ["--seed", "9", "--out", "t.json", "walk", "-d", "3", "-n", "50"]
        )
        assert saved.exit_code == 0
        result = runner.invoke(main, ["localize", "-i", "t.json", "-e", "gamma"])
        assert result.exit_code == 2
        assert "include-walk" in result.output


def test_localize_rejects_malformed_truth(runner):
    with runner.isolated_filesystem():
        runner.invoke(main, ["--out", "t.json", "walk", "-d", "2", "-n", "10"])
        result = runner.invoke(
            main, ["localize", "-i", "t.json", "-e", "psi", "--truth", "a,b"]
        )
        assert result.exit_code == 2


def test_cutedges_block_csv(runner):
    result = runner.invoke(
        main,
        ["--format", "csv", "--seed", "1", "cutedges", "-d", "5", "-n", "256",
         "-m", "20", "--density", "3/5"],
    )
    lines = result.output.strip().splitlines()
    assert lines[0] == "block,lo,hi,count,met,event_a"
    assert len(lines) > 2


def test_experiment_csv_report_row(runner):
    result = runner.invoke(
        main,
        ["--format", "csv", "--seed", "3",
         "experiment", "-d", "2", "-e", "psi", "-r", "25", "-n", "32"],
    )
    assert result.exit_code == 0
    header, row = result.output.strip().splitlines()
    assert header.startswith("kind,replicates,successes")
    assert row.split(",")[1] == "25"


def test_thread_env_var_does_not_change_the_numbers(runner):
    args = ["--format", "csv", "--seed", "13",
            "experiment", "-d", "3", "-e", "psi", "-r", "40", "-n", "64"]
    serial = runner.invoke(main, args)
    threaded = runner.invoke(main, args, env={"WALKLOCUS_THREADS": "4"})
    assert serial.output == threaded.output


def test_failed_replicates_trip_exit_code_3(runner):
    args = ["experiment", "-d", "5", "-e", "gamma", "-r", "4", "-n", "100",
            "--max-horizon", "2"]
    strict = runner.invoke(main, args)
    assert strict.exit_code == 3
    forgiving = runner.invoke(main, ["--failure-threshold", "1.0", *args])
    assert forgiving.exit_code == 0


def test_config_errors_exit_2(runner):
    # max_horizon without gamma is rejected by the experiment config
    result = runner.invoke(
        main,
        ["experiment", "-d", "2", "-e", "psi", "-r", "5", "-n", "16",
         "--max-horizon", "8"],
    )
    assert result.exit_code == 2
    divergent = runner.invoke(main, ["exact", "-q", "tail-sum", "-d", "2", "--k", "1"])
    assert divergent.exit_code == 2


def test_range_budget_blowup_exits_3(runner):
    result = runner.invoke(
        main,
        ["walk", "-d", "1", "--trace", "range", "--range-target", "500",
         "--budget", "600"],
    )
    assert result.exit_code == 3


def test_report_merges_shard_files(runner):
    with runner.isolated_filesystem():
        for idx, path in enumerate(["a.json", "b.json"]):
            saved = runner.invoke(
                main,
                ["--seed", "3", "--out", path,
                 "experiment", "-d", "2", "-e", "psi", "-r", "20", "-n", "32"],
            )
            assert saved.exit_code == 0
        merged = runner.invoke(main, ["report", "a.json", "b.json"])
        assert merged.exit_code == 0
        body = json.loads(merged.output)
        assert body["count"] == 2
        assert body["merged"]["replicates"] == 40

        single = runner.invoke(main, ["--format", "csv", "report", "a.json"])
        assert single.output.strip().splitlines()[1].split(",")[1] == "20"


def test_report_refuses_junk(runner):
    with runner.isolated_filesystem():
        with open("junk.json", "w") as fh:
            json.dump({"schema": "nope"}, fh)
        result = runner.invoke(main, ["report", "junk.json"])
        assert result.exit_code == 2


def test_amnesia_subcommand_reports(runner):
    result = runner.invoke(
        main,
        ["--seed", "5", "amnesia", "-d", "1", "-k", "2", "-n", "128",
         "--t1", "64", "--t2", "64", "-r", "40"],
    )
    assert result.exit_code == 0
    report = json.loads(result.output)["report"]
    assert report["kind"] == "amnesia"
    assert report["replicates"] == 40


def test_amnesia_custom_starts_parse(runner):
    ok = runner.invoke(
        main,
        ["amnesia", "-d", "1", "-k", "2", "-n", "64", "--t1", "32", "--t2", "32",
         "-r", "10", "--start", "0", "--start", "4"],
    )
    assert ok.exit_code == 0
    bad = runner.invoke(
        main,
        ["amnesia", "-d", "1", "-k", "2", "-n", "64", "--t1", "32", "--t2", "32",
         "-r", "10", "--start", "zero", "--start", "4"],
    )
    assert bad.exit_code == 2


def test_out_writes_the_artifact_to_disk(runner):
    with runner.isolated_filesystem():
        result = runner.invoke(
            main, ["--out", "report.json", "--seed", "1",
                   "experiment", "-d", "2", "-e", "psi", "-r", "10", "-n", "16"]
        )
        assert result.exit_code == 0
        with open("report.json") as fh:
            assert json.load(fh)["report"]["replicates"] == 10
