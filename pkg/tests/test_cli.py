import hashlib
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from alertscope.cli import main
from alertscope.service import create_app

CONFIG = {
    "user_count": 100,
    "day_count": 30,
    "target_alerts": 900,
    "noise_budget": 200,
    "seed": 9,
    "start_date": "2021-03-01",
}

SCENARIO_PARAMS = {
    "pseudo_account_flood": {"start": "2021-03-10", "alerts": 150},
    "policy_spike_week": {"week_start": "2021-03-15", "share": 0.2},
    "setup_spike": {"days": 5, "alerts": 100},
}


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli")
    (path / "config.json").write_text(json.dumps(CONFIG))
    return path


@pytest.fixture(scope="module")
def corpus_dir(workdir):
    out = workdir / "corpus"
    rc = main(
        [
            "generate",
            "--out", str(out),
            "--config", str(workdir / "config.json"),
            "--scenario", "setup_spike",
            "--scenario", "pseudo_account_flood",
            "--scenario", "policy_spike_week",
            "--scenario-params", json.dumps(SCENARIO_PARAMS),
        ]
    )
    assert rc == 0
    return out


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def test_generate_deterministic(workdir, corpus_dir):
    again = workdir / "corpus2"
    rc = main(
        [
            "generate",
            "--out", str(again),
            "--config", str(workdir / "config.json"),
            "--scenario", "setup_spike",
            "--scenario", "pseudo_account_flood",
            "--scenario", "policy_spike_week",
            "--scenario-params", json.dumps(SCENARIO_PARAMS),
        ]
    )
    assert rc == 0
    for name in ("events.jsonl", "alerts.jsonl", "manifest.json", "policies.json"):
        assert _digest(corpus_dir / name) == _digest(again / name)


def test_generate_writes_exclusion_config(corpus_dir):
    exclusions = json.loads((corpus_dir / "exclusions.json").read_text())
    assert exclusions["excluded_users"]
    assert len(exclusions["excluded_ranges"]) == 2


def test_generate_prints_stats(workdir, capsys):
    out = workdir / "corpus3"
    main(["generate", "--out", str(out), "--config", str(workdir / "config.json")])
    stats = json.loads(capsys.readouterr().out)
    assert abs(stats["single_event_fraction"] - 0.66) <= 0.03
    assert stats["total_alerts"] == CONFIG["target_alerts"] - CONFIG["noise_budget"]


def test_ingest_reports_counts(corpus_dir, capsys):
    rc = main(["ingest", "--data", str(corpus_dir)])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    expected = manifest["base"]["alerts"] + sum(e["alerts"] for e in manifest["scenarios"])
    assert report["alerts"] == expected


def test_clean_applies_exclusions(corpus_dir, capsys):
    rc = main(["clean", "--data", str(corpus_dir), "--exclusions", str(corpus_dir / "exclusions.json")])
    assert rc == 0
    report = json.loads(capsys.readouterr().out)
    assert report["excluded"] > 0
    assert report["after_exclusions"] == report["stored"] - report["excluded"]
    manifest = json.loads((corpus_dir / "manifest.json").read_text())
    flood = next(e for e in manifest["scenarios"] if e["kind"] == "pseudo_account_flood")
    assert flood["account"] in report["excluded_users"]


def test_stats_after_cleaning(corpus_dir, capsys):
    main(["stats", "--data", str(corpus_dir)])
    stats = json.loads(capsys.readouterr().out)
    # exact cross-check against a brute scan of the files with the same exclusions
    import brute
    from alertscope import wire

    exclusions = wire.exclusions_from_json(json.loads((corpus_dir / "exclusions.json").read_text()))
    with (corpus_dir / "alerts.jsonl").open() as fh:
        alerts = [wire.alert_from_json(r) for r in wire.read_jsonl(fh)]
    kept = [a for a in alerts if not brute.is_excluded(a, exclusions)]
    assert stats["total_alerts"] == len(kept)
    assert stats["weekly_totals"] == [h["alert_count"] for h in brute.histogram(alerts, exclusions)]


def test_query_histogram_table(corpus_dir, capsys):
    rc = main(["query", "--data", str(corpus_dir), "--view", "histogram"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert all(len(line.split("\t")) == 2 for line in lines)


def test_query_empty_range_exits_zero(corpus_dir, capsys):
    rc = main(
        [
            "query", "--data", str(corpus_dir), "--view", "Calendar",
            "--start", "2021-03-02T00:00:00Z", "--end", "2021-03-03T00:00:00Z",
            "--policies", "no-such-policy",
        ]
    )
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert [line.split("\t")[-1] for line in out] == ["0"]


def test_query_missing_range_errors(corpus_dir, capsys):
    rc = main(["query", "--data", str(corpus_dir), "--view", "Calendar"])
    assert rc == 2


def test_cli_query_equals_api_response(corpus_dir, capsys):
    """Differential check: the CLI JSON form and the API body are identical
    for the same specs."""
    app = create_app(corpus_dir)
    client = TestClient(app)
    specs = [
        {"view": "Calendar", "start": "2021-03-01T00:00:00Z", "end": "2021-03-29T00:00:00Z"},
        {"view": "DailyTopUsers", "start": "2021-03-16T00:00:00Z", "end": "2021-03-17T00:00:00Z", "top_n": 10},
        {
            "view": "HistoricTopUsers",
            "start": "2021-03-01T00:00:00Z",
            "end": "2021-03-29T00:00:00Z",
            "top_n": 15,
        },
        {
            "view": "TwentyFourHoursByPolicy",
            "start": "2021-03-16T00:00:00Z",
            "end": "2021-03-17T00:00:00Z",
        },
    ]
    for spec in specs:
        argv = ["query", "--data", str(corpus_dir), "--json", "--view", spec["view"],
                "--start", spec["start"], "--end", spec["end"]]
        if "top_n" in spec:
            argv += ["--top-n", str(spec["top_n"])]
        assert main(argv) == 0
        cli_body = json.loads(capsys.readouterr().out)
        api_body = client.get("/api/grid", params=spec).json()
        assert cli_body == api_body
    assert main(["query", "--data", str(corpus_dir), "--json", "--view", "histogram"]) == 0
    cli_hist = json.loads(capsys.readouterr().out)
    assert cli_hist == client.get("/api/histogram").json()


def test_export_round_trip(corpus_dir, workdir, capsys):
    window = ["--start", "2021-03-23T00:00:00Z", "--end", "2021-03-29T00:00:00Z"]
    assert main(["query", "--data", str(corpus_dir), "--json", "--view", "HistoricTopUsers",
                 *window, "--top-n", "1"]) == 0
    top = json.loads(capsys.readouterr().out)["cells"][0]
    out_file = workdir / "cell.jsonl"
    rc = main(
        [
            "export", "--data", str(corpus_dir), "--view", "HistoricTopUsers", *window,
            "--row", top["row"], "--col", top["col"],
            "--format", "jsonl", "--outfile", str(out_file),
        ]
    )
    assert rc == 0
    records = [json.loads(line) for line in out_file.read_text().splitlines()]
    assert len(records) == top["count"]
    assert all(r["events"][0]["user"] == top["row"] for r in records)


def test_export_unknown_cell_fails(corpus_dir):
    rc = main(
        [
            "export", "--data", str(corpus_dir), "--view", "DailyTopUsers",
            "--start", "2021-03-16T00:00:00Z", "--end", "2021-03-17T00:00:00Z",
            "--row", "nobody-here",
        ]
    )
    assert rc == 1


def test_data_dir_env_override(corpus_dir, capsys, monkeypatch):
    monkeypatch.setenv("ALERTSCOPE_DATA_DIR", str(corpus_dir))
    rc = main(["query", "--view", "histogram"])
    assert rc == 0
    assert capsys.readouterr().out.strip()
