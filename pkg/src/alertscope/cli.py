"""Command-line interface: generate, ingest, clean, stats, query, export, serve."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import wire
from .errors import AlertscopeError, SpecError
from .model import TimeRange
from .scenarios import (
    SCENARIO_KINDS,
    ScenarioSpec,
    default_policies,
    inject_scenario,
    inject_standard,
    recommended_exclusions,
)
from .service import ServiceConfig, load_store, serve
from .store import GridSpec, GridView
from .synth import CorpusStats, GeneratorConfig, corpus_stats, generate, write_corpus

_DATA_ENV = "ALERTSCOPE_DATA_DIR"


def _data_dir(args) -> Path:
    if args.data:
        return Path(args.data)
    env = os.environ.get(_DATA_ENV)
    if env:
        return Path(env)
    return Path("data")


def _load_config(args) -> GeneratorConfig:
    fields = {}
    if args.config:
        fields.update(json.loads(Path(args.config).read_text()))
    if args.seed is not None:
        fields["seed"] = args.seed
    return GeneratorConfig(**fields)


def cmd_generate(args) -> int:
    config = _load_config(args)
    policies = default_policies(config)
    corpus = generate(config, policies)
    overrides = json.loads(args.scenario_params) if args.scenario_params else {}
    if args.standard_noise:
        corpus = inject_standard(corpus, overrides)
    for kind in args.scenario or []:
        corpus = inject_scenario(corpus, ScenarioSpec(kind, overrides.get(kind, {})))
        corpus.manifest["exclusions_recommended"] = recommended_exclusions(corpus.manifest)
    out = Path(args.out)
    paths = write_corpus(corpus, out)
    exclusions = corpus.manifest.get("exclusions_recommended")
    if exclusions:
        (out / "exclusions.json").write_text(json.dumps(exclusions, indent=2, sort_keys=True))
    stats = corpus_stats(corpus)
    print(json.dumps(stats.to_json(), indent=2))
    print(f"wrote {', '.join(str(p) for p in paths.values())}", file=sys.stderr)
    return 0


def cmd_ingest(args) -> int:
    data = _data_dir(args)
    data.mkdir(parents=True, exist_ok=True)
    source = Path(args.alerts) if args.alerts else data / "alerts.jsonl"
    if not source.exists():
        print(f"no such alert file: {source}", file=sys.stderr)
        return 1
    target = data / "alerts.jsonl"
    if source.resolve() != target.resolve():
        target.write_bytes(source.read_bytes())
    store = load_store(data)
    snap = store.snapshot()
    print(
        json.dumps(
            {
                "alerts": int(snap.n),
                "users": len(snap.users),
                "policies": len(snap.policies),
                "flagged_pre_cap": int(snap.flagged.sum()),
            }
        )
    )
    return 0


def cmd_clean(args) -> int:
    data = _data_dir(args)
    config = json.loads(Path(args.exclusions).read_text())
    exclusions = wire.exclusions_from_json(config)  # validate before persisting
    (data / "exclusions.json").write_text(json.dumps(config, indent=2, sort_keys=True))
    store = load_store(data)
    before = store.total_alerts(include_excluded=True)
    after = store.total_alerts()
    print(json.dumps({"stored": before, "after_exclusions": after,
                      "excluded": before - after,
                      "excluded_users": sorted(exclusions.excluded_users)}))
    return 0


def cmd_stats(args) -> int:
    data = _data_dir(args)
    store = load_store(data)
    snap = store.snapshot()
    total = store.total_alerts()
    keep = snap.excluded == 0
    per_user = np.bincount(snap.user[keep], minlength=max(len(snap.users), 1))
    ranked = np.sort(per_user[per_user > 0])[::-1]
    single = int((snap.event_count[keep] == 1).sum()) if total else 0
    weekly = [h["alert_count"] for h in store.weekly_histogram()]
    stats = CorpusStats(
        total_alerts=total,
        distinct_alerting_users=int(len(ranked)),
        single_event_fraction=(single / total) if total else 0.0,
        rank1_count=int(ranked[0]) if len(ranked) else 0,
        rank100_count=int(ranked[99]) if len(ranked) >= 100 else 0,
        weekly_totals=tuple(weekly),
        max_week_share=(max(weekly) / total) if weekly and total else 0.0,
    )
    print(json.dumps(stats.to_json(), indent=2))
    return 0


def _grid_spec(args) -> GridSpec:
    if not args.start or not args.end:
        raise SpecError("grid queries need --start and --end")
    return GridSpec(
        view=GridView(args.view),
        range=TimeRange(wire.iso_to_ts(args.start), wire.iso_to_ts(args.end)),
        focus_user=args.user,
        focus_resources=tuple(args.resources.split("|")) if args.resources else None,
        policy_filter=tuple(args.policies.split(",")) if args.policies else None,
        top_n=args.top_n,
        offset=args.offset,
    )


def cmd_query(args) -> int:
    store = load_store(_data_dir(args))
    if args.view == "histogram":
        result = store.weekly_histogram()
        if args.json:
            print(json.dumps(result))
        else:
            for bucket in result:
                print(f"{bucket['week_start']}\t{bucket['alert_count']}")
        return 0
    result = store.grid(_grid_spec(args)).to_json()
    if args.json:
        print(json.dumps(result))
        return 0
    for cell in result["cells"]:
        col = f"\t{cell['col']}" if cell["col"] is not None else ""
        print(f"{cell['row']}{col}\t{cell['count']}")
    return 0


def cmd_export(args) -> int:
    store = load_store(_data_dir(args))
    result = store.grid(_grid_spec(args))
    matches = [
        c for c in result.cells
        if c.row_key == args.row and (args.col is None or c.col_key == args.col)
    ]
    if not matches:
        print(f"no grid cell with row={args.row!r} col={args.col!r}", file=sys.stderr)
        return 1
    out = open(args.outfile, "wb") if args.outfile else sys.stdout.buffer
    try:
        for chunk in store.export(matches[0].selection_handle, args.format):
            out.write(chunk)
    finally:
        if args.outfile:
            out.close()
    return 0


def cmd_serve(args) -> int:
    config = ServiceConfig(
        host=args.host,
        port=args.port,
        data_dir=_data_dir(args),
        static_dir=Path(args.static) if args.static else None,
        log_level=args.log_level,
    )
    serve(config)
    return 0


def _add_query_args(p: argparse.ArgumentParser, with_view: bool = True) -> None:
    p.add_argument("--data", help=f"data directory (default: ${_DATA_ENV} or ./data)")
    if with_view:
        views = [v.value for v in GridView]
        p.add_argument("--view", required=True, choices=views + ["histogram"])
    p.add_argument("--start", help="range start, ISO-8601 UTC")
    p.add_argument("--end", help="range end (exclusive), ISO-8601 UTC")
    p.add_argument("--user", help="focus user")
    p.add_argument("--policies", help="comma-separated policy ids")
    p.add_argument("--resources", help="pipe-separated resource strings")
    p.add_argument("--top-n", dest="top_n", type=int)
    p.add_argument("--offset", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alertscope", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a synthetic corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="generator config JSON file")
    p.add_argument("--seed", type=int)
    p.add_argument("--scenario", action="append", choices=SCENARIO_KINDS,
                   help="inject one scenario (repeatable)")
    p.add_argument("--scenario-params", help="JSON object: kind -> params")
    p.add_argument("--standard-noise", action="store_true",
                   help="inject the full documented noise + case-study set")
    p.set_defaults(fn=cmd_generate)

    p = sub.add_parser("ingest", help="ingest an alert JSONL file into the data directory")
    p.add_argument("--data")
    p.add_argument("--alerts", help="alert JSONL (default <data>/alerts.jsonl)")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("clean", help="apply an exclusion config to all future queries")
    p.add_argument("--data")
    p.add_argument("--exclusions", required=True, help="exclusion config JSON")
    p.set_defaults(fn=cmd_clean)

    p = sub.add_parser("stats", help="corpus statistics after exclusions")
    p.add_argument("--data")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("query", help="run a histogram or grid query")
    _add_query_args(p)
    p.add_argument("--json", action="store_true", help="print the API JSON form")
    p.set_defaults(fn=cmd_query)

    p = sub.add_parser("export", help="export one grid cell as JSONL or CSV")
    _add_query_args(p)
    p.add_argument("--row", required=True, help="cell row key")
    p.add_argument("--col", help="cell column key (for matrix views)")
    p.add_argument("--format", choices=["jsonl", "csv"], default="jsonl")
    p.add_argument("--outfile")
    p.set_defaults(fn=cmd_export)

    p = sub.add_parser("serve", help="serve the HTTP API (and console, if built)")
    p.add_argument("--data")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--static", help="static console assets directory")
    p.add_argument("--log-level", default="info")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except AlertscopeError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"error [bad-json]: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error [io]: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
