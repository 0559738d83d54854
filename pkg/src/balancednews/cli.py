"""Command line entry points.

    balancednews simulate --scenario one_sided --seed 7 --out run.csv
    balancednews report   --scenario one_sided --seed 7 --out-dir runs/
    balancednews serve    --port 8000
    balancednews ingest   --corpus corpus.jsonl --bias-map map.csv
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .config import load_config
from .errors import BalancedNewsError


def _packaged(name: str) -> Path:
    return Path(str(resources.files("balancednews").joinpath(f"data/{name}")))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="balancednews",
        description="Two-feed news personalization with proportion constraints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run a scripted-user scenario")
    simulate.add_argument("--scenario", required=True,
                          help="preset name or path to a scenario JSON")
    simulate.add_argument("--seed", type=int, default=7)
    simulate.add_argument("--iterations", type=int, default=None,
                          help="override the scenario's iteration count")
    simulate.add_argument("--out", required=True, help="output file path")
    simulate.add_argument("--format", choices=("csv", "jsonl"), default="csv")
    simulate.add_argument("--via-http", metavar="BASE_URL", default=None,
                          help="drive a running service instead of in-process")

    report = sub.add_parser(
        "report", help="run a scenario and render the dashboard figure"
    )
    report.add_argument("--scenario", required=True)
    report.add_argument("--seed", type=int, default=7)
    report.add_argument("--iterations", type=int, default=None)
    report.add_argument("--out-dir", required=True)
    report.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    serve = sub.add_parser("serve", help="start the HTTP service")
    serve.add_argument("--host", default=os.environ.get("BALANCED_HOST", "127.0.0.1"))
    serve.add_argument("--port", type=int,
                       default=int(os.environ.get("BALANCED_PORT", "8000")))
    serve.add_argument("--corpus", default=None, help="JSONL corpus path")
    serve.add_argument("--bias-map", default=None, help="domain-to-type CSV path")
    serve.add_argument("--config", default=None, help="JSON config path")
    serve.add_argument("--static", default=None, help="directory with UI assets")
    serve.add_argument("--log-dir", default=None,
                       help="persist session events as JSONL under this directory")
    serve.add_argument("--fsync", action="store_true",
                       help="fsync the event log on every append")

    ingest = sub.add_parser("ingest", help="classify a corpus and print accounting")
    ingest.add_argument("--corpus", required=True)
    ingest.add_argument("--bias-map", required=True)
    ingest.add_argument("--config", default=None)
    ingest.add_argument("--verbose", action="store_true",
                        help="also list skipped-line reasons")

    return parser


def _cmd_simulate(args) -> int:
    from .sim import emit, load_scenario, run_scenario, run_scenario_http

    scenario = load_scenario(args.scenario)
    if args.via_http:
        result = run_scenario_http(
            scenario, args.seed, args.via_http, iterations=args.iterations
        )
    else:
        result = run_scenario(scenario, args.seed, iterations=args.iterations)
    out = emit(result, args.out, args.format)
    print(
        f"{result.scenario} seed={result.seed}: {result.summary.clicks} clicks over "
        f"{result.summary.iterations} iterations, final unfiltered "
        f"{result.summary.final_pct_unfiltered:.0%}, balanced "
        f"{result.summary.final_pct_balanced:.0%} -> {out}"
    )
    return 0


def _cmd_report(args) -> int:
    from .report import render_dashboard
    from .sim import emit, load_scenario, run_scenario

    scenario = load_scenario(args.scenario)
    result = run_scenario(scenario, args.seed, iterations=args.iterations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = f"{result.scenario}-seed{result.seed}"
    extension = "csv" if args.format == "csv" else "jsonl"
    data_path = emit(result, out_dir / f"{stem}.{extension}", args.format)
    figure_path = render_dashboard(result, out_dir / f"{stem}.png")
    print(f"wrote {data_path} and {figure_path}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .events import FileEventLog, MemoryEventLog
    from .ingest import build_pools, ingest_corpus
    from .service import create_app
    from .session import SessionStore

    config = load_config(args.config)
    labels = config.labels()
    corpus = args.corpus or _packaged("corpus.jsonl")
    bias_map = args.bias_map or _packaged("bias_map.csv")
    articles, summary = ingest_corpus(corpus, bias_map, labels)
    print(summary.line())
    pools = build_pools(articles, len(labels))

    log = FileEventLog(args.log_dir, fsync=args.fsync) if args.log_dir else MemoryEventLog()
    store = SessionStore(pools, config, log)
    if args.log_dir:
        restored = store.restore_from_log()
        if restored:
            print(f"restored {len(restored)} session(s) from {args.log_dir}")

    static = args.static
    if static is None:
        bundled = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static = str(bundled) if bundled.is_dir() else None

    app = create_app(store, static_dir=static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_ingest(args) -> int:
    from .ingest import ingest_corpus

    config = load_config(args.config)
    _articles, summary = ingest_corpus(args.corpus, args.bias_map, config.labels())
    print(summary.line())
    if args.verbose:
        for reason in summary.reasons:
            print(f"  {reason}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "report": _cmd_report,
    "serve": _cmd_serve,
    "ingest": _cmd_ingest,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except BalancedNewsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
