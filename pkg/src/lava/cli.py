"""Command line entry points: serve the engine, push event files, make data.

`ingest` is a thin client for a running server (POST /api/v1/events); give
it --data-dir instead of --url to write straight into a local store when
no server is up.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import EngineError
from .ingest import FORMAT_LINES, FORMAT_TABLE, IngestReport, ingest_file, parse_event_file
from .synth import synthesize, write_events_file, write_truth_file


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(data_dir=args.data_dir, app_dir=args.app_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def _post_batches(url: str, token: str, items: list, batch_size: int) -> IngestReport:
    import httpx

    report = IngestReport()
    endpoint = url.rstrip("/") + "/api/v1/events"
    headers = {"Authorization": f"Bearer {token}"}
    with httpx.Client(timeout=120.0) as client:
        for offset in range(0, len(items), batch_size):
            chunk = [doc for _, doc in items[offset:offset + batch_size]]
            response = client.post(endpoint, json=chunk, headers=headers)
            response.raise_for_status()
            body = response.json()
            report.accepted += body["accepted"]
            report.rejected += body["rejected"]
            for rejection in body["rejections"]:
                report.rejections.append((offset + rejection["index"], rejection["issues"]))
    return report


def _cmd_ingest(args) -> int:
    if args.data_dir:
        from .store import EventStore

        store = EventStore(args.data_dir)
        report = ingest_file(args.file, args.format, store)
    else:
        items = parse_event_file(args.file, args.format)
        documents = [(i, doc) for i, doc in items if isinstance(doc, dict)]
        report = _post_batches(args.url, args.token, documents, args.batch_size)
        for index, issues in items:
            if not isinstance(issues, dict):
                report.reject(index, issues)
        report.rejections.sort(key=lambda pair: pair[0])

    print(f"accepted={report.accepted} rejected={report.rejected}")
    shown = 0
    for index, issues in report.rejections:
        if shown >= 10:
            print(f"... and {report.rejected - shown} more rejections")
            break
        doc = issues.to_doc() if hasattr(issues, "to_doc") else issues
        print(f"  item {index}: {json.dumps(doc)}")
        shown += 1
    return 0 if report.rejected == 0 else 1


def _cmd_synth(args) -> int:
    result = synthesize(
        students=args.students,
        materials=args.materials,
        assignments=args.assignments,
        weeks=args.weeks,
        seed=args.seed,
    )
    write_events_file(args.out, result.documents)
    print(f"wrote {len(result.documents)} events to {args.out}")
    if args.truth_out:
        write_truth_file(args.truth_out, result.truth)
        print(f"wrote planted cluster labels to {args.truth_out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lava", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the engine HTTP service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--data-dir", default="./lava-data")
    serve.add_argument("--app-dir", default=None, help="static editor assets served under /app")
    serve.set_defaults(func=_cmd_serve)

    ingest = sub.add_parser("ingest", help="push an event file into the engine")
    ingest.add_argument("--file", required=True)
    ingest.add_argument("--format", choices=[FORMAT_LINES, FORMAT_TABLE], default=FORMAT_LINES)
    ingest.add_argument("--url", default="http://127.0.0.1:8000")
    ingest.add_argument("--token", default="cli")
    ingest.add_argument("--batch-size", type=int, default=2000)
    ingest.add_argument("--data-dir", default=None,
                        help="write to a local store instead of a server")
    ingest.set_defaults(func=_cmd_ingest)

    synth = sub.add_parser("synth", help="generate a synthetic event file")
    synth.add_argument("--students", type=int, default=50)
    synth.add_argument("--materials", type=int, default=20)
    synth.add_argument("--assignments", type=int, default=5)
    synth.add_argument("--weeks", type=int, default=12)
    synth.add_argument("--seed", type=int, default=7)
    synth.add_argument("--out", default="events.jsonl")
    synth.add_argument("--truth-out", default=None)
    synth.set_defaults(func=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineError as e:
        print(f"error: {e.code}: {e.message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
