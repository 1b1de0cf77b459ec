"""Command line interface.

Exit codes: 0 success, 1 operational failure (usage, missing files, unknown
column), 2 analysis finished but produced error-severity diagnostics.
"""

from __future__ import annotations

import argparse
import difflib
import importlib.resources
import os
import sys
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from . import __version__
from .catalog import load_schema_file
from .diagnostics import SEVERITY_ERROR, worst_severity
from .graph import LineageGraph, UnknownColumn
from .pipeline import analyze_files

DEFAULT_PORT = 8275
PORT_ENV_VAR = "LINEAGE_FORGE_PORT"
_DATA_MARKER = "__LINEAGE_DATA__"


class _ArgumentParser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here reserves 2
    # for analysis findings, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="lineage-forge",
        description="Static column-level SQL lineage extraction",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    extract = commands.add_parser("extract", help="analyze scripts and write lineage.json")
    extract.add_argument("inputs", nargs="+", help="SQL script files")
    extract.add_argument("-o", "--output", default=".", help="output directory (default: .)")
    extract.add_argument("--schema", help="schema declarations, one table(col, ...) per line")
    extract.add_argument(
        "--strict", action="store_true", help="treat parse problems as errors"
    )
    extract.add_argument(
        "--random-ids",
        action="store_true",
        help="name bare SELECT statements randomly instead of query_<k>",
    )
    extract.set_defaults(func=_cmd_extract)

    impact = commands.add_parser("impact", help="print the impact closure of a column")
    impact.add_argument("column", help="qualified column, e.g. web.page")
    impact.add_argument(
        "--up", action="store_true", help="trace upstream dependencies instead"
    )
    impact.add_argument("-o", "--output", default=".", help="directory holding lineage.json")
    impact.set_defaults(func=_cmd_impact)

    serve = commands.add_parser("serve", help="serve the interactive lineage explorer")
    serve.add_argument("-o", "--output", default=".", help="directory holding lineage.json")
    serve.add_argument(
        "--port",
        type=int,
        help=f"listen port (default: ${PORT_ENV_VAR} or {DEFAULT_PORT})",
    )
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits for usage errors (remapped to 1) and for --help (0);
        # surface both as return codes so main stays callable as a function
        return int(exc.code or 0)
    try:
        return args.func(args)
    except KeyboardInterrupt:
        return 130


def _cmd_extract(args) -> int:
    schema = None
    if args.schema:
        try:
            schema = load_schema_file(args.schema)
        except (OSError, ValueError) as exc:
            print(f"error: cannot load schema file: {exc}", file=sys.stderr)
            return 1

    try:
        result = analyze_files(
            args.inputs, schema=schema, strict=args.strict, random_ids=args.random_ids
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(args.output)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        out_path = out_dir / "lineage.json"
        graph_json = result.graph.to_json()
        out_path.write_text(graph_json, encoding="utf-8")
        # index.html embeds the document, so it opens from disk without serve.
        (out_dir / "index.html").write_text(render_viewer(graph_json), encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 1

    for diag in result.diagnostics:
        print(f"{diag.severity}: {diag.code}: {diag.message}", file=sys.stderr)
    graph = result.graph
    print(
        f"wrote {out_path} ({len(graph.nodes)} nodes, {len(graph.edges)} edges, "
        f"{len(graph.diagnostics)} diagnostics)"
    )
    return 2 if worst_severity(result.diagnostics) == SEVERITY_ERROR else 0


def _cmd_impact(args) -> int:
    graph = _load_graph(args.output)
    if graph is None:
        return 1
    try:
        if args.up:
            closure = graph.upstream_closure(args.column)
        else:
            closure = graph.downstream_closure(args.column)
    except (UnknownColumn, ValueError):
        message = f"error: unknown column {args.column!r}"
        candidates = [str(ref) for ref in graph.all_columns()]
        close = difflib.get_close_matches(args.column, candidates, n=1)
        if close:
            message += f"; did you mean {close[0]!r}?"
        print(message, file=sys.stderr)
        return 1
    for ref in sorted(closure, key=str):
        print(ref)
    return 0


def _cmd_serve(args) -> int:
    lineage_path = Path(args.output) / "lineage.json"
    if not lineage_path.is_file():
        print(
            f"error: {lineage_path} not found; run lineage-forge extract first",
            file=sys.stderr,
        )
        return 1
    port = args.port
    if port is None:
        raw = os.environ.get(PORT_ENV_VAR)
        if raw is not None:
            try:
                port = int(raw)
            except ValueError:
                print(f"error: {PORT_ENV_VAR}={raw!r} is not a port", file=sys.stderr)
                return 1
        else:
            port = DEFAULT_PORT

    try:
        server = build_server(args.output, port)
    except OSError as exc:
        print(f"error: cannot listen on port {port}: {exc}", file=sys.stderr)
        return 1
    host = f"http://127.0.0.1:{server.server_address[1]}/"
    print(f"serving lineage explorer at {host} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _load_graph(directory: str) -> LineageGraph | None:
    path = Path(directory) / "lineage.json"
    try:
        text = path.read_text(encoding="utf-8")
    except OSError:
        print(
            f"error: {path} not found; run lineage-forge extract first",
            file=sys.stderr,
        )
        return None
    try:
        return LineageGraph.from_json(text)
    except (ValueError, KeyError) as exc:
        print(f"error: {path} is not a lineage document: {exc}", file=sys.stderr)
        return None


def viewer_template() -> str:
    return (
        importlib.resources.files("lineage_forge.viewer")
        .joinpath("viewer.html")
        .read_text(encoding="utf-8")
    )


def render_viewer(graph_json: str) -> str:
    """Embed a lineage document into the viewer page.

    The document lands inside a <script type="application/json"> block, so
    every "<" is escaped to keep markup-looking strings inert.
    """
    return viewer_template().replace(_DATA_MARKER, graph_json.replace("<", "\\u003c"))


def build_server(directory: str, port: int) -> ThreadingHTTPServer:
    """HTTP server for the explorer: / is the viewer page, /api/lineage the
    canonical document. The file is re-read per request, so re-running
    extract shows up on refresh."""
    lineage_path = Path(directory) / "lineage.json"

    class Handler(BaseHTTPRequestHandler):
        def do_GET(self):
            if self.path in ("/", "/index.html"):
                try:
                    body = render_viewer(lineage_path.read_text(encoding="utf-8"))
                except OSError:
                    self._send(404, "text/plain; charset=utf-8", b"lineage.json not found")
                    return
                self._send(200, "text/html; charset=utf-8", body.encode("utf-8"))
            elif self.path == "/api/lineage":
                try:
                    payload = lineage_path.read_bytes()
                except OSError:
                    self._send(404, "application/json", b'{"error": "not found"}')
                    return
                self._send(200, "application/json", payload)
            else:
                self._send(404, "text/plain; charset=utf-8", b"not found")

        def _send(self, status: int, content_type: str, body: bytes):
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *_args):
            pass

    return ThreadingHTTPServer(("127.0.0.1", port), Handler)


if __name__ == "__main__":
    sys.exit(main())
