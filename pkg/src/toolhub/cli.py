"""Command-line entry point.

Exit codes: 0 ok, 2 usage, 3 spec/validation, 4 not found, 5 execution
failure, 6 remote or expert service unavailable, 7 timeout. Diagnostics go to
stderr; machine-readable output goes to stdout.

Environment variables: TOOLHUB_MANIFEST (default manifest directory),
TOOLHUB_BIND (default bind address), TOOLHUB_EXPERT_URL (expert service
address used by the expert tools).
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import threading
from typing import Any

from .agentic import BackendRegistry
from .composer import CompositePlan
from .demo import install_demo_pack
from .errors import (
    EXECUTION_FAILED,
    EXPERT_UNAVAILABLE,
    MISSING_REQUIRED,
    REMOTE_UNAVAILABLE,
    SPEC_INVALID,
    TIMEOUT,
    TOOL_NOT_FOUND,
    TYPE_MISMATCH,
    UNKNOWN_ARGUMENT,
    ToolError,
)
from .expert.service import ExpertQueue
from .expert.http import serve_expert_http
from .hub import ToolHub
from .protocol import ToolCall, canonical_json
from .refinement import discover_tool, optimize_tool
from .wire.server import serve_http, serve_stdio, serve_tcp

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SPEC = 3
EXIT_NOT_FOUND = 4
EXIT_EXECUTION = 5
EXIT_REMOTE = 6
EXIT_TIMEOUT = 7

_EXIT_BY_CODE = {
    SPEC_INVALID: EXIT_SPEC,
    MISSING_REQUIRED: EXIT_SPEC,
    UNKNOWN_ARGUMENT: EXIT_SPEC,
    TYPE_MISMATCH: EXIT_SPEC,
    TOOL_NOT_FOUND: EXIT_NOT_FOUND,
    EXECUTION_FAILED: EXIT_EXECUTION,
    REMOTE_UNAVAILABLE: EXIT_REMOTE,
    EXPERT_UNAVAILABLE: EXIT_REMOTE,
    TIMEOUT: EXIT_TIMEOUT,
}


def exit_code_for(error: ToolError) -> int:
    return _EXIT_BY_CODE.get(error.code, EXIT_EXECUTION)


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


class HeuristicBackend:
    """Deterministic offline text backend for optimize/discover runs.

    Revision prompts get the current description back (padded when too
    short); generation prompts get a minimal single-parameter spec and a
    pass-through handler program derived from the prompt itself.
    """

    identity = "heuristic"
    max_concurrency = 4

    _PAD = " Validated against observed executions."

    def generate(self, prompt: str, settings: Any = None) -> str:
        if prompt.startswith("Revise the description of parameter"):
            current = self._line_after(prompt, "Current parameter description: ")
            return current or "Input value for this parameter."
        if prompt.startswith("Revise the description of tool"):
            current = self._line_after(prompt, "Current description: ")
            if len(current) < 20:
                current = (current + self._PAD).strip()
            return current
        if prompt.startswith("Write a complete tool specification"):
            requirement = self._line_after(prompt, "Write a complete tool specification (JSON) for: ")
            return json.dumps(self._spec_for(requirement))
        if prompt.startswith("Write the handler program"):
            spec = json.loads(self._line_after(prompt, "Specification: "))
            params = [p["name"] for p in spec.get("parameters", [])]
            returns = {"result": f"${params[0]}"} if params else {"result": "ok"}
            return json.dumps({"returns": returns})
        return prompt.splitlines()[-1]

    @staticmethod
    def _line_after(prompt: str, marker: str) -> str:
        for line in prompt.splitlines():
            if line.startswith(marker):
                return line[len(marker):]
        return ""

    @staticmethod
    def _spec_for(requirement: str) -> dict[str, Any]:
        slug = re.sub(r"[^a-z0-9]+", "_", requirement.lower()).strip("_")[:40] or "generated_tool"
        if not slug[0].isalpha():
            slug = "tool_" + slug
        description = requirement if len(requirement) >= 20 else requirement + HeuristicBackend._PAD
        return {
            "name": slug,
            "description": description.strip(),
            "parameters": [
                {
                    "name": "text",
                    "type": "string",
                    "description": "Input text for the generated tool.",
                    "required": True,
                }
            ],
            "return_schema": {"result": "string"},
        }


def build_hub(args: argparse.Namespace) -> ToolHub:
    hub = ToolHub()
    hub.backends.register(HeuristicBackend())
    manifest = getattr(args, "manifest", None) or os.environ.get("TOOLHUB_MANIFEST")
    use_demo = getattr(args, "demo", False)
    if manifest:
        loaded, errors = hub.registry.load_manifest(manifest)
        for err in errors:
            _diag(f"skipped {err.source}: {err.error.message}")
        if not loaded and errors:
            raise errors[0].error
    if use_demo or not manifest:
        install_demo_pack(
            hub.registry,
            backends=hub.backends,
            expert_base_url=os.environ.get("TOOLHUB_EXPERT_URL"),
        )
    return hub


def _add_corpus_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--manifest", help="manifest directory to load tools from")
    parser.add_argument(
        "--demo", action="store_true", help="register the bundled demo toolpack"
    )


def cmd_serve(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    bind = args.bind or os.environ.get("TOOLHUB_BIND", "127.0.0.1:0")
    if args.transport == "stdio":
        serve_stdio(hub)
        return EXIT_OK
    host, _, port = bind.partition(":")
    if args.transport == "tcp":
        handle = serve_tcp(hub, host or "127.0.0.1", int(port or 0))
    else:
        handle = serve_http(hub, host or "127.0.0.1", int(port or 0))
    print(handle.address, flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        handle.stop()
    return EXIT_OK


def cmd_find(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    matches = hub.find_tool(args.query, strategy=args.strategy, limit=args.limit)
    if args.json:
        print(canonical_json({"matches": [m.to_dict() for m in matches]}))
    else:
        if not matches:
            _diag("no matching tools")
        for m in matches:
            print(f"{m.tool_name}\t{m.score:.6f}\t{m.strategy}")
    return EXIT_OK


def cmd_call(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    if args.stdin:
        call_text = sys.stdin.read()
        result_text = hub.run(call_text)
        print(result_text)
        return EXIT_OK if json.loads(result_text)["status"] == "ok" else EXIT_EXECUTION
    try:
        arguments = json.loads(args.args)
    except json.JSONDecodeError as exc:
        _diag(f"--args is not valid JSON: {exc}")
        return EXIT_USAGE
    if not isinstance(arguments, dict):
        _diag("--args must be a JSON object")
        return EXIT_USAGE
    result = hub.call_tool(ToolCall(args.name, arguments))
    print(result.serialize())
    if result.ok:
        return EXIT_OK
    return exit_code_for(result.error)


def cmd_register(args: argparse.Namespace) -> int:
    hub = ToolHub()
    loaded, errors = hub.registry.load_manifest(args.manifest)
    for err in errors:
        _diag(f"skipped {err.source}: {err.error.message}")
    for name in loaded:
        print(name)
    if not loaded and errors:
        return EXIT_SPEC
    return EXIT_OK


def cmd_register_remote(args: argparse.Namespace) -> int:
    hub = ToolHub()
    registered, errors = hub.registry.register_remote(args.endpoint)
    for err in errors:
        _diag(f"skipped {err.source}: {err.error.message}")
    for name in registered:
        print(name)
    return EXIT_OK


def cmd_compose(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    with open(args.plan, encoding="utf-8") as fh:
        plan = CompositePlan.parse(fh.read())
    name = hub.compose(plan)
    print(name)
    return EXIT_OK


def cmd_optimize(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    entry = hub.registry.get(args.name)
    if entry is None:
        raise ToolError(TOOL_NOT_FOUND, f"no tool named {args.name!r}")
    outcome = optimize_tool(
        hub.caller,
        entry.spec,
        hub.backends,
        threshold=args.threshold,
        max_rounds=args.max_rounds,
        backend_id=args.backend,
    )
    out_path = args.out or f"{args.name}.optimized.json"
    with open(out_path, "w", encoding="utf-8") as fh:
        json.dump(outcome.optimized.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    summary = {
        "tool": args.name,
        "rounds_used": outcome.rounds_used,
        "terminated_by": outcome.terminated_by,
        "scores": [r.to_dict() for r in outcome.reports],
        "spec_file": out_path,
    }
    if outcome.partial_error is not None:
        summary["partial_error"] = outcome.partial_error.to_dict()
    print(canonical_json(summary))
    return EXIT_OK


def cmd_discover(args: argparse.Namespace) -> int:
    hub = build_hub(args)
    backends = hub.backends
    package = discover_tool(
        args.description,
        hub.finder,
        backends,
        target=args.target,
        max_rounds=args.max_rounds,
        backend_id=args.backend,
    )
    path = package.write(args.out)
    print(str(path))
    return EXIT_OK


def cmd_expert_serve(args: argparse.Namespace) -> int:
    queue = ExpertQueue(journal_path=args.journal)
    bind = args.bind or os.environ.get("TOOLHUB_BIND", "127.0.0.1:0")
    host, _, port = bind.partition(":")
    handle = serve_expert_http(queue, host or "127.0.0.1", int(port or 0))
    print(handle.address, flush=True)
    try:
        threading.Event().wait()
    except KeyboardInterrupt:
        handle.stop()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="toolhub", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("serve", help="run the tool server")
    p.add_argument("--transport", choices=("stdio", "tcp", "http"), default="stdio")
    p.add_argument("--bind", help="host:port for tcp/http (default 127.0.0.1:0)")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("find", help="search registered tools")
    p.add_argument("query")
    p.add_argument("--strategy", choices=("keyword", "embedding", "agentic", "auto"), default="keyword")
    p.add_argument("--limit", type=int, default=10)
    p.add_argument("--json", action="store_true")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_find)

    p = sub.add_parser("call", help="call one tool")
    p.add_argument("name", nargs="?")
    p.add_argument("--args", default="{}", help="arguments as a JSON object")
    p.add_argument("--stdin", action="store_true", help="read a serialized call from stdin")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_call)

    p = sub.add_parser("register", help="load a manifest directory and list the names")
    p.add_argument("--manifest", required=True)
    p.set_defaults(func=cmd_register)

    p = sub.add_parser("register-remote", help="import tools from a remote server")
    p.add_argument("endpoint")
    p.set_defaults(func=cmd_register_remote)

    p = sub.add_parser("compose", help="register a composite from a plan file")
    p.add_argument("--plan", required=True)
    _add_corpus_options(p)
    p.set_defaults(func=cmd_compose)

    p = sub.add_parser("optimize", help="refine a tool's descriptions")
    p.add_argument("name")
    p.add_argument("--threshold", type=float, default=8.0)
    p.add_argument("--max-rounds", type=int, default=3)
    p.add_argument("--backend", default="heuristic")
    p.add_argument("--out", help="output path for the optimized spec")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("discover", help="generate a new tool from a description")
    p.add_argument("description")
    p.add_argument("--target", type=float, default=9.0)
    p.add_argument("--max-rounds", type=int, default=3)
    p.add_argument("--backend", default="heuristic")
    p.add_argument("--out", default=".", help="directory to write the package into")
    _add_corpus_options(p)
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("expert-serve", help="run the human feedback service")
    p.add_argument("--bind")
    p.add_argument("--journal", help="append-only journal file path")
    p.set_defaults(func=cmd_expert_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "call" and not args.stdin and not args.name:
        _diag("call requires a tool name or --stdin")
        return EXIT_USAGE
    try:
        return args.func(args)
    except ToolError as exc:
        _diag(f"{exc.code}: {exc.message}")
        return exit_code_for(exc)
    except FileNotFoundError as exc:
        _diag(str(exc))
        return EXIT_USAGE
    except KeyboardInterrupt:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
