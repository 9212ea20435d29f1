"""JSON-RPC service exposing list_tools / find_tool / call_tool.

Transports: tcp and stdio (Content-Length framing) and http (one request per
POST /rpc, status 200 even for RPC-level errors). Requests pipelined on one
connection are answered out of order with correct id correlation.
"""

from __future__ import annotations

import json
import socket
import socketserver
import threading
from concurrent.futures import ThreadPoolExecutor
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from ..errors import (
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
from ..hub import ToolHub
from ..protocol import ToolResult, call_from_dict, canonical_json
from .framing import encode_frame, try_decode

PROTOCOL_VERSION = "2.0"

PARSE_ERROR = -32700
INVALID_REQUEST = -32600
METHOD_NOT_FOUND = -32601

TOOL_ERROR_CODES = {
    TOOL_NOT_FOUND: -32001,
    SPEC_INVALID: -32002,
    MISSING_REQUIRED: -32002,
    UNKNOWN_ARGUMENT: -32002,
    TYPE_MISMATCH: -32002,
    EXECUTION_FAILED: -32003,
    TIMEOUT: -32004,
    REMOTE_UNAVAILABLE: -32005,
    EXPERT_UNAVAILABLE: -32006,
}

METHOD_ALIASES = {
    "tools/list": "list_tools",
    "tools/call": "call_tool",
}


def _error_response(req_id: Any, code: int, message: str, data: Any = None) -> dict:
    error: dict[str, Any] = {"code": code, "message": message}
    if data is not None:
        error["data"] = data
    return {"jsonrpc": PROTOCOL_VERSION, "id": req_id, "error": error}


def _result_response(req_id: Any, result: Any) -> dict:
    return {"jsonrpc": PROTOCOL_VERSION, "id": req_id, "result": result}


def _tool_error_response(req_id: Any, error: ToolError, duration_ms: float = 0.0) -> dict:
    return _error_response(
        req_id,
        TOOL_ERROR_CODES.get(error.code, -32003),
        error.message,
        data={"code": error.code, "detail": error.detail, "duration_ms": duration_ms},
    )


class RpcService:
    """Transport-independent request dispatch."""

    def __init__(self, hub: ToolHub):
        self.hub = hub

    def handle(self, message: Any) -> dict:
        if not isinstance(message, dict):
            return _error_response(None, INVALID_REQUEST, "request must be an object")
        req_id = message.get("id")
        version = message.get("jsonrpc")
        if version != PROTOCOL_VERSION:
            return _error_response(
                req_id,
                INVALID_REQUEST,
                f"protocol version mismatch: server speaks {PROTOCOL_VERSION}, request says {version!r}",
            )
        method = message.get("method")
        method = METHOD_ALIASES.get(method, method)
        params = message.get("params") or {}
        try:
            if method == "list_tools":
                specs = self.hub.list_tools(tag=params.get("tag"), origin=params.get("origin"))
                return _result_response(req_id, {"tools": [s.to_dict() for s in specs]})
            if method == "find_tool":
                matches = self.hub.find_tool(
                    params.get("query", ""),
                    strategy=params.get("strategy", "keyword"),
                    limit=int(params.get("limit", 10)),
                )
                return _result_response(req_id, {"matches": [m.to_dict() for m in matches]})
            if method == "call_tool":
                call = call_from_dict(params)
                result = self.hub.call_tool(call)
                if result.ok:
                    return _result_response(req_id, result.to_dict())
                return _tool_error_response(req_id, result.error, result.duration_ms)
            return _error_response(req_id, METHOD_NOT_FOUND, f"unknown method {method!r}")
        except ToolError as exc:
            return _tool_error_response(req_id, exc)
        except Exception as exc:  # keep the connection alive on handler bugs
            return _error_response(req_id, -32603, f"internal error: {exc}")

    def handle_bytes(self, body: bytes) -> bytes:
        try:
            message = json.loads(body.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError) as exc:
            return canonical_json(_error_response(None, PARSE_ERROR, f"parse error: {exc}")).encode()
        return canonical_json(self.handle(message)).encode("utf-8")


class _FramedConnection:
    """Reads frames from a byte stream, dispatches each request on a pool and
    writes responses under a lock so a slow call never blocks the others."""

    def __init__(self, service: RpcService, pool: ThreadPoolExecutor):
        self.service = service
        self.pool = pool
        self.buffer = b""
        self.write_lock = threading.Lock()

    def feed(self, data: bytes, send) -> None:
        self.buffer += data
        while self.buffer:
            state, body, rest = try_decode(self.buffer)
            if state == "incomplete":
                return
            if state == "error":
                self._resync(send, "malformed frame")
                continue
            self.buffer = rest
            self.pool.submit(self._dispatch, body, send)

    def _resync(self, send, reason: str) -> None:
        response = canonical_json(
            _error_response(None, PARSE_ERROR, f"framing error: {reason}")
        ).encode()
        with self.write_lock:
            send(encode_frame(response))
        marker = b"Content-Length: "
        idx = self.buffer.find(marker, 1)
        self.buffer = self.buffer[idx:] if idx > 0 else b""

    def _dispatch(self, body: bytes, send) -> None:
        response = self.service.handle_bytes(body)
        with self.write_lock:
            send(encode_frame(response))


class ServerHandle:
    def __init__(self, address: str, stop, thread: threading.Thread | None = None):
        self.address = address
        self._stop = stop
        self._thread = thread

    def stop(self) -> None:
        self._stop()
        if self._thread is not None:
            self._thread.join(timeout=5)


def serve_tcp(hub: ToolHub, host: str = "127.0.0.1", port: int = 0) -> ServerHandle:
    service = RpcService(hub)
    pool = ThreadPoolExecutor(max_workers=32, thread_name_prefix="rpc")

    class Handler(socketserver.BaseRequestHandler):
        def handle(self):
            conn = _FramedConnection(service, pool)
            sock: socket.socket = self.request

            def send(data: bytes) -> None:
                try:
                    sock.sendall(data)
                except OSError:
                    pass

            while True:
                try:
                    data = sock.recv(65536)
                except OSError:
                    break
                if not data:
                    break
                conn.feed(data, send)

    class Server(socketserver.ThreadingTCPServer):
        allow_reuse_address = True
        daemon_threads = True

    server = Server((host, port), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    actual = f"{server.server_address[0]}:{server.server_address[1]}"
    return ServerHandle(actual, server.shutdown, thread)


def serve_http(hub: ToolHub, host: str = "127.0.0.1", port: int = 0) -> ServerHandle:
    service = RpcService(hub)

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            if self.path != "/rpc":
                self.send_error(404)
                return
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length)
            response = service.handle_bytes(body)
            self.send_response(200)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(response)))
            self.end_headers()
            self.wfile.write(response)

        def log_message(self, fmt, *args):
            pass

    server = ThreadingHTTPServer((host, port), Handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    actual = f"http://{server.server_address[0]}:{server.server_address[1]}"
    return ServerHandle(actual, server.shutdown, thread)


def serve_stdio(hub: ToolHub, stdin=None, stdout=None) -> None:
    """Blocking stdio server; one process serves one client."""
    import sys

    stdin = stdin or sys.stdin.buffer
    stdout = stdout or sys.stdout.buffer
    service = RpcService(hub)
    pool = ThreadPoolExecutor(max_workers=8, thread_name_prefix="rpc-stdio")
    conn = _FramedConnection(service, pool)
    out_lock = threading.Lock()

    def send(data: bytes) -> None:
        with out_lock:
            stdout.write(data)
            stdout.flush()

    while True:
        data = stdin.read1(65536) if hasattr(stdin, "read1") else stdin.read(65536)
        if not data:
            break
        conn.feed(data, send)
    pool.shutdown(wait=True)


def serve(hub: ToolHub, transport: str, bind: str = "127.0.0.1:0"):
    if transport == "tcp":
        host, _, port = bind.partition(":")
        return serve_tcp(hub, host or "127.0.0.1", int(port or 0))
    if transport == "http":
        host, _, port = bind.partition(":")
        return serve_http(hub, host or "127.0.0.1", int(port or 0))
    if transport == "stdio":
        return serve_stdio(hub)
    raise ValueError(f"unknown transport {transport!r}")
