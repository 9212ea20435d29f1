"""RPC client: tcp, http, and stdio-subprocess endpoints.

Endpoint address forms: ``host:port`` (tcp), ``http://host:port`` (http) and
``stdio:<command>`` (spawn the command and frame over its pipes).
"""

from __future__ import annotations

import itertools
import json
import shlex
import socket
import subprocess
import threading
import urllib.error
import urllib.request
from typing import Any

from ..errors import EXECUTION_FAILED, REMOTE_UNAVAILABLE, ToolError
from ..protocol import ToolResult, canonical_json, error_result
from .framing import FramingError, encode_frame, read_frame

CONNECT_TIMEOUT = 5.0
PROTOCOL_VERSION = "2.0"

# Inverse of the server's ToolError -> RPC code table (RPC errors carry the
# original code in error.data.code; this map is the fallback).
RPC_TO_TOOL_CODE = {
    -32001: "ToolNotFound",
    -32002: "SpecInvalid",
    -32003: "ExecutionFailed",
    -32004: "Timeout",
    -32005: "RemoteUnavailable",
    -32006: "ExpertUnavailable",
}


def _request_body(req_id: Any, method: str, params: Any) -> bytes:
    return canonical_json(
        {"jsonrpc": PROTOCOL_VERSION, "id": req_id, "method": method, "params": params}
    ).encode("utf-8")


def _response_error_to_tool_error(error: dict) -> ToolError:
    data = error.get("data") or {}
    code = data.get("code") or RPC_TO_TOOL_CODE.get(error.get("code"), EXECUTION_FAILED)
    return ToolError(code=code, message=error.get("message", "remote error"), detail=data.get("detail"))


class RpcClient:
    """Shared surface over the concrete transports below."""

    def _roundtrip(self, method: str, params: Any) -> Any:
        raise NotImplementedError

    def request(self, method: str, params: Any) -> Any:
        response = self._roundtrip(method, params)
        version = response.get("jsonrpc")
        if version != PROTOCOL_VERSION:
            raise ToolError(
                REMOTE_UNAVAILABLE,
                f"protocol version mismatch: client speaks {PROTOCOL_VERSION}, server says {version!r}",
            )
        if "error" in response:
            raise _response_error_to_tool_error(response["error"])
        return response.get("result")

    def list_tools(self, tag: str | None = None, origin: str | None = None) -> list[dict]:
        params: dict[str, Any] = {}
        if tag is not None:
            params["tag"] = tag
        if origin is not None:
            params["origin"] = origin
        return self.request("list_tools", params)["tools"]

    def find_tool(self, query: str, strategy: str = "keyword", limit: int = 10) -> list[dict]:
        return self.request(
            "find_tool", {"query": query, "strategy": strategy, "limit": limit}
        )["matches"]

    def call_tool(self, name: str, arguments: dict) -> ToolResult:
        try:
            result = self.request("call_tool", {"name": name, "arguments": arguments})
        except ToolError as exc:
            return error_result(exc)
        return ToolResult.from_dict(result)

    def close(self) -> None:
        pass


class _StreamClient(RpcClient):
    """Correlates pipelined requests on one framed byte stream."""

    def __init__(self) -> None:
        self._ids = itertools.count(1)
        self._pending: dict[Any, dict | ToolError] = {}
        self._events: dict[Any, threading.Event] = {}
        self._lock = threading.Lock()
        self._write_lock = threading.Lock()
        self._closed = False

    def _send(self, data: bytes) -> None:
        raise NotImplementedError

    def _read(self):  # -> bytes | None
        raise NotImplementedError

    def _start_reader(self) -> None:
        threading.Thread(target=self._reader_loop, daemon=True).start()

    def _reader_loop(self) -> None:
        while True:
            try:
                body = self._read()
            except (OSError, FramingError):
                body = None
            if body is None:
                self._fail_all(ToolError(REMOTE_UNAVAILABLE, "connection closed"))
                return
            try:
                message = json.loads(body.decode("utf-8"))
            except (json.JSONDecodeError, UnicodeDecodeError):
                continue
            req_id = message.get("id")
            with self._lock:
                event = self._events.get(req_id)
                if event is not None:
                    self._pending[req_id] = message
                    event.set()

    def _fail_all(self, error: ToolError) -> None:
        with self._lock:
            self._closed = True
            for req_id, event in self._events.items():
                self._pending.setdefault(req_id, error)
                event.set()

    def _roundtrip(self, method: str, params: Any) -> Any:
        req_id = next(self._ids)
        event = threading.Event()
        with self._lock:
            if self._closed:
                raise ToolError(REMOTE_UNAVAILABLE, "connection closed")
            self._events[req_id] = event
        with self._write_lock:
            self._send(encode_frame(_request_body(req_id, method, params)))
        if not event.wait(timeout=120):
            with self._lock:
                self._events.pop(req_id, None)
            raise ToolError(REMOTE_UNAVAILABLE, "request timed out")
        with self._lock:
            response = self._pending.pop(req_id)
            self._events.pop(req_id, None)
        if isinstance(response, ToolError):
            raise response
        return response


class TcpClient(_StreamClient):
    def __init__(self, host: str, port: int, timeout: float = CONNECT_TIMEOUT):
        super().__init__()
        try:
            self._sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise ToolError(REMOTE_UNAVAILABLE, f"cannot connect to {host}:{port}: {exc}") from exc
        self._sock.settimeout(None)
        self._file = self._sock.makefile("rb")
        self._start_reader()

    def _send(self, data: bytes) -> None:
        self._sock.sendall(data)

    def _read(self):
        return read_frame(self._file)

    def close(self) -> None:
        try:
            self._sock.close()
        except OSError:
            pass


class StdioClient(_StreamClient):
    def __init__(self, command: str):
        super().__init__()
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
            )
        except OSError as exc:
            raise ToolError(REMOTE_UNAVAILABLE, f"cannot spawn {command!r}: {exc}") from exc
        self._start_reader()

    def _send(self, data: bytes) -> None:
        assert self._proc.stdin is not None
        self._proc.stdin.write(data)
        self._proc.stdin.flush()

    def _read(self):
        assert self._proc.stdout is not None
        return read_frame(self._proc.stdout)

    def close(self) -> None:
        self._proc.terminate()
        try:
            self._proc.wait(timeout=5)
        except subprocess.TimeoutExpired:
            self._proc.kill()


class HttpClient(RpcClient):
    def __init__(self, base_url: str, timeout: float = CONNECT_TIMEOUT):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._ids = itertools.count(1)

    def _roundtrip(self, method: str, params: Any) -> Any:
        body = _request_body(next(self._ids), method, params)
        request = urllib.request.Request(
            f"{self.base_url}/rpc", data=body, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(request, timeout=self.timeout) as response:
                return json.loads(response.read().decode("utf-8"))
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise ToolError(REMOTE_UNAVAILABLE, f"http request failed: {exc}") from exc


def connect(endpoint: str, timeout: float = CONNECT_TIMEOUT) -> RpcClient:
    if endpoint.startswith("http://") or endpoint.startswith("https://"):
        return HttpClient(endpoint, timeout)
    if endpoint.startswith("stdio:"):
        return StdioClient(endpoint[len("stdio:") :])
    host, sep, port = endpoint.rpartition(":")
    if not sep or not port.isdigit():
        raise ToolError(REMOTE_UNAVAILABLE, f"bad endpoint address {endpoint!r}")
    return TcpClient(host or "127.0.0.1", int(port), timeout)


class ProxyHandler:
    """Local handler that forwards calls to a remote tool unchanged."""

    reentrant = True

    def __init__(self, client: RpcClient, tool_name: str):
        self.client = client
        self.tool_name = tool_name

    def run(self, arguments: dict) -> ToolResult:
        return self.client.call_tool(self.tool_name, dict(arguments))


def proxy_handler(client: RpcClient, tool_name: str) -> ProxyHandler:
    return ProxyHandler(client, tool_name)
