from __future__ import annotations

import json
import sys
import threading
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toolhub.errors import ToolError
from toolhub.hub import ToolHub
from toolhub.protocol import ParameterSpec, ToolSpec, canonical_json
from toolhub.wire import RpcService, connect, serve_http, serve_tcp
from toolhub.wire.client import TcpClient
from toolhub.wire.framing import (
    FramingError,
    decode_frame,
    encode_frame,
    try_decode,
)
from toolhub.wire.server import TOOL_ERROR_CODES

from .conftest import make_spec


class Echo:
    def run(self, args):
        return {"text": args["text"]}


class Slow:
    reentrant = True

    def run(self, args):
        time.sleep(args.get("delay", 0))
        return {"tag": args["tag"]}


def build_hub():
    hub = ToolHub()
    hub.register_local(
        ToolSpec("echo", "repeats text", parameters=(ParameterSpec("text", "string", "t", True),)),
        Echo(),
    )
    hub.register_local(
        ToolSpec(
            "slow",
            "sleeps then tags",
            parameters=(
                ParameterSpec("tag", "string", "label", True),
                ParameterSpec("delay", "number", "seconds", required=False),
            ),
        ),
        Slow(),
    )
    return hub


@pytest.fixture()
def tcp_server():
    hub = build_hub()
    handle = serve_tcp(hub)
    yield handle
    handle.stop()


@pytest.fixture()
def http_server():
    hub = build_hub()
    handle = serve_http(hub)
    yield handle
    handle.stop()


# -- framing -------------------------------------------------------------------

def test_frame_grammar_is_bit_exact():
    assert encode_frame(b"{}") == b"Content-Length: 2\r\n\r\n{}"
    body, rest = decode_frame(b"Content-Length: 2\r\n\r\n{}extra")
    assert body == b"{}" and rest == b"extra"
    for bad in (b"Content-Length: 02\r\n\r\n{}", b"content-length: 2\r\n\r\n{}", b"{}"):
        with pytest.raises(FramingError):
            decode_frame(bad)


@given(st.binary(max_size=500))
def test_frame_roundtrip(body):
    got, rest = decode_frame(encode_frame(body))
    assert got == body and rest == b""


@given(st.lists(st.binary(max_size=50), min_size=1, max_size=5))
def test_incremental_decode_recovers_all_frames(bodies):
    stream = b"".join(encode_frame(b) for b in bodies)
    out = []
    buffer = b""
    for i in range(0, len(stream), 7):  # feed in small chunks
        buffer += stream[i : i + 7]
        while True:
            state, body, rest = try_decode(buffer)
            if state != "ok":
                break
            out.append(body)
            buffer = rest
    assert out == bodies


def test_try_decode_flags_garbage():
    state, _, _ = try_decode(b"GET / HTTP/1.1\r\n\r\n")
    assert state == "error"
    state, _, _ = try_decode(b"Content-Len")
    assert state == "incomplete"


# -- dispatch ------------------------------------------------------------------

def service():
    return RpcService(build_hub())


def rpc(svc, method, params, req_id=1, version="2.0"):
    return svc.handle({"jsonrpc": version, "id": req_id, "method": method, "params": params})


def test_call_tool_success_envelope():
    response = rpc(service(), "call_tool", {"name": "echo", "arguments": {"text": "hi"}})
    assert response["jsonrpc"] == "2.0" and response["id"] == 1
    assert response["result"]["status"] == "ok"
    assert response["result"]["payload"] == {"text": "hi"}


@pytest.mark.parametrize(
    "params, tool_code",
    [
        ({"name": "ghost", "arguments": {}}, "ToolNotFound"),
        ({"name": "echo", "arguments": {}}, "MissingRequired"),
        ({"name": "echo", "arguments": {"text": "x", "y": 1}}, "UnknownArgument"),
        ({"name": "echo", "arguments": {"text": 3}}, "TypeMismatch"),
    ],
)
def test_tool_errors_map_to_rpc_codes(params, tool_code):
    response = rpc(service(), "call_tool", params)
    assert response["error"]["code"] == TOOL_ERROR_CODES[tool_code]
    assert response["error"]["data"]["code"] == tool_code


def test_parse_error_and_invalid_request_and_unknown_method():
    svc = service()
    parsed = json.loads(svc.handle_bytes(b"not json"))
    assert parsed["error"]["code"] == -32700
    assert svc.handle([1, 2])["error"]["code"] == -32600
    assert rpc(svc, "explode", {})["error"]["code"] == -32601


def test_version_mismatch_names_both_versions():
    response = rpc(service(), "list_tools", {}, version="1.0")
    assert response["error"]["code"] == -32600
    assert "2.0" in response["error"]["message"] and "1.0" in response["error"]["message"]


def test_mcp_method_aliases():
    svc = service()
    listed = rpc(svc, "tools/list", {})
    assert {t["name"] for t in listed["result"]["tools"]} == {"echo", "slow"}
    called = rpc(svc, "tools/call", {"name": "echo", "arguments": {"text": "via alias"}})
    assert called["result"]["payload"] == {"text": "via alias"}


def test_find_tool_over_rpc():
    response = rpc(service(), "find_tool", {"query": "repeat some text", "limit": 5})
    assert response["result"]["matches"][0]["tool_name"] == "echo"


# -- tcp transport ---------------------------------------------------------------

def test_tcp_client_roundtrip(tcp_server):
    client = connect(tcp_server.address)
    try:
        assert {t["name"] for t in client.list_tools()} == {"echo", "slow"}
        result = client.call_tool("echo", {"text": "over tcp"})
        assert result.ok and result.payload == {"text": "over tcp"}
        failure = client.call_tool("ghost", {})
        assert failure.error.code == "ToolNotFound"
    finally:
        client.close()


def test_tcp_pipelining_answers_out_of_order(tcp_server):
    client = connect(tcp_server.address)
    results = {}

    def call(tag, delay):
        results[tag] = client.call_tool("slow", {"tag": tag, "delay": delay})

    try:
        threads = [
            threading.Thread(target=call, args=("tortoise", 0.3)),
            threading.Thread(target=call, args=("hare", 0.0)),
        ]
        start = time.monotonic()
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        elapsed = time.monotonic() - start
        assert results["tortoise"].payload == {"tag": "tortoise"}
        assert results["hare"].payload == {"tag": "hare"}
        assert elapsed < 0.55  # concurrent, not serialized
    finally:
        client.close()


def test_tcp_resyncs_after_malformed_frame(tcp_server):
    import socket

    host, port = tcp_server.address.split(":")
    sock = socket.create_connection((host, int(port)), timeout=5)
    try:
        good = canonical_json(
            {"jsonrpc": "2.0", "id": 7, "method": "list_tools", "params": {}}
        ).encode()
        sock.sendall(b"garbage bytes here\r\n\r\n" + encode_frame(good))
        file = sock.makefile("rb")
        from toolhub.wire.framing import read_frame

        first = json.loads(read_frame(file))
        assert first["error"]["code"] == -32700
        second = json.loads(read_frame(file))
        assert second["id"] == 7 and "result" in second
    finally:
        sock.close()


def test_tcp_connection_refused():
    with pytest.raises(ToolError) as exc:
        TcpClient("127.0.0.1", 1)  # reserved port, nothing listening
    assert exc.value.code == "RemoteUnavailable"


# -- http transport ----------------------------------------------------------------

def test_http_client_roundtrip(http_server):
    client = connect(http_server.address)
    result = client.call_tool("echo", {"text": "over http"})
    assert result.ok and result.payload == {"text": "over http"}
    failure = client.call_tool("echo", {})
    assert failure.error.code == "MissingRequired"


def test_http_always_200_with_rpc_error_in_body(http_server):
    import urllib.request

    request = urllib.request.Request(
        f"{http_server.address}/rpc",
        data=b"not json",
        headers={"Content-Type": "application/json"},
    )
    with urllib.request.urlopen(request, timeout=5) as response:
        assert response.status == 200
        assert json.loads(response.read())["error"]["code"] == -32700


# -- stdio transport ------------------------------------------------------------------

def test_stdio_subprocess_roundtrip():
    client = connect(f"stdio:{sys.executable} -m toolhub serve --transport stdio --demo")
    try:
        names = {t["name"] for t in client.list_tools()}
        assert "echo" in names and len(names) >= 20
        result = client.call_tool("echo", {"text": "over stdio"})
        assert result.ok and result.payload == {"text": "over stdio"}
    finally:
        client.close()


# -- golden transcript -----------------------------------------------------------------

def test_golden_transcript(tcp_server):
    """Known request bytes produce byte-identical response bodies."""
    import socket

    from toolhub.wire.framing import read_frame

    host, port = tcp_server.address.split(":")
    sock = socket.create_connection((host, int(port)), timeout=5)
    try:
        file = sock.makefile("rb")
        exchanges = [
            (
                b'{"id":1,"jsonrpc":"2.0","method":"call_tool","params":{"arguments":{"text":"golden"},"name":"echo"}}',
                {"jsonrpc": "2.0", "id": 1, "result": {"status": "ok", "payload": {"text": "golden"}}},
            ),
            (
                b'{"id":2,"jsonrpc":"2.0","method":"call_tool","params":{"arguments":{},"name":"ghost"}}',
                {
                    "jsonrpc": "2.0",
                    "id": 2,
                    "error": {
                        "code": -32001,
                        "message": "no tool named 'ghost'",
                        "data": {"code": "ToolNotFound", "detail": None},
                    },
                },
            ),
        ]
        for request_body, expected in exchanges:
            sock.sendall(encode_frame(request_body))
            response = json.loads(read_frame(file))
            if "result" in response:
                response["result"].pop("duration_ms", None)
            if "error" in response:
                response["error"].get("data", {}).pop("duration_ms", None)
            assert response == expected
    finally:
        sock.close()
