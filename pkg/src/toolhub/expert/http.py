"""HTTP front end for the expert queue.

Routes:
    POST /api/requests                  create a request
    GET  /api/requests?status=pending   list requests in creation order
    GET  /api/requests/{id}             one request
    GET  /api/requests/{id}/wait        long-poll until answered or timeout
    POST /api/requests/{id}/claim       advisory claim (409 on lost race)
    POST /api/requests/{id}/response    record the single answer (409/410)
    GET  /api/events                    server-sent events + heartbeats
"""

from __future__ import annotations

import json
import queue
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any

from .service import Conflict, Expired, ExpertQueue, UnknownRequest, VERDICTS

HEARTBEAT_SECONDS = 15.0

_REQUEST_PATH = re.compile(r"^/api/requests/([0-9a-f]+)(/(claim|response|wait))?$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    expert_queue: ExpertQueue  # set on the subclass by serve_expert_http
    heartbeat_seconds: float = HEARTBEAT_SECONDS

    def log_message(self, fmt: str, *args: Any) -> None:
        pass

    def _send_json(self, status: int, payload: Any) -> None:
        body = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _read_body(self) -> Any:
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length) if length else b""
        if not raw:
            return {}
        try:
            return json.loads(raw.decode("utf-8"))
        except (json.JSONDecodeError, UnicodeDecodeError):
            return None

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self) -> None:
        path, _, query = self.path.partition("?")
        if path == "/api/events":
            self._stream_events()
            return
        if path == "/api/requests":
            status = None
            for pair in query.split("&"):
                key, _, value = pair.partition("=")
                if key == "status" and value:
                    status = value
            items = self.expert_queue.list(status=status)
            self._send_json(200, {"requests": [r.to_dict() for r in items]})
            return
        m = _REQUEST_PATH.match(path)
        if m and m.group(3) is None:
            try:
                req = self.expert_queue.get(m.group(1))
            except UnknownRequest:
                self._send_json(404, {"error": "unknown request"})
                return
            self._send_json(200, req.to_dict())
            return
        if m and m.group(3) == "wait":
            timeout = 30.0
            for pair in query.split("&"):
                key, _, value = pair.partition("=")
                if key == "timeout" and value:
                    timeout = min(float(value), 60.0)
            try:
                response = self.expert_queue.wait_for_answer(m.group(1), timeout)
                req = self.expert_queue.get(m.group(1))
            except UnknownRequest:
                self._send_json(404, {"error": "unknown request"})
                return
            self._send_json(
                200,
                {
                    "status": req.status,
                    "response": response.to_dict() if response else None,
                },
            )
            return
        self._send_json(404, {"error": "not found"})

    def do_POST(self) -> None:
        path = self.path.partition("?")[0]
        body = self._read_body()
        if body is None:
            self._send_json(400, {"error": "invalid JSON body"})
            return
        if path == "/api/requests":
            question = body.get("question")
            if not isinstance(question, str) or not question.strip():
                self._send_json(400, {"error": "question is required"})
                return
            req = self.expert_queue.create(
                question,
                context=body.get("context"),
                timeout_seconds=float(body.get("timeout_seconds", 3600.0)),
            )
            self._send_json(201, req.to_dict())
            return
        m = _REQUEST_PATH.match(path)
        if m and m.group(3) == "claim":
            expert_id = body.get("expert_id")
            if not isinstance(expert_id, str) or not expert_id:
                self._send_json(400, {"error": "expert_id is required"})
                return
            try:
                req = self.expert_queue.claim(m.group(1), expert_id)
            except UnknownRequest:
                self._send_json(404, {"error": "unknown request"})
                return
            except Expired:
                self._send_json(410, {"error": "request expired"})
                return
            except Conflict as exc:
                self._send_json(409, {"error": str(exc)})
                return
            self._send_json(200, req.to_dict())
            return
        if m and m.group(3) == "response":
            verdict = body.get("verdict")
            if verdict not in VERDICTS:
                self._send_json(400, {"error": f"verdict must be one of {list(VERDICTS)}"})
                return
            try:
                response = self.expert_queue.respond(
                    m.group(1),
                    verdict=verdict,
                    text=body.get("text", ""),
                    expert_id=body.get("expert_id", "anonymous"),
                )
            except UnknownRequest:
                self._send_json(404, {"error": "unknown request"})
                return
            except Expired:
                self._send_json(410, {"error": "request expired"})
                return
            except Conflict as exc:
                self._send_json(409, {"error": str(exc)})
                return
            self._send_json(200, response.to_dict())
            return
        self._send_json(404, {"error": "not found"})

    def _stream_events(self) -> None:
        sub = self.expert_queue.subscribe()
        try:
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            while True:
                try:
                    event = sub.get(timeout=self.heartbeat_seconds)
                except queue.Empty:
                    self.wfile.write(b": heartbeat\n\n")
                    self.wfile.flush()
                    continue
                kind = event["event"]
                data = json.dumps(event["request"])
                self.wfile.write(f"event: {kind}\ndata: {data}\n\n".encode("utf-8"))
                self.wfile.flush()
        except (BrokenPipeError, ConnectionResetError, OSError):
            pass
        finally:
            self.expert_queue.unsubscribe(sub)


class ExpertServerHandle:
    def __init__(self, address: str, server: ThreadingHTTPServer, thread: threading.Thread):
        self.address = address
        self._server = server
        self._thread = thread

    def stop(self) -> None:
        self._server.shutdown()
        self._thread.join(timeout=5)


def serve_expert_http(
    expert_queue: ExpertQueue,
    host: str = "127.0.0.1",
    port: int = 0,
    heartbeat_seconds: float = HEARTBEAT_SECONDS,
) -> ExpertServerHandle:
    handler = type(
        "Handler",
        (_Handler,),
        {"expert_queue": expert_queue, "heartbeat_seconds": heartbeat_seconds},
    )
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    address = f"http://{server.server_address[0]}:{server.server_address[1]}"
    return ExpertServerHandle(address, server, thread)
