"""Client-side tools that bridge calls to a running expert service.

All three handlers take a ``base_url`` setting pointing at the expert HTTP
server; the TOOLHUB_EXPERT_URL environment variable is the fallback.
"""

from __future__ import annotations

import json
import os
import time
import urllib.error
import urllib.request
from typing import Any

from ..errors import EXPERT_UNAVAILABLE, ToolError

POLL_SLICE_SECONDS = 30.0
DEFAULT_CONSULT_TIMEOUT = 3600.0


class ExpertClient:
    def __init__(self, base_url: str):
        self.base_url = base_url.rstrip("/")

    def _request(self, method: str, path: str, body: Any = None, timeout: float = 65.0) -> Any:
        data = json.dumps(body).encode("utf-8") if body is not None else None
        request = urllib.request.Request(
            f"{self.base_url}{path}",
            data=data,
            method=method,
            headers={"Content-Type": "application/json"},
        )
        try:
            with urllib.request.urlopen(request, timeout=timeout) as response:
                return json.loads(response.read().decode("utf-8"))
        except urllib.error.HTTPError as exc:
            detail = exc.read().decode("utf-8", "replace")
            raise ToolError(
                EXPERT_UNAVAILABLE,
                f"expert service rejected {path}: HTTP {exc.code}",
                detail={"status": exc.code, "body": detail},
            ) from exc
        except (urllib.error.URLError, OSError, json.JSONDecodeError) as exc:
            raise ToolError(
                EXPERT_UNAVAILABLE, f"expert service unreachable: {exc}"
            ) from exc

    def create(self, question: str, context: Any = None, timeout_seconds: float = DEFAULT_CONSULT_TIMEOUT) -> dict:
        return self._request(
            "POST",
            "/api/requests",
            {"question": question, "context": context, "timeout_seconds": timeout_seconds},
        )

    def get(self, request_id: str) -> dict:
        return self._request("GET", f"/api/requests/{request_id}")

    def wait(self, request_id: str, timeout: float) -> dict:
        """Block until answered or timeout; long-polls in short slices so the
        HTTP layer never holds a single request open for the full consult."""
        deadline = time.monotonic() + timeout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return {"status": "pending", "response": None}
            step = min(remaining, POLL_SLICE_SECONDS)
            state = self._request(
                "GET",
                f"/api/requests/{request_id}/wait?timeout={step}",
                timeout=step + 10.0,
            )
            if state.get("response") is not None or state.get("status") == "expired":
                return state


def _resolve_client(settings: dict[str, Any]) -> ExpertClient:
    base_url = settings.get("base_url") or os.environ.get("TOOLHUB_EXPERT_URL")
    if not base_url:
        raise ToolError(
            EXPERT_UNAVAILABLE,
            "no expert service configured: set the base_url setting or TOOLHUB_EXPERT_URL",
        )
    return ExpertClient(base_url)


class ConsultHumanExpert:
    """Submit a question and block until an expert answers or the consult
    timeout elapses. A timeout keeps the request alive: the id in the error
    detail can be polled later with get_expert_response."""

    reentrant = True

    def __init__(self, settings: dict[str, Any] | None = None):
        self.settings = settings or {}

    def run(self, arguments: dict[str, Any]) -> dict[str, Any]:
        client = _resolve_client(self.settings)
        timeout = float(arguments.get("timeout_seconds", self.settings.get("timeout_seconds", DEFAULT_CONSULT_TIMEOUT)))
        record = client.create(
            arguments["question"], context=arguments.get("context"), timeout_seconds=timeout
        )
        request_id = record["id"]
        state = client.wait(request_id, timeout)
        response = state.get("response")
        if response is None:
            raise ToolError(
                EXPERT_UNAVAILABLE,
                f"no expert answer within {timeout:g}s",
                detail={"request_id": request_id, "status": state.get("status")},
            )
        return {
            "request_id": request_id,
            "verdict": response["verdict"],
            "text": response["text"],
            "expert_id": response["expert_id"],
        }


class GetExpertResponse:
    """Fetch the answer for a previously created request. Raises until the
    request is answered, so late answers stay retrievable by id."""

    reentrant = True

    def __init__(self, settings: dict[str, Any] | None = None):
        self.settings = settings or {}

    def run(self, arguments: dict[str, Any]) -> dict[str, Any]:
        client = _resolve_client(self.settings)
        record = client.get(arguments["request_id"])
        response = record.get("response")
        if response is None:
            raise ToolError(
                EXPERT_UNAVAILABLE,
                f"request {arguments['request_id']} has no answer yet",
                detail={"request_id": arguments["request_id"], "status": record["status"]},
            )
        return {
            "request_id": record["id"],
            "verdict": response["verdict"],
            "text": response["text"],
            "expert_id": response["expert_id"],
        }


class GetExpertStatus:
    reentrant = True

    def __init__(self, settings: dict[str, Any] | None = None):
        self.settings = settings or {}

    def run(self, arguments: dict[str, Any]) -> dict[str, Any]:
        client = _resolve_client(self.settings)
        record = client.get(arguments["request_id"])
        pending = client._request("GET", "/api/requests?status=pending")["requests"]
        position = 0
        for i, item in enumerate(pending, start=1):
            if item["id"] == record["id"]:
                position = i
                break
        return {
            "request_id": record["id"],
            "status": record["status"],
            "queue_position": position,
            "claimed_by": record.get("claimed_by"),
        }
