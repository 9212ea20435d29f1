"""Human-expert request queue with journal persistence.

The queue is the single serialization point: consults block on an answer
notification, console users claim and respond over HTTP, and every state
change is appended to a JSONL journal that restores the queue on restart.
"""

from __future__ import annotations

import json
import queue
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

VERDICTS = ("approve", "reject", "free-text")
STATUSES = ("pending", "claimed", "answered", "expired")


@dataclass
class ExpertResponse:
    request_id: str
    verdict: str
    text: str
    expert_id: str

    def to_dict(self) -> dict[str, Any]:
        return {
            "request_id": self.request_id,
            "verdict": self.verdict,
            "text": self.text,
            "expert_id": self.expert_id,
        }


@dataclass
class ExpertRequest:
    id: str
    question: str
    context: Any
    status: str
    created_at: float
    timeout_seconds: float
    answered_at: float | None = None
    claimed_by: str | None = None
    response: ExpertResponse | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "question": self.question,
            "context": self.context,
            "status": self.status,
            "created_at": self.created_at,
            "answered_at": self.answered_at,
            "timeout_seconds": self.timeout_seconds,
            "claimed_by": self.claimed_by,
            "response": self.response.to_dict() if self.response else None,
        }


class Conflict(Exception):
    """Claim or response race lost / already answered (HTTP 409)."""


class Expired(Exception):
    """Request expired (HTTP 410)."""


class UnknownRequest(KeyError):
    """No such request id (HTTP 404)."""


class ExpertQueue:
    def __init__(self, journal_path: str | Path | None = None):
        self._requests: dict[str, ExpertRequest] = {}
        self._order: list[str] = []  # creation order, for FIFO views
        self._lock = threading.Lock()
        self._answered = threading.Condition(self._lock)
        self._subscribers: list[queue.Queue] = []
        self._journal_path = Path(journal_path) if journal_path else None
        if self._journal_path and self._journal_path.exists():
            self._replay()

    # -- journal ---------------------------------------------------------------

    def _journal(self, event: dict[str, Any]) -> None:
        if self._journal_path is None:
            return
        with self._journal_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")

    def _replay(self) -> None:
        assert self._journal_path is not None
        for line in self._journal_path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            event = json.loads(line)
            kind = event["event"]
            if kind == "created":
                req = ExpertRequest(
                    id=event["id"],
                    question=event["question"],
                    context=event.get("context"),
                    status="pending",
                    created_at=event["created_at"],
                    timeout_seconds=event["timeout_seconds"],
                )
                self._requests[req.id] = req
                self._order.append(req.id)
            elif kind == "claimed":
                req = self._requests.get(event["id"])
                if req and req.status == "pending":
                    req.status = "claimed"
                    req.claimed_by = event["expert_id"]
            elif kind == "answered":
                req = self._requests.get(event["id"])
                if req and req.status in ("pending", "claimed"):
                    req.status = "answered"
                    req.answered_at = event.get("answered_at")
                    req.response = ExpertResponse(
                        request_id=event["id"],
                        verdict=event["verdict"],
                        text=event["text"],
                        expert_id=event["expert_id"],
                    )
            elif kind == "expired":
                req = self._requests.get(event["id"])
                if req and req.status in ("pending", "claimed"):
                    req.status = "expired"

    # -- events -----------------------------------------------------------------

    def subscribe(self) -> queue.Queue:
        q: queue.Queue = queue.Queue()
        with self._lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q: queue.Queue) -> None:
        with self._lock:
            if q in self._subscribers:
                self._subscribers.remove(q)

    def _notify(self, kind: str, request: ExpertRequest) -> None:
        event = {"event": kind, "request": request.to_dict()}
        for q in list(self._subscribers):
            q.put(event)

    # -- operations ----------------------------------------------------------------

    def create(self, question: str, context: Any = None, timeout_seconds: float = 3600.0) -> ExpertRequest:
        req = ExpertRequest(
            id=uuid.uuid4().hex,
            question=question,
            context=context,
            status="pending",
            created_at=time.time(),
            timeout_seconds=timeout_seconds,
        )
        with self._lock:
            self._requests[req.id] = req
            self._order.append(req.id)
        self._journal(
            {
                "event": "created",
                "id": req.id,
                "question": question,
                "context": context,
                "created_at": req.created_at,
                "timeout_seconds": timeout_seconds,
            }
        )
        self._notify("created", req)
        return req

    def _get(self, request_id: str) -> ExpertRequest:
        req = self._requests.get(request_id)
        if req is None:
            raise UnknownRequest(request_id)
        return req

    def get(self, request_id: str) -> ExpertRequest:
        with self._lock:
            return self._get(request_id)

    def list(self, status: str | None = None) -> list[ExpertRequest]:
        with self._lock:
            items = [self._requests[i] for i in self._order]
        if status is not None:
            items = [r for r in items if r.status == status]
        return items

    def status(self, request_id: str) -> tuple[str, int | None]:
        """Current status plus 1-based FIFO position among pending requests."""
        with self._lock:
            req = self._get(request_id)
            if req.status != "pending":
                return req.status, None
            position = 0
            for rid in self._order:
                if self._requests[rid].status == "pending":
                    position += 1
                    if rid == request_id:
                        return "pending", position
        return req.status, None

    def claim(self, request_id: str, expert_id: str) -> ExpertRequest:
        with self._lock:
            req = self._get(request_id)
            if req.status == "expired":
                raise Expired(request_id)
            if req.status == "answered":
                raise Conflict("already answered")
            if req.status == "claimed":
                if req.claimed_by == expert_id:
                    return req  # idempotent per expert
                raise Conflict(f"claimed by {req.claimed_by}")
            req.status = "claimed"
            req.claimed_by = expert_id
        self._journal({"event": "claimed", "id": request_id, "expert_id": expert_id})
        self._notify("claimed", req)
        return req

    def respond(self, request_id: str, verdict: str, text: str, expert_id: str) -> ExpertResponse:
        """Record exactly one response. Claims are advisory: an unanswered
        request accepts a response from any expert."""
        if verdict not in VERDICTS:
            raise ValueError(f"verdict must be one of {VERDICTS}")
        with self._lock:
            req = self._get(request_id)
            if req.status == "expired":
                raise Expired(request_id)
            if req.status == "answered":
                raise Conflict("already answered")
            response = ExpertResponse(
                request_id=request_id, verdict=verdict, text=text, expert_id=expert_id
            )
            req.status = "answered"
            req.answered_at = time.time()
            req.response = response
            self._answered.notify_all()
        self._journal(
            {
                "event": "answered",
                "id": request_id,
                "verdict": verdict,
                "text": text,
                "expert_id": expert_id,
                "answered_at": req.answered_at,
            }
        )
        self._notify("answered", req)
        return response

    def expire(self, request_id: str) -> ExpertRequest:
        with self._lock:
            req = self._get(request_id)
            if req.status == "answered":
                raise Conflict("already answered")
            if req.status != "expired":
                req.status = "expired"
        self._journal({"event": "expired", "id": request_id})
        self._notify("expired", req)
        return req

    def wait_for_answer(self, request_id: str, timeout: float) -> ExpertResponse | None:
        deadline = time.monotonic() + timeout
        with self._lock:
            req = self._get(request_id)
            while req.response is None and req.status not in ("expired",):
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return None
                self._answered.wait(timeout=remaining)
            return req.response
