"""Structured errors shared by every layer of the runtime."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

# Closed set of machine-readable error codes.
TOOL_NOT_FOUND = "ToolNotFound"
SPEC_INVALID = "SpecInvalid"
MISSING_REQUIRED = "MissingRequired"
UNKNOWN_ARGUMENT = "UnknownArgument"
TYPE_MISMATCH = "TypeMismatch"
EXECUTION_FAILED = "ExecutionFailed"
TIMEOUT = "Timeout"
REMOTE_UNAVAILABLE = "RemoteUnavailable"
EXPERT_UNAVAILABLE = "ExpertUnavailable"

ERROR_CODES = frozenset(
    {
        TOOL_NOT_FOUND,
        SPEC_INVALID,
        MISSING_REQUIRED,
        UNKNOWN_ARGUMENT,
        TYPE_MISMATCH,
        EXECUTION_FAILED,
        TIMEOUT,
        REMOTE_UNAVAILABLE,
        EXPERT_UNAVAILABLE,
    }
)


@dataclass(frozen=True)
class ToolError(Exception):
    """An error with a stable code, a human-readable message and optional context."""

    code: str
    message: str
    detail: Any = field(default=None)

    def __post_init__(self) -> None:
        if self.code not in ERROR_CODES:
            raise ValueError(f"unknown error code: {self.code!r}")
        if not self.message:
            raise ValueError("error message must be non-empty")

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"code": self.code, "message": self.message}
        if self.detail is not None:
            out["detail"] = self.detail
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ToolError":
        return cls(code=data["code"], message=data["message"], detail=data.get("detail"))


def spec_invalid(message: str, detail: Any = None) -> ToolError:
    return ToolError(SPEC_INVALID, message, detail)
