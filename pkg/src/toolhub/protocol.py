"""Tool specification and interaction schemas.

Every other module exchanges the types defined here: ToolSpec describes a
tool, ToolCall is the single invocation form ``{"name": ..., "arguments": ...}``,
and ToolResult is the structured success/error envelope.
"""

from __future__ import annotations

import json
import re
import time
from dataclasses import dataclass, field
from typing import Any, Mapping

from .errors import (
    MISSING_REQUIRED,
    SPEC_INVALID,
    TYPE_MISMATCH,
    UNKNOWN_ARGUMENT,
    ToolError,
    spec_invalid,
)

NAME_RE = re.compile(r"^[a-z][a-z0-9_]*$")
MAX_NAME_LEN = 128

PRIMITIVE_TYPES = ("string", "integer", "number", "boolean", "object")
ARRAY_RE = re.compile(r"^array<(.+)>$")


def is_valid_type(type_str: str) -> bool:
    """True iff ``type_str`` is in the closed type enumeration."""
    if type_str in PRIMITIVE_TYPES:
        return True
    m = ARRAY_RE.match(type_str)
    if m:
        return is_valid_type(m.group(1))
    return False


@dataclass(frozen=True)
class ParameterSpec:
    name: str
    type: str
    description: str = ""
    required: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "type": self.type,
            "description": self.description,
            "required": self.required,
        }


@dataclass(frozen=True)
class ToolSpec:
    name: str
    description: str
    parameters: tuple[ParameterSpec, ...] = ()
    return_schema: Any = None
    tags: tuple[str, ...] = ()
    settings: Mapping[str, Any] = field(default_factory=dict)

    def parameter(self, name: str) -> ParameterSpec | None:
        for p in self.parameters:
            if p.name == name:
                return p
        return None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "name": self.name,
            "description": self.description,
            "parameters": [p.to_dict() for p in self.parameters],
            "return_schema": self.return_schema,
        }
        if self.tags:
            out["tags"] = list(self.tags)
        if self.settings:
            out["settings"] = dict(self.settings)
        return out


@dataclass(frozen=True)
class ToolCall:
    name: str
    arguments: Mapping[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "arguments": dict(self.arguments)}

    def serialize(self) -> str:
        return canonical_json(self.to_dict())


@dataclass(frozen=True)
class ToolResult:
    status: str  # "ok" | "error"
    payload: Any = None
    error: ToolError | None = None
    duration_ms: float = 0.0

    def __post_init__(self) -> None:
        if self.status not in ("ok", "error"):
            raise ValueError(f"bad status: {self.status!r}")
        if self.status == "error" and self.error is None:
            raise ValueError("error result requires an error")
        if self.status == "ok" and self.error is not None:
            raise ValueError("ok result must not carry an error")
        if self.duration_ms < 0:
            raise ValueError("duration_ms must be non-negative")

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"status": self.status, "duration_ms": self.duration_ms}
        if self.status == "ok":
            out["payload"] = self.payload
        else:
            out["error"] = self.error.to_dict()  # type: ignore[union-attr]
        return out

    def serialize(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ToolResult":
        if data.get("status") == "ok":
            return cls("ok", payload=data.get("payload"), duration_ms=data.get("duration_ms", 0.0))
        return cls(
            "error",
            error=ToolError.from_dict(data["error"]),
            duration_ms=data.get("duration_ms", 0.0),
        )


def ok_result(payload: Any, duration_ms: float = 0.0) -> ToolResult:
    return ToolResult("ok", payload=payload, duration_ms=duration_ms)


def error_result(error: ToolError, duration_ms: float = 0.0) -> ToolResult:
    return ToolResult("error", error=error, duration_ms=duration_ms)


def canonical_json(value: Any) -> str:
    """Deterministic serialization: sorted keys, no extra whitespace, UTF-8 safe."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def now_ms() -> float:
    return time.time() * 1000.0


# ---------------------------------------------------------------------------
# Return-schema descriptors


def validate_return_schema(schema: Any, path: str = "") -> None:
    """Raise SpecInvalid unless ``schema`` is a well-formed structural descriptor.

    A descriptor is either a type string from the closed enumeration or an
    object mapping field names to nested descriptors.
    """
    if schema is None:
        return
    if isinstance(schema, str):
        if not is_valid_type(schema):
            raise spec_invalid(f"invalid type {schema!r} in return schema", detail=path or ".")
        return
    if isinstance(schema, dict):
        for key, sub in schema.items():
            if not isinstance(key, str) or not key:
                raise spec_invalid("return schema field names must be non-empty strings", detail=path or ".")
            validate_return_schema(sub, f"{path}.{key}")
        return
    raise spec_invalid("return schema entries must be type names or objects", detail=path or ".")


def _value_matches_type(value: Any, type_str: str, path: str) -> tuple[bool, str]:
    if type_str == "string":
        return (isinstance(value, str), path)
    if type_str == "integer":
        return (isinstance(value, int) and not isinstance(value, bool), path)
    if type_str == "number":
        return (isinstance(value, (int, float)) and not isinstance(value, bool), path)
    if type_str == "boolean":
        return (isinstance(value, bool), path)
    if type_str == "object":
        return (isinstance(value, dict), path)
    m = ARRAY_RE.match(type_str)
    if m:
        if not isinstance(value, list):
            return (False, path)
        elem_type = m.group(1)
        for i, item in enumerate(value):
            okay, sub = _value_matches_type(item, elem_type, f"{path}[{i}]")
            if not okay:
                return (False, sub)
        return (True, path)
    return (False, path)


def conforms_to_return_schema(value: Any, schema: Any, path: str = "") -> tuple[bool, str]:
    """Check ``value`` against a return-schema descriptor.

    Returns ``(True, "")`` on match, else ``(False, path)`` where path points
    at the deepest failing field. Total: never raises on any value.
    """
    if schema is None:
        return (True, "")
    if isinstance(schema, str):
        okay, where = _value_matches_type(value, schema, path)
        return (True, "") if okay else (False, where or ".")
    if isinstance(schema, dict):
        if not isinstance(value, dict):
            return (False, path or ".")
        for key, sub in schema.items():
            if key not in value:
                return (False, f"{path}.{key}")
            okay, where = conforms_to_return_schema(value[key], sub, f"{path}.{key}")
            if not okay:
                return (False, where)
        return (True, "")
    return (False, path or ".")


# ---------------------------------------------------------------------------
# Parsing


def _build_spec(data: dict[str, Any]) -> ToolSpec:
    name = data.get("name")
    if not isinstance(name, str) or not name:
        raise spec_invalid("missing or empty tool name", detail="name")
    if len(name) > MAX_NAME_LEN or not NAME_RE.match(name):
        raise spec_invalid(f"invalid tool name {name!r}", detail="name")
    description = data.get("description")
    if not isinstance(description, str):
        raise spec_invalid("missing description", detail="description")

    raw_params: Any
    extra: dict[str, Any] = {}
    if "parameter" in data and "parameters" not in data:
        # Nested JSON-schema-style form: {"type": "object", "properties": {...}, "required": [...]}
        block = data["parameter"]
        if not isinstance(block, dict) or block.get("type") != "object":
            raise spec_invalid("parameter block must be an object schema", detail="parameter")
        props = block.get("properties", {})
        if not isinstance(props, dict):
            raise spec_invalid("parameter.properties must be an object", detail="parameter.properties")
        required = block.get("required", [])
        raw_params = [
            {
                "name": pname,
                "type": pdef.get("type"),
                "description": pdef.get("description", ""),
                "required": pname in required,
            }
            for pname, pdef in props.items()
        ]
    else:
        raw_params = data.get("parameters", [])

    if not isinstance(raw_params, list):
        raise spec_invalid("parameters must be a list", detail="parameters")
    params: list[ParameterSpec] = []
    seen: set[str] = set()
    for i, raw in enumerate(raw_params):
        where = f"parameters[{i}]"
        if not isinstance(raw, dict):
            raise spec_invalid("parameter entry must be an object", detail=where)
        pname = raw.get("name")
        if not isinstance(pname, str) or not pname:
            raise spec_invalid("parameter name missing", detail=f"{where}.name")
        if pname in seen:
            raise spec_invalid(f"duplicate parameter name {pname!r}", detail=f"{where}.name")
        seen.add(pname)
        ptype = raw.get("type")
        if not isinstance(ptype, str) or not is_valid_type(ptype):
            raise spec_invalid(f"invalid parameter type {ptype!r}", detail=f"{where}.type")
        required = raw.get("required", False)
        if not isinstance(required, bool):
            raise spec_invalid("required must be boolean", detail=f"{where}.required")
        params.append(
            ParameterSpec(
                name=pname,
                type=ptype,
                description=str(raw.get("description", "")),
                required=required,
            )
        )

    return_schema = data.get("return_schema")
    validate_return_schema(return_schema, "return_schema")

    tags = data.get("tags", [])
    if not (isinstance(tags, list) and all(isinstance(t, str) for t in tags)):
        raise spec_invalid("tags must be a list of strings", detail="tags")

    settings = data.get("settings", {})
    if not isinstance(settings, dict):
        raise spec_invalid("settings must be an object", detail="settings")
    settings = dict(settings)
    known = {"name", "description", "parameters", "parameter", "return_schema", "tags", "settings"}
    for key, value in data.items():
        if key not in known:
            extra[key] = value
    if extra:
        settings.update(extra)

    return ToolSpec(
        name=name,
        description=description,
        parameters=tuple(params),
        return_schema=return_schema,
        tags=tuple(tags),
        settings=settings,
    )


def spec_from_dict(data: dict[str, Any]) -> ToolSpec:
    if not isinstance(data, dict):
        raise spec_invalid("spec document must be a JSON object")
    return _build_spec(data)


def parse_tool_spec(text: str) -> ToolSpec:
    """Parse and validate a serialized spec document (UTF-8 JSON)."""
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise spec_invalid(f"spec document is not valid JSON: {exc}") from exc
    return spec_from_dict(data)


def serialize_tool_spec(spec: ToolSpec) -> str:
    return canonical_json(spec.to_dict())


def call_from_dict(data: Any) -> ToolCall:
    if not isinstance(data, dict):
        raise spec_invalid("tool call must be a JSON object")
    keys = set(data.keys())
    if keys != {"name", "arguments"}:
        raise spec_invalid(f"tool call must have exactly the keys name/arguments, got {sorted(keys)}")
    name = data["name"]
    arguments = data["arguments"]
    if not isinstance(name, str) or not name:
        raise spec_invalid("tool call name must be a non-empty string")
    if not isinstance(arguments, dict):
        raise spec_invalid("tool call arguments must be an object")
    return ToolCall(name=name, arguments=arguments)


def parse_tool_call(text: str) -> ToolCall:
    """Parse the single serialized invocation form ``{"name":..., "arguments":...}``."""
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise spec_invalid(f"tool call is not valid JSON: {exc}") from exc
    return call_from_dict(data)


def _type_name(value: Any) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, int):
        return "integer"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    return type(value).__name__


def validate_arguments(call: ToolCall, spec: ToolSpec) -> dict[str, Any]:
    """Check a call against a spec; returns the argument map unchanged on success.

    No defaulting and no coercion: optional parameters stay absent and
    ``"3"`` is not an integer.
    """
    params = {p.name: p for p in spec.parameters}
    missing = [p.name for p in spec.parameters if p.required and p.name not in call.arguments]
    if missing:
        raise ToolError(
            MISSING_REQUIRED,
            f"missing required argument(s): {', '.join(missing)}",
            detail=missing,
        )
    for key in call.arguments:
        if key not in params:
            raise ToolError(UNKNOWN_ARGUMENT, f"unknown argument {key!r}", detail=key)
    for key in sorted(call.arguments):
        expected = params[key].type
        okay, _ = _value_matches_type(call.arguments[key], expected, key)
        if not okay:
            got = _type_name(call.arguments[key])
            raise ToolError(
                TYPE_MISMATCH,
                f"argument {key!r} expected {expected}, got {got}",
                detail={"param": key, "expected": expected, "got": got},
            )
    return dict(call.arguments)
