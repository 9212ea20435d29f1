"""Tool ecosystem runtime: registry, search, calling, composition, remote
serving, refinement, and a human feedback loop."""

from .agentic import AgentConfig, AgenticToolHandler, BackendRegistry, MockBackend, agentic_find
from .caller import CacheConfig, ToolCaller
from .composer import Composer, CompositePlan
from .errors import ToolError
from .finder import Finder
from .hub import ToolHub
from .protocol import (
    ParameterSpec,
    ToolCall,
    ToolResult,
    ToolSpec,
    canonical_json,
    error_result,
    ok_result,
    parse_tool_call,
    parse_tool_spec,
    serialize_tool_spec,
    validate_arguments,
)
from .registry import Registry, ToolEntry

__version__ = "0.1.0"

__all__ = [
    "AgentConfig",
    "AgenticToolHandler",
    "BackendRegistry",
    "CacheConfig",
    "Composer",
    "CompositePlan",
    "Finder",
    "MockBackend",
    "ParameterSpec",
    "Registry",
    "ToolCall",
    "ToolCaller",
    "ToolEntry",
    "ToolError",
    "ToolHub",
    "ToolResult",
    "ToolSpec",
    "agentic_find",
    "canonical_json",
    "error_result",
    "ok_result",
    "parse_tool_call",
    "parse_tool_spec",
    "serialize_tool_spec",
    "validate_arguments",
    "__version__",
]
