"""Agent backends and agentic tools.

An agentic tool is a prompt template plus a text-generation backend. All
backends sit behind the same ``generate(prompt, settings) -> text`` contract;
the MockBackend is fully deterministic and is what every automated test uses.
"""

from __future__ import annotations

import json
import string
import threading
from dataclasses import dataclass, field
from typing import Any, Mapping, Protocol, Sequence

from .errors import EXECUTION_FAILED, ToolError, spec_invalid
from .finder.keyword import ToolMatch
from .protocol import ParameterSpec, ToolCall, ToolSpec, parse_tool_call

OUTPUT_CONTRACTS = ("free-text", "tool-call", "scored-report")


class AgentBackend(Protocol):
    identity: str
    max_concurrency: int

    def generate(self, prompt: str, settings: Mapping[str, Any] | None = None) -> str: ...


class MockBackend:
    """Script-table backend: ordered (substring, response) rules with an
    ordered fallback chain. Same prompt always yields the same text, except
    that fallbacks are consumed in order when no rule matches."""

    def __init__(
        self,
        rules: Sequence[tuple[str, str]] = (),
        fallbacks: Sequence[str] = (),
        identity: str = "mock",
        max_concurrency: int = 8,
    ):
        self.rules = list(rules)
        self._fallbacks = list(fallbacks)
        self._fallback_idx = 0
        self.identity = identity
        self.max_concurrency = max_concurrency
        self.prompts: list[str] = []
        self._lock = threading.Lock()

    def generate(self, prompt: str, settings: Mapping[str, Any] | None = None) -> str:
        with self._lock:
            self.prompts.append(prompt)
            for needle, response in self.rules:
                if needle in prompt:
                    return response
            if self._fallbacks:
                response = self._fallbacks[min(self._fallback_idx, len(self._fallbacks) - 1)]
                self._fallback_idx += 1
                return response
        raise ToolError(EXECUTION_FAILED, "mock backend has no scripted response for this prompt")


class BackendRegistry:
    """Named backends plus per-backend admission gates."""

    def __init__(self) -> None:
        self._backends: dict[str, AgentBackend] = {}
        self._gates: dict[str, threading.Semaphore] = {}

    def register(self, backend: AgentBackend) -> None:
        self._backends[backend.identity] = backend
        self._gates[backend.identity] = threading.Semaphore(backend.max_concurrency)

    def get(self, backend_id: str) -> AgentBackend:
        if backend_id not in self._backends:
            raise ToolError(EXECUTION_FAILED, f"no agent backend named {backend_id!r} is configured")
        return self._backends[backend_id]

    def generate(self, backend_id: str, prompt: str, settings: Mapping[str, Any] | None = None) -> str:
        backend = self.get(backend_id)
        with self._gates[backend_id]:
            return backend.generate(prompt, settings)


@dataclass(frozen=True)
class AgentConfig:
    prompt_template: str
    input_parameters: tuple[ParameterSpec, ...] = ()
    output_contract: str = "free-text"
    backend: str = "mock"
    generation_settings: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.output_contract not in OUTPUT_CONTRACTS:
            raise spec_invalid(f"unknown output contract {self.output_contract!r}")
        allowed = {p.name for p in self.input_parameters} | {"context"}
        for placeholder in template_placeholders(self.prompt_template):
            if placeholder not in allowed:
                raise spec_invalid(f"prompt placeholder {{{placeholder}}} names no input parameter")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "AgentConfig":
        params = tuple(
            ParameterSpec(
                name=p["name"],
                type=p.get("type", "string"),
                description=p.get("description", ""),
                required=p.get("required", False),
            )
            for p in data.get("input_parameters", [])
        )
        return cls(
            prompt_template=data["prompt_template"],
            input_parameters=params,
            output_contract=data.get("output_contract", "free-text"),
            backend=data.get("backend", "mock"),
            generation_settings=data.get("generation_settings", {}),
        )


def template_placeholders(template: str) -> set[str]:
    names = set()
    for _, name, _, _ in string.Formatter().parse(template):
        if name:
            names.add(name)
    return names


def render_prompt(config: AgentConfig, args: Mapping[str, Any], context: str = "") -> str:
    values = {"context": context, **args}
    try:
        return config.prompt_template.format(**values)
    except KeyError as exc:
        raise spec_invalid(f"prompt placeholder {exc} is unbound") from exc


def parse_agent_output(text: str, contract: str) -> Any:
    if contract == "free-text":
        return {"text": text}
    if contract == "tool-call":
        return parse_tool_call(text).to_dict()
    if contract == "scored-report":
        try:
            report = json.loads(text)
        except json.JSONDecodeError as exc:
            raise spec_invalid(f"scored report is not valid JSON: {exc}") from exc
        if not isinstance(report, dict) or "scores" not in report:
            raise spec_invalid("scored report must be an object with a 'scores' map")
        return report
    raise spec_invalid(f"unknown output contract {contract!r}")


def run_agentic_generation(
    config: AgentConfig,
    args: Mapping[str, Any],
    backends: BackendRegistry,
    context: str = "",
) -> Any:
    """Render + generate + parse, retrying once with the parse error appended."""
    prompt = render_prompt(config, args, context)
    text = backends.generate(config.backend, prompt, config.generation_settings)
    try:
        return parse_agent_output(text, config.output_contract)
    except ToolError as first:
        retry_prompt = f"{prompt}\n\nYour previous output failed to parse: {first.message}"
        text = backends.generate(config.backend, retry_prompt, config.generation_settings)
        try:
            return parse_agent_output(text, config.output_contract)
        except ToolError as second:
            raise ToolError(
                EXECUTION_FAILED,
                f"agent output failed to parse twice: {second.message}",
            ) from second


class AgenticToolHandler:
    """Registry handler whose execution is prompt + backend."""

    def __init__(self, config: AgentConfig, backends: BackendRegistry):
        self.config = config
        self.backends = backends

    def run(self, arguments: Mapping[str, Any]) -> Any:
        return run_agentic_generation(self.config, arguments, self.backends)


def agentic_tool_spec(name: str, description: str, config: AgentConfig, tags: tuple[str, ...] = ()) -> ToolSpec:
    return ToolSpec(
        name=name,
        description=description,
        parameters=config.input_parameters,
        return_schema=None,
        tags=tags,
    )


SELECTION_PROMPT = (
    "Task description: {query}\n"
    "Candidate tools:\n{candidates}\n"
    "Reply with the names of the relevant tools, one per line, most relevant first."
)


def agentic_find(
    query: str,
    candidates: Sequence[ToolSpec],
    backends: BackendRegistry,
    backend_id: str = "mock",
) -> tuple[list[ToolMatch], list[str]]:
    """In-context tool selection over a bounded candidate set.

    Returns (matches, dropped) where dropped lists names the agent produced
    that are not in the candidate set.
    """
    if not candidates:
        raise ToolError(EXECUTION_FAILED, "agentic find requires a non-empty candidate set")
    listing = "\n".join(f"- {spec.name}: {spec.description}" for spec in candidates)
    prompt = SELECTION_PROMPT.format(query=query, candidates=listing)
    text = backends.generate(backend_id, prompt)

    candidate_names = {spec.name for spec in candidates}
    picked: list[str] = []
    dropped: list[str] = []
    for line in text.replace(",", "\n").splitlines():
        name = line.strip().lstrip("-").strip()
        if not name:
            continue
        if name in candidate_names and name not in picked:
            picked.append(name)
        elif name not in candidate_names:
            dropped.append(name)
    matches = [
        ToolMatch(tool_name=name, score=1.0 / (1 + rank), strategy="agentic")
        for rank, name in enumerate(picked)
    ]
    return matches, dropped


def iteration_call_from_text(text: str) -> ToolCall:
    return parse_tool_call(text)
