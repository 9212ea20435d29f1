"""Tool composer: sequential chains, parallel broadcast, agentic loops.

A composite is described by a serializable plan (its own ToolSpec plus a list
of steps) and registered as a first-class tool: finding, calling, optimizing
and wire serving treat it like any local tool.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .agentic import AgentConfig, BackendRegistry, run_agentic_generation
from .caller import ToolCaller
from .errors import EXECUTION_FAILED, ToolError, spec_invalid
from .protocol import ToolCall, ToolResult, ok_result, spec_from_dict, ToolSpec
from .registry import Registry
from .templating import extract_path, render_template, template_variables

STOP_CALL = "__stop__"
DEFAULT_PARALLEL_WIDTH = 8


@dataclass
class StepRecord:
    index: int
    tool: str
    arguments: Any
    status: str
    duration_ms: float


@dataclass
class CompositeTrace:
    records: list[StepRecord] = field(default_factory=list)

    def to_list(self) -> list[dict[str, Any]]:
        return [
            {
                "index": r.index,
                "tool": r.tool,
                "arguments": r.arguments,
                "status": r.status,
                "duration_ms": r.duration_ms,
            }
            for r in self.records
        ]


@dataclass(frozen=True)
class CompositePlan:
    spec: ToolSpec
    steps: tuple[Mapping[str, Any], ...]

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CompositePlan":
        if "spec" not in data or "steps" not in data:
            raise spec_invalid("composite plan needs 'spec' and 'steps'")
        spec = spec_from_dict(dict(data["spec"]))
        steps = data["steps"]
        if not isinstance(steps, list) or not steps:
            raise spec_invalid("composite plan steps must be a non-empty list")
        return cls(spec=spec, steps=tuple(steps))

    @classmethod
    def parse(cls, text: str) -> "CompositePlan":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise spec_invalid(f"composite plan is not valid JSON: {exc}") from exc


def execute_parallel(
    caller: ToolCaller,
    calls: Sequence[tuple[str, Mapping[str, Any]]],
    width: int = DEFAULT_PARALLEL_WIDTH,
) -> list[ToolResult]:
    """Run branches concurrently; results in declaration order, collect-all."""
    if not calls:
        raise spec_invalid("parallel step needs at least one call")
    with ThreadPoolExecutor(max_workers=min(width, len(calls))) as pool:
        futures = [pool.submit(caller.call_tool, ToolCall(name, dict(args))) for name, args in calls]
        return [f.result() for f in futures]


def execute_loop(
    agent_config: AgentConfig,
    backends: BackendRegistry,
    caller: ToolCaller,
    max_iterations: int,
    initial_context: Any = None,
) -> ToolResult:
    """Feedback-driven loop: the agent emits the next tool call from the
    accumulated trace; a distinguished ``__stop__`` call ends the loop and its
    arguments become the final payload."""
    if max_iterations < 1:
        raise spec_invalid("max_iterations must be >= 1")
    if agent_config.output_contract != "tool-call":
        raise spec_invalid("loop agent must use the tool-call output contract")
    trace = CompositeTrace()
    history: list[dict[str, Any]] = []
    if initial_context is not None:
        history.append({"context": initial_context})
    final_payload: Any = None
    for iteration in range(max_iterations):
        context = json.dumps(history, sort_keys=True)
        output = run_agentic_generation(agent_config, {}, backends, context=context)
        name, arguments = output["name"], output["arguments"]
        if name == STOP_CALL:
            final_payload = arguments
            trace.records.append(StepRecord(iteration, STOP_CALL, arguments, "ok", 0.0))
            break
        result = caller.call_tool(ToolCall(name, arguments))
        trace.records.append(
            StepRecord(iteration, name, arguments, result.status, result.duration_ms)
        )
        history.append(
            {
                "call": {"name": name, "arguments": arguments},
                "result": result.to_dict(),
            }
        )
    else:
        final_payload = history[-1]["result"].get("payload") if history else None
    return ok_result({"result": final_payload, "trace": trace.to_list()})


class CompositeHandler:
    """Executable body of a registered composite."""

    def __init__(self, plan: CompositePlan, composer: "Composer"):
        self.plan = plan
        self.composer = composer

    def run(self, arguments: Mapping[str, Any]) -> Any:
        return self.composer.execute_plan(self.plan, arguments)


class Composer:
    def __init__(
        self,
        registry: Registry,
        caller: ToolCaller,
        backends: BackendRegistry | None = None,
        parallel_width: int = DEFAULT_PARALLEL_WIDTH,
    ):
        self.registry = registry
        self.caller = caller
        self.backends = backends or BackendRegistry()
        self.parallel_width = parallel_width

    # -- registration -----------------------------------------------------------

    def compose(self, plan: CompositePlan) -> str:
        """Validate a plan against the current registry and register it."""
        self._validate_plan(plan)
        handler = CompositeHandler(plan, self)
        return self.registry.register_local(plan.spec, handler, origin="composed")

    def _validate_plan(self, plan: CompositePlan) -> None:
        bound = {p.name for p in plan.spec.parameters}
        for i, step in enumerate(plan.steps):
            where = f"steps[{i}]"
            if "call" in step:
                self._check_call(step["call"], step.get("args", {}), bound, where)
                bound |= set((step.get("bind") or {}).keys())
            elif "parallel" in step:
                branches = step["parallel"]
                if not isinstance(branches, list) or not branches:
                    raise spec_invalid(f"{where}.parallel must be a non-empty list")
                for j, branch in enumerate(branches):
                    self._check_call(
                        branch.get("call"), branch.get("args", {}), bound, f"{where}.parallel[{j}]"
                    )
            elif "loop" in step:
                loop = step["loop"]
                if int(loop.get("max_iterations", 0)) < 1:
                    raise spec_invalid(f"{where}.loop.max_iterations must be >= 1")
                AgentConfig.from_dict(loop["agent"])
            elif "bind" in step:
                bound |= set(step["bind"].keys())
            else:
                raise spec_invalid(f"{where}: unknown step kind {sorted(step)}")

    def _check_call(self, tool: Any, args: Any, bound: set[str], where: str) -> None:
        if not isinstance(tool, str) or tool not in self.registry:
            raise spec_invalid(f"{where}: unknown tool reference {tool!r}")
        unbound = template_variables(args) - bound
        if unbound:
            raise spec_invalid(f"{where}: unbound variable(s) {sorted(unbound)} in argument template")

    # -- execution --------------------------------------------------------------

    def execute_plan(self, plan: CompositePlan, arguments: Mapping[str, Any]) -> Any:
        variables: dict[str, Any] = dict(arguments)
        last_payload: Any = None
        for step in plan.steps:
            if "call" in step:
                args = render_template(step.get("args", {}), variables)
                result = self.caller.call_tool(ToolCall(step["call"], args))
                if not result.ok:
                    raise result.error  # propagate branch failure up the chain
                last_payload = result.payload
                for var, path in (step.get("bind") or {}).items():
                    variables[var] = extract_path(last_payload, path)
            elif "parallel" in step:
                calls = [
                    (branch["call"], render_template(branch.get("args", {}), variables))
                    for branch in step["parallel"]
                ]
                results = execute_parallel(self.caller, calls, self.parallel_width)
                last_payload = {"results": [r.to_dict() for r in results]}
            elif "loop" in step:
                loop = step["loop"]
                config = AgentConfig.from_dict(loop["agent"])
                result = execute_loop(
                    config,
                    self.backends,
                    self.caller,
                    int(loop["max_iterations"]),
                    initial_context=render_template(loop.get("context"), variables)
                    if loop.get("context") is not None
                    else None,
                )
                if not result.ok:
                    raise result.error
                last_payload = result.payload
                for var, path in (loop.get("bind") or {}).items():
                    variables[var] = extract_path(last_payload, path)
            elif "bind" in step:
                for var, path in step["bind"].items():
                    variables[var] = extract_path(last_payload, path)
        return last_payload
