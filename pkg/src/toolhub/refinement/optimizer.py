"""Multi-round spec optimization.

Each round: generate test cases (feedback-adaptive after round one), execute
them, propose a better tool description and parameter descriptions, score the
candidate, and stop at the satisfaction threshold (default 8.0/10) or the
round cap (default 3). The best-scoring spec seen wins.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

from ..agentic import BackendRegistry
from ..caller import ToolCaller
from ..errors import EXECUTION_FAILED, ToolError, spec_invalid
from ..protocol import ParameterSpec, ToolCall, ToolResult, ToolSpec
from .quality import (
    OPTIMIZER_DIMENSIONS,
    QualityReport,
    make_report,
    normalize_sentences,
    shared_sentences,
)

DEFAULT_THRESHOLD = 8.0
DEFAULT_MAX_ROUNDS = 3

_SAMPLES: dict[str, Any] = {
    "string": "sample text",
    "integer": 7,
    "number": 2.5,
    "boolean": True,
    "object": {"key": "value"},
}

_WRONG_TYPE: dict[str, Any] = {
    "string": 123,
    "integer": "not an integer",
    "number": "not a number",
    "boolean": "not a boolean",
    "object": "not an object",
}


def sample_value(type_str: str) -> Any:
    if type_str in _SAMPLES:
        return _SAMPLES[type_str]
    if type_str.startswith("array<"):
        return [sample_value(type_str[6:-1])]
    return None


def wrong_value(type_str: str) -> Any:
    if type_str in _WRONG_TYPE:
        return _WRONG_TYPE[type_str]
    return {"not": "an array"}


@dataclass
class TestBatch:
    cases: list[ToolCall]
    provenance: str = "initial"
    results: list[ToolResult] | None = None

    def executed(self) -> "TestBatch":
        if self.results is None:
            raise spec_invalid("test batch has not been executed")
        return self


@dataclass(frozen=True)
class Proposal:
    text: str
    low_confidence: bool = False


@dataclass
class OptimizationOutcome:
    original: ToolSpec
    optimized: ToolSpec
    rounds_used: int
    reports: list[QualityReport]
    terminated_by: str  # threshold | max-rounds
    partial_error: ToolError | None = None


def generate_test_cases(spec: ToolSpec, feedback: QualityReport | None = None) -> TestBatch:
    """Deterministic coverage batch: every required parameter exercised, each
    optional parameter present and absent, one invalid case per parameter,
    plus boundary cases targeting dimensions flagged in the feedback."""
    cases: list[dict[str, Any]] = []
    required = [p for p in spec.parameters if p.required]
    optional = [p for p in spec.parameters if not p.required]
    full_args = {p.name: sample_value(p.type) for p in spec.parameters}

    if spec.parameters:
        cases.append(full_args)
        cases.append({p.name: sample_value(p.type) for p in required})
        for opt in optional:
            present = {p.name: sample_value(p.type) for p in required}
            present[opt.name] = sample_value(opt.type)
            cases.append(present)
        if required:
            dropped = dict(full_args)
            del dropped[required[0].name]
            cases.append(dropped)  # MissingRequired probe
        for param in spec.parameters:
            bad = dict(full_args)
            bad[param.name] = wrong_value(param.type)
            cases.append(bad)
    else:
        cases.append({})
    cases.append({**full_args, "unexpected_argument": 1})  # UnknownArgument probe

    if feedback is not None:
        flagged = {dim for dim, score in feedback.scores.items() if score < DEFAULT_THRESHOLD}
        if "accuracy" in flagged:
            for param in spec.parameters:
                if param.type in ("integer", "number"):
                    for boundary in (0, -1):
                        case = dict(full_args)
                        case[param.name] = boundary
                        cases.append(case)

    # Pad with per-parameter singleton probes until the floor of 5 is met.
    for param in spec.parameters:
        if len(cases) >= 5:
            break
        cases.append({param.name: sample_value(param.type)})
    while len(cases) < 5:
        cases.append({"probe_" + str(len(cases)): len(cases)})

    deduped: list[ToolCall] = []
    seen: set[str] = set()
    for args in cases:
        call = ToolCall(spec.name, args)
        key = call.serialize()
        if key not in seen:
            seen.add(key)
            deduped.append(call)
    provenance = "initial" if feedback is None else f"feedback-round-{feedback.round}"
    return TestBatch(cases=deduped, provenance=provenance)


def execute_batch(caller: ToolCaller, batch: TestBatch) -> TestBatch:
    batch.results = [caller.call_tool(case) for case in batch.cases]
    return batch


def _batch_summary(batch: TestBatch) -> str:
    lines = []
    for case, result in zip(batch.cases, batch.executed().results or []):
        lines.append(
            json.dumps(
                {"arguments": dict(case.arguments), "result": result.to_dict()}, sort_keys=True
            )
        )
    return "\n".join(lines)


def analyze_description(
    spec: ToolSpec,
    batch: TestBatch,
    backends: BackendRegistry,
    backend_id: str = "mock",
) -> Proposal:
    """Propose a revised tool description grounded in observed behavior."""
    results = batch.executed().results or []
    if not results:
        raise spec_invalid("analyze_description requires a non-empty executed batch")
    prompt = (
        f"Revise the description of tool {spec.name!r}.\n"
        f"Current description: {spec.description}\n"
        f"Observed executions:\n{_batch_summary(batch)}\n"
        "Reply with the improved description only."
    )
    text = backends.generate(backend_id, prompt).strip()
    if not text:
        raise ToolError(EXECUTION_FAILED, "description analysis produced empty text")
    all_errors = all(not r.ok for r in results)
    return Proposal(text=text, low_confidence=all_errors)


def optimize_argument_descriptions(
    spec: ToolSpec,
    batch: TestBatch,
    backends: BackendRegistry,
    backend_id: str = "mock",
) -> dict[str, str]:
    """Per-parameter revised descriptions with tool/parameter redundancy removed."""
    batch.executed()
    proposals: dict[str, str] = {}
    for param in spec.parameters:
        prompt = (
            f"Revise the description of parameter {param.name!r} of tool {spec.name!r}.\n"
            f"Current parameter description: {param.description}\n"
            f"Tool description: {spec.description}\n"
            "Reply with the improved parameter description only."
        )
        text = backends.generate(backend_id, prompt).strip()
        proposals[param.name] = strip_redundant_sentences(spec.description, text)
    return proposals


def strip_redundant_sentences(tool_description: str, parameter_description: str) -> str:
    """Drop any sentence duplicated verbatim (normalized) from the tool description."""
    duplicated = shared_sentences(tool_description, parameter_description)
    if not duplicated:
        return parameter_description
    kept = [
        raw.strip()
        for raw in parameter_description.replace("!", ".").replace("?", ".").split(".")
        if raw.strip() and " ".join(raw.lower().split()) not in duplicated
    ]
    return ". ".join(kept) + ("." if kept else "")


def rubric_evaluate(
    spec: ToolSpec, batch: TestBatch, round_index: int = 0
) -> QualityReport:
    """Rule-based scoring rubric; every deduction is derivable by hand.

    Deductions: -2 redundancy-avoidance per sentence shared between tool and
    parameter descriptions, -3 completeness when the tool description is
    under 20 characters, -2 clarity per parameter without a description.
    """
    scores = {dim: 10.0 for dim in OPTIMIZER_DIMENSIONS}
    rationale: dict[str, str] = {}

    duplicates = 0
    for param in spec.parameters:
        duplicates += len(shared_sentences(spec.description, param.description))
    if duplicates:
        scores["redundancy-avoidance"] -= 2.0 * duplicates
        rationale["redundancy-avoidance"] = f"{duplicates} duplicated sentence(s)"

    if len(spec.description) < 20:
        scores["completeness"] -= 3.0
        rationale["completeness"] = "tool description under 20 characters"

    undocumented = sum(1 for p in spec.parameters if not p.description)
    if undocumented:
        scores["clarity"] -= 2.0 * undocumented
        rationale["clarity"] = f"{undocumented} parameter(s) without description"

    return make_report(scores, OPTIMIZER_DIMENSIONS, round_index, rationale)


Evaluator = Callable[[ToolSpec, TestBatch, int], QualityReport]


def _revised_spec(
    spec: ToolSpec, description: str, param_descriptions: Mapping[str, str]
) -> ToolSpec:
    params = tuple(
        ParameterSpec(
            name=p.name,
            type=p.type,
            description=strip_redundant_sentences(
                description, param_descriptions.get(p.name, p.description)
            ),
            required=p.required,
        )
        for p in spec.parameters
    )
    return ToolSpec(
        name=spec.name,
        description=description,
        parameters=params,
        return_schema=spec.return_schema,
        tags=spec.tags,
        settings=spec.settings,
    )


def optimize_tool(
    caller: ToolCaller,
    spec: ToolSpec,
    backends: BackendRegistry,
    threshold: float = DEFAULT_THRESHOLD,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    evaluator: Evaluator | None = None,
    backend_id: str = "mock",
) -> OptimizationOutcome:
    evaluate = evaluator or rubric_evaluate
    reports: list[QualityReport] = []
    best_spec = spec
    best_score = float("-inf")
    current = spec
    feedback: QualityReport | None = None
    rounds_used = 0
    terminated_by = "max-rounds"

    for round_index in range(1, max_rounds + 1):
        rounds_used = round_index
        try:
            batch = execute_batch(caller, generate_test_cases(current, feedback))
            description = analyze_description(current, batch, backends, backend_id).text
            param_descriptions = optimize_argument_descriptions(
                current, batch, backends, backend_id
            )
            candidate = _revised_spec(current, description, param_descriptions)
            report = evaluate(candidate, batch, round_index)
        except ToolError as exc:
            return OptimizationOutcome(
                original=spec,
                optimized=best_spec if best_score > float("-inf") else spec,
                rounds_used=rounds_used,
                reports=reports,
                terminated_by="max-rounds",
                partial_error=exc,
            )
        reports.append(report)
        if report.overall > best_score:
            best_score = report.overall
            best_spec = candidate
        if report.overall >= threshold:
            terminated_by = "threshold"
            break
        current = candidate
        feedback = report

    return OptimizationOutcome(
        original=spec,
        optimized=best_spec,
        rounds_used=rounds_used,
        reports=reports,
        terminated_by=terminated_by,
    )
