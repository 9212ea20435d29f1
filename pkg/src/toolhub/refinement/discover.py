"""Tool generation pipeline: discovery, specification, implementation, evaluation.

The generated implementation is a declarative handler program (see
``toolhub.programs``), so candidates are executable and testable without
running arbitrary native code. Acceptance requires a weighted five-dimension
score of at least 9.0/10 within the round cap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from ..agentic import BackendRegistry
from ..caller import ToolCaller
from ..errors import EXECUTION_FAILED, MISSING_REQUIRED, TYPE_MISMATCH, UNKNOWN_ARGUMENT, ToolError
from ..finder import Finder
from ..programs import ProgramHandler, program_variables, validate_program
from ..protocol import ToolSpec, spec_from_dict
from ..registry import Registry
from .optimizer import execute_batch, generate_test_cases, TestBatch
from .quality import DISCOVER_DIMENSIONS, QualityReport, make_report

DEFAULT_TARGET = 9.0
DEFAULT_MAX_ROUNDS = 3

VALIDATION_CODES = (MISSING_REQUIRED, UNKNOWN_ARGUMENT, TYPE_MISMATCH)


@dataclass
class ToolPackage:
    spec: ToolSpec
    implementation: dict[str, Any]  # declarative handler program
    dependencies: list[str] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)
    quality: QualityReport | None = None

    def write(self, directory: str | Path) -> Path:
        """Package layout: config.json (spec + metadata + quality),
        implementation.json, dependencies.txt, and a manifest.json so the
        package directory loads directly via Registry.load_manifest."""
        base = Path(directory) / self.spec.name
        base.mkdir(parents=True, exist_ok=True)
        config = {
            "spec": self.spec.to_dict(),
            "metadata": self.metadata,
            "quality": self.quality.to_dict() if self.quality else None,
        }
        (base / "config.json").write_text(json.dumps(config, indent=2, sort_keys=True) + "\n")
        (base / "implementation.json").write_text(
            json.dumps(self.implementation, indent=2, sort_keys=True) + "\n"
        )
        (base / "dependencies.txt").write_text("\n".join(self.dependencies) + "\n")
        manifest = {
            "tools": [
                {
                    "spec": self.spec.to_dict(),
                    "handler": {"type": "program", "file": "implementation.json"},
                    "origin": "generated",
                }
            ]
        }
        (base / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        return base


def _stage_failed(stage: str, message: str) -> ToolError:
    return ToolError(EXECUTION_FAILED, message, detail={"stage": stage})


def _generate_spec(
    backends: BackendRegistry, backend_id: str, description: str, references: Sequence[str]
) -> ToolSpec:
    prompt = (
        f"Write a complete tool specification (JSON) for: {description}\n"
        f"Reference tools with similar functionality: {', '.join(references) or 'none'}\n"
        "Reply with the specification JSON only."
    )
    last_error = ""
    for attempt in range(2):
        text = backends.generate(backend_id, prompt if attempt == 0 else f"{prompt}\nPrevious attempt failed: {last_error}")
        try:
            return spec_from_dict(json.loads(text))
        except (json.JSONDecodeError, ToolError) as exc:
            last_error = str(exc)
    raise _stage_failed("specification", f"spec generation failed twice: {last_error}")


def _generate_implementation(
    backends: BackendRegistry, backend_id: str, spec: ToolSpec
) -> dict[str, Any]:
    prompt = (
        f"Write the handler program (JSON with a 'returns' template) for tool {spec.name!r}.\n"
        f"Specification: {json.dumps(spec.to_dict(), sort_keys=True)}\n"
        "Reply with the program JSON only."
    )
    param_names = {p.name for p in spec.parameters}
    last_error = ""
    for attempt in range(2):
        text = backends.generate(backend_id, prompt if attempt == 0 else f"{prompt}\nPrevious attempt failed: {last_error}")
        try:
            program = json.loads(text)
            validate_program(program)
            unbound = program_variables(program) - param_names
            if unbound:
                raise ToolError(
                    EXECUTION_FAILED, f"program references unknown parameters {sorted(unbound)}"
                )
            return program
        except (json.JSONDecodeError, ToolError) as exc:
            last_error = str(exc)
    raise _stage_failed("implementation", f"implementation generation failed twice: {last_error}")


def _case_is_valid(case_args: dict[str, Any], spec: ToolSpec) -> bool:
    from ..protocol import ToolCall, validate_arguments

    try:
        validate_arguments(ToolCall(spec.name, case_args), spec)
        return True
    except ToolError:
        return False


def evaluate_candidate(spec: ToolSpec, program: dict[str, Any], round_index: int) -> tuple[QualityReport, TestBatch]:
    """Static checks plus dynamic testing of the candidate in a scratch registry."""
    registry = Registry()
    registry.register_local(spec, ProgramHandler(program), origin="generated")
    caller = ToolCaller(registry)
    batch = execute_batch(caller, generate_test_cases(spec))
    results = batch.results or []

    consistent = 0
    crashes = 0
    for case, result in zip(batch.cases, results):
        valid = _case_is_valid(dict(case.arguments), spec)
        if valid:
            if result.ok:
                consistent += 1
            elif result.error and result.error.code == EXECUTION_FAILED:
                crashes += 1
        else:
            if not result.ok and result.error and result.error.code in VALIDATION_CODES:
                consistent += 1

    n = max(1, len(results))
    functionality = 10.0 * consistent / n
    reliability = 10.0 - 5.0 * crashes
    maintainability = 10.0
    if len(spec.description) < 20:
        maintainability -= 3.0
    maintainability -= 2.0 * sum(1 for p in spec.parameters if not p.description)
    durations = [r.duration_ms for r in results]
    performance = 10.0 if (sum(durations) / n) < 100.0 else 5.0
    if spec.parameters:
        covered = {
            p.name
            for p in spec.parameters
            if any(p.name in case.arguments for case in batch.cases)
        }
        test_coverage = 10.0 * len(covered) / len(spec.parameters)
    else:
        test_coverage = 10.0

    report = make_report(
        {
            "functionality": functionality,
            "reliability": reliability,
            "maintainability": maintainability,
            "performance": performance,
            "test-coverage": test_coverage,
        },
        DISCOVER_DIMENSIONS,
        round_index,
    )
    return report, batch


def discover_tool(
    description: str,
    finder: Finder,
    backends: BackendRegistry,
    target: float = DEFAULT_TARGET,
    max_rounds: int = DEFAULT_MAX_ROUNDS,
    backend_id: str = "mock",
) -> ToolPackage:
    # Stage 1: discovery — similar existing tools become references.
    seen: set[str] = set()
    references: list[str] = []
    for match in finder.find_tool(description, strategy="auto", limit=5):
        if match.tool_name not in seen:
            seen.add(match.tool_name)
            references.append(match.tool_name)

    best: ToolPackage | None = None
    spec: ToolSpec | None = None
    program: dict[str, Any] | None = None
    for round_index in range(1, max_rounds + 1):
        # Stages 2 and 3 rerun with prior-round feedback appended to references.
        spec = _generate_spec(backends, backend_id, description, references)
        program = _generate_implementation(backends, backend_id, spec)
        report, _ = evaluate_candidate(spec, program, round_index)
        package = ToolPackage(
            spec=spec,
            implementation=program,
            dependencies=[],
            metadata={
                "requirement": description,
                "references": references,
                "rounds": round_index,
            },
            quality=report,
        )
        if best is None or report.overall > (best.quality.overall if best.quality else -1):
            best = package
        if report.overall >= target:
            return package
        references = references + [f"round-{round_index}-score-{report.overall:.2f}"]
    assert best is not None
    return best
