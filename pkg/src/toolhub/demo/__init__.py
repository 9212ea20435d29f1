"""Bundled demo toolpack: ~20 deterministic offline tools plus a workflow
fixture shaped like a target-to-expert discovery pipeline."""

from __future__ import annotations

import dataclasses
from importlib import resources
from typing import Any

from ..agentic import AgentConfig, AgenticToolHandler, BackendRegistry
from ..composer import CompositePlan
from ..expert.tools import ConsultHumanExpert, GetExpertResponse, GetExpertStatus
from ..protocol import ParameterSpec
from ..registry import Registry
from . import handlers
from .handlers import load_fixture

EXPERT_TOOL_NAMES = ("consult_human_expert", "get_expert_response", "get_expert_status")

BUILTIN_HANDLERS: dict[str, Any] = {
    "echo": handlers.Echo,
    "string_stats": handlers.StringStats,
    "range_check": handlers.RangeCheck,
    "arithmetic_eval": handlers.ArithmeticEval,
    "unit_converter": handlers.UnitConverter,
    "sequence_gc_content": handlers.SequenceGcContent,
    "molecular_weight": handlers.MolecularWeight,
    "text_embedding": handlers.TextEmbedding,
    "mock_literature_search": handlers.MockLiteratureSearch,
    "mock_target_profile": handlers.MockTargetProfile,
    "mock_admet_lookup": handlers.MockAdmetLookup,
    "mock_similarity_search": handlers.MockSimilaritySearch,
    "mock_drug_pathways": handlers.MockDrugPathways,
    "mock_gene_details": handlers.MockGeneDetails,
    "mock_compound_properties": handlers.MockCompoundProperties,
    "mock_trial_lookup": handlers.MockTrialLookup,
    "mock_adverse_events": handlers.MockAdverseEvents,
    "mock_disease_targets": handlers.MockDiseaseTargets,
    "assemble_report": handlers.AssembleReport,
    "consult_human_expert": ConsultHumanExpert,
    "get_expert_response": GetExpertResponse,
    "get_expert_status": GetExpertStatus,
}

SUMMARIZER_BACKEND_ID = "demo_summarizer"
SUMMARIZER_PROMPT = "Summarize the following text in one sentence:\n{text}"


class ExtractiveSummaryBackend:
    """Deterministic stand-in for a generative model: answers with the first
    sentence of the text that follows the prompt header."""

    identity = SUMMARIZER_BACKEND_ID
    max_concurrency = 8

    def generate(self, prompt: str, settings: Any = None) -> str:
        text = prompt.split("\n", 1)[1] if "\n" in prompt else prompt
        first = text.split(".")[0].strip()
        return f"{first}." if first else "Nothing to summarize."


def summarizer_handler(backends: BackendRegistry) -> AgenticToolHandler:
    config = AgentConfig(
        prompt_template=SUMMARIZER_PROMPT,
        input_parameters=(
            ParameterSpec(name="text", type="string", description="Text to summarize.", required=True),
        ),
        output_contract="free-text",
        backend=SUMMARIZER_BACKEND_ID,
    )
    return AgenticToolHandler(config, backends)


def demo_spec_dir() -> str:
    return str(resources.files("toolhub.demo").joinpath("specs"))


def install_demo_pack(
    registry: Registry,
    backends: BackendRegistry | None = None,
    expert_base_url: str | None = None,
) -> int:
    """Register every demo tool; returns the number registered.

    ``backends`` hosts the summarizer's text-generation backend (a fresh
    registry with the deterministic one is created if omitted);
    ``expert_base_url`` points the expert tools at a feedback server.
    """
    backends = backends if backends is not None else BackendRegistry()
    try:
        backends.get(SUMMARIZER_BACKEND_ID)
    except Exception:
        backends.register(ExtractiveSummaryBackend())

    builtins = dict(BUILTIN_HANDLERS)
    builtins["summarizer"] = summarizer_handler(backends)
    loaded, errors = registry.load_manifest(demo_spec_dir(), builtin_handlers=builtins)
    if errors:
        raise errors[0].error

    if expert_base_url is not None:
        configure_expert_tools(registry, expert_base_url)
    return len(loaded)


def configure_expert_tools(registry: Registry, base_url: str) -> None:
    """Re-register the expert tools with the feedback server address baked
    into their settings."""
    for name in EXPERT_TOOL_NAMES:
        entry = registry.get(name)
        if entry is None:
            continue
        handler = registry.resolve_handler(name)
        settings = dict(entry.spec.settings)
        settings["base_url"] = base_url
        registry.unregister(name)
        registry.register_local(dataclasses.replace(entry.spec, settings=settings), handler)


def case_study_plan() -> CompositePlan:
    return CompositePlan.from_dict(load_fixture("case_study_plan.json"))
