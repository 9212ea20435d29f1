"""Quality reports: per-dimension 0-10 scores with a single overall number."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

OPTIMIZER_DIMENSIONS = (
    "clarity",
    "accuracy",
    "completeness",
    "conciseness",
    "user-friendliness",
    "redundancy-avoidance",
)

DISCOVER_DIMENSIONS = (
    "functionality",
    "reliability",
    "maintainability",
    "performance",
    "test-coverage",
)

DISCOVER_WEIGHTS = {
    "functionality": 0.3,
    "reliability": 0.25,
    "maintainability": 0.15,
    "performance": 0.1,
    "test-coverage": 0.2,
}

_SENTENCE_SPLIT = re.compile(r"[.!?]+")


@dataclass(frozen=True)
class QualityReport:
    scores: Mapping[str, float]
    overall: float
    rationale: Mapping[str, str] = field(default_factory=dict)
    round: int = 0

    def to_dict(self) -> dict:
        return {
            "scores": dict(self.scores),
            "overall": self.overall,
            "rationale": dict(self.rationale),
            "round": self.round,
        }


def clamp_score(value: float) -> float:
    return max(0.0, min(10.0, value))


def make_report(
    scores: Mapping[str, float],
    dimensions: tuple[str, ...],
    round_index: int = 0,
    rationale: Mapping[str, str] | None = None,
) -> QualityReport:
    if set(scores) != set(dimensions):
        raise ValueError(f"scores must cover exactly the dimensions {dimensions}")
    clamped = {dim: clamp_score(scores[dim]) for dim in dimensions}
    if dimensions == DISCOVER_DIMENSIONS:
        overall = sum(clamped[d] * DISCOVER_WEIGHTS[d] for d in dimensions)
    else:
        overall = sum(clamped.values()) / len(dimensions)
    return QualityReport(
        scores=clamped, overall=overall, rationale=rationale or {}, round=round_index
    )


def normalize_sentences(text: str) -> list[str]:
    """Sentences lowercased with collapsed whitespace, for redundancy checks."""
    out = []
    for raw in _SENTENCE_SPLIT.split(text):
        sentence = " ".join(raw.lower().split())
        if sentence:
            out.append(sentence)
    return out


def shared_sentences(tool_description: str, parameter_description: str) -> set[str]:
    return set(normalize_sentences(tool_description)) & set(
        normalize_sentences(parameter_description)
    )
