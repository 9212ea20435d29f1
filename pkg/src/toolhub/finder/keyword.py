"""Keyword retrieval over tool specifications.

Per-term relevance is ``tf * idf * ln(1 + query_frequency)`` summed over the
matched terms, then multiplied by 2.0 when any query term hits the tool's
name and by 1.5 when a query bigram/trigram appears verbatim in the
description.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from ..protocol import ToolSpec
from .normalize import ngrams, normalize_terms

NAME_BONUS = 2.0
PHRASE_BONUS = 1.5


@dataclass(frozen=True)
class ScoreBreakdown:
    matched_terms: dict[str, dict[str, float]]  # term -> {tf, idf, query_frequency}
    base: float
    name_bonus_applied: bool
    phrase_bonus_applied: bool
    final: float

    def to_dict(self) -> dict:
        return {
            "matched_terms": self.matched_terms,
            "base": self.base,
            "name_bonus_applied": self.name_bonus_applied,
            "phrase_bonus_applied": self.phrase_bonus_applied,
            "final": self.final,
        }


@dataclass(frozen=True)
class ToolMatch:
    tool_name: str
    score: float
    strategy: str  # keyword | embedding | agentic
    breakdown: ScoreBreakdown | None = None

    def to_dict(self) -> dict:
        out = {"tool_name": self.tool_name, "score": self.score, "strategy": self.strategy}
        if self.breakdown is not None:
            out["breakdown"] = self.breakdown.to_dict()
        return out


def description_text(spec: ToolSpec) -> str:
    """Description field: tool description plus parameter descriptions."""
    parts = [spec.description]
    parts.extend(p.description for p in spec.parameters if p.description)
    return " ".join(parts)


@dataclass
class KeywordIndex:
    n_docs: int = 0
    term_counts: dict[str, Counter] = field(default_factory=dict)  # tool -> term tf
    name_terms: dict[str, frozenset] = field(default_factory=dict)
    desc_ngrams: dict[str, frozenset] = field(default_factory=dict)
    df: Counter = field(default_factory=Counter)

    def idf(self, term: str) -> float:
        if self.n_docs == 0:
            return 0.0
        return max(0.0, math.log(self.n_docs / (1 + self.df[term])) + 1.0)


def build_keyword_index(specs: Iterable[ToolSpec]) -> KeywordIndex:
    index = KeywordIndex()
    for spec in specs:
        name_terms = normalize_terms(spec.name)
        desc_terms = normalize_terms(description_text(spec))
        combined = Counter(name_terms) + Counter(desc_terms)
        index.term_counts[spec.name] = combined
        index.name_terms[spec.name] = frozenset(name_terms)
        index.desc_ngrams[spec.name] = frozenset(ngrams(desc_terms, 2) + ngrams(desc_terms, 3))
        for term in combined:
            index.df[term] += 1
        index.n_docs += 1
    return index


def keyword_search(
    index: KeywordIndex,
    query: str,
    limit: int = 10,
    *,
    name_bonus: float = NAME_BONUS,
    phrase_bonus: float = PHRASE_BONUS,
) -> list[ToolMatch]:
    if limit < 1:
        raise ValueError("limit must be >= 1")
    query_terms = normalize_terms(query)
    if not query_terms:
        return []
    query_counts = Counter(query_terms)
    query_ngrams = set(ngrams(query_terms, 2) + ngrams(query_terms, 3))

    matches: list[ToolMatch] = []
    for tool, counts in index.term_counts.items():
        matched: dict[str, dict[str, float]] = {}
        base = 0.0
        for term, qf in query_counts.items():
            tf = counts.get(term, 0)
            if tf == 0:
                continue
            idf = index.idf(term)
            contribution = tf * idf * math.log(1 + qf)
            base += contribution
            matched[term] = {"tf": float(tf), "idf": idf, "query_frequency": float(qf)}
        if not matched:
            continue
        hits_name = any(term in index.name_terms[tool] for term in query_counts)
        hits_phrase = bool(query_ngrams & index.desc_ngrams[tool])
        final = base
        if hits_name:
            final *= name_bonus
        if hits_phrase:
            final *= phrase_bonus
        matches.append(
            ToolMatch(
                tool_name=tool,
                score=final,
                strategy="keyword",
                breakdown=ScoreBreakdown(
                    matched_terms=matched,
                    base=base,
                    name_bonus_applied=hits_name,
                    phrase_bonus_applied=hits_phrase,
                    final=final,
                ),
            )
        )
    matches.sort(key=lambda m: (-m.score, m.tool_name))
    return matches[:limit]
