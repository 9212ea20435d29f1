"""Tool finder: maps natural-language requirements to ranked tool candidates."""

from __future__ import annotations

from typing import Callable, Iterable

from ..errors import EXECUTION_FAILED, ToolError, spec_invalid
from ..protocol import ToolSpec
from .embedding import (
    Embedder,
    HashingEmbedder,
    VectorStore,
    build_vector_store,
    embedding_search,
)
from .keyword import (
    KeywordIndex,
    ScoreBreakdown,
    ToolMatch,
    build_keyword_index,
    keyword_search,
)
from .normalize import normalize_terms, normalize_text

__all__ = [
    "Embedder",
    "Finder",
    "HashingEmbedder",
    "KeywordIndex",
    "ScoreBreakdown",
    "ToolMatch",
    "VectorStore",
    "build_keyword_index",
    "build_vector_store",
    "embedding_search",
    "keyword_search",
    "normalize_terms",
    "normalize_text",
]

# An agentic search backend: (query, candidate specs) -> matches.
AgenticSearch = Callable[[str, list[ToolSpec]], list[ToolMatch]]


class Finder:
    """Immutable snapshot of both search indexes over a set of specs."""

    def __init__(
        self,
        specs: Iterable[ToolSpec],
        embedder: Embedder | None = None,
        agentic_search: AgenticSearch | None = None,
        candidate_budget: int = 20,
    ):
        self.specs = {spec.name: spec for spec in specs}
        self.keyword_index = build_keyword_index(self.specs.values())
        self.vector_store = build_vector_store(self.specs.values(), embedder)
        self.agentic_search = agentic_search
        self.candidate_budget = candidate_budget

    def find_tool(self, query: str, strategy: str = "keyword", limit: int = 10) -> list[ToolMatch]:
        if strategy == "keyword":
            return keyword_search(self.keyword_index, query, limit)
        if strategy == "embedding":
            return embedding_search(self.vector_store, query, limit)
        if strategy == "auto":
            return self._auto(query, limit)
        if strategy == "agentic":
            if self.agentic_search is None:
                raise ToolError(
                    EXECUTION_FAILED,
                    "agentic search requested but no agent backend is configured",
                )
            candidates = self._candidates(query)
            return self.agentic_search(query, candidates)[:limit]
        raise spec_invalid(f"unknown search strategy: {strategy!r}")

    def _candidates(self, query: str) -> list[ToolSpec]:
        """Prefilter for in-context search, bounded to fit the agent's context."""
        matched = self._auto(query, self.candidate_budget)
        specs = [self.specs[m.tool_name] for m in matched]
        if not specs:
            specs = [self.specs[name] for name in sorted(self.specs)][: self.candidate_budget]
        return specs

    def _auto(self, query: str, limit: int) -> list[ToolMatch]:
        """Union of keyword and embedding hits, re-ranked by normalized score."""
        kw = keyword_search(self.keyword_index, query, max(limit, len(self.specs) or 1))
        emb = embedding_search(self.vector_store, query, max(limit, len(self.specs) or 1))
        best: dict[str, float] = {}
        for matches in (kw, emb):
            top = max((m.score for m in matches), default=0.0)
            if top <= 0:
                continue
            for m in matches:
                norm = m.score / top
                if norm > best.get(m.tool_name, float("-inf")):
                    best[m.tool_name] = norm
        ranked = sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))
        return [ToolMatch(tool_name=name, score=score, strategy="auto") for name, score in ranked[:limit]]
