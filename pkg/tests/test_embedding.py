from __future__ import annotations

import random

import numpy as np
import pytest

from toolhub.errors import ToolError
from toolhub.finder import Finder
from toolhub.finder.embedding import (
    HashingEmbedder,
    build_vector_store,
    embedding_search,
)
from toolhub.finder.keyword import description_text

from .conftest import make_spec, random_corpus


def test_embedder_is_deterministic_and_normalized():
    emb = HashingEmbedder()
    a = emb("protein structure search")
    b = emb("protein structure search")
    assert np.array_equal(a, b)
    assert np.linalg.norm(a) == pytest.approx(1.0, abs=1e-9)


def test_self_similarity_is_one():
    specs = [make_spec("align_tool", "aligns protein sequences")]
    store = build_vector_store(specs)
    [match] = embedding_search(store, description_text(specs[0]), k=1)
    assert abs(match.score - 1.0) <= 1e-9


def test_cosine_invariant_under_positive_scaling():
    class ScaledEmbedder:
        def __init__(self, scale: float):
            self.inner = HashingEmbedder()
            self.dimension = self.inner.dimension
            self.scale = scale

        def __call__(self, text: str):
            return self.inner(text) * self.scale

    rng = random.Random(99)
    for _ in range(25):
        specs = random_corpus(rng, max_tools=8)
        query = specs[rng.randrange(len(specs))].description
        base = embedding_search(build_vector_store(specs), query, k=len(specs))
        scaled = embedding_search(
            build_vector_store(specs, embedder=ScaledEmbedder(rng.uniform(0.1, 50.0))),
            query,
            k=len(specs),
        )
        assert [m.tool_name for m in base] == [m.tool_name for m in scaled]


def test_dimension_mismatch_rejected():
    class BadEmbedder:
        dimension = 16

        def __call__(self, text: str):
            return np.zeros(8)

    with pytest.raises(ToolError) as exc:
        build_vector_store([make_spec("a_tool", "x")], embedder=BadEmbedder())
    assert exc.value.code == "SpecInvalid"


def test_embedding_ties_break_lexicographically():
    specs = [make_spec("b_tool", "same words here"), make_spec("a_tool", "same words here")]
    store = build_vector_store(specs)
    matches = embedding_search(store, "same words here", k=2)
    assert [m.tool_name for m in matches] == ["a_tool", "b_tool"]


def test_finder_auto_merges_strategies():
    specs = [
        make_spec("protein_lookup", "find records for a protein"),
        make_spec("unrelated_tool", "converts units"),
    ]
    finder = Finder(specs)
    matches = finder.find_tool("protein lookup", strategy="auto", limit=2)
    assert matches[0].tool_name == "protein_lookup"


def test_finder_agentic_requires_configuration():
    finder = Finder([make_spec("a_tool", "x")])
    with pytest.raises(ToolError):
        finder.find_tool("anything", strategy="agentic")


def test_finder_unknown_strategy():
    finder = Finder([make_spec("a_tool", "x")])
    with pytest.raises(ToolError):
        finder.find_tool("x", strategy="psychic")
