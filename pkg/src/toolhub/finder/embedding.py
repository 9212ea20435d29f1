"""Embedding search: cosine similarity over description vectors.

The default embedder is a deterministic feature-hashing model (no network,
no weights); any text-to-vector callable with a fixed dimension can be
plugged in instead.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol

import numpy as np

from ..errors import spec_invalid
from ..protocol import ToolSpec
from .keyword import ToolMatch, description_text
from .normalize import ngrams, normalize_terms

DEFAULT_DIM = 256


class Embedder(Protocol):
    dimension: int

    def __call__(self, text: str) -> np.ndarray: ...


class HashingEmbedder:
    """Hash each term (and bigram) into one of ``dimension`` signed buckets."""

    def __init__(self, dimension: int = DEFAULT_DIM):
        self.dimension = dimension

    def __call__(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        terms = normalize_terms(text)
        for feature in terms + ngrams(terms, 2):
            digest = hashlib.md5(feature.encode("utf-8")).digest()
            bucket = int.from_bytes(digest[:4], "big") % self.dimension
            sign = 1.0 if digest[4] & 1 else -1.0
            vec[bucket] += sign
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


@dataclass
class VectorStore:
    names: list[str]
    matrix: np.ndarray  # rows L2-normalized
    embedder: Callable[[str], np.ndarray]
    dimension: int


def build_vector_store(
    specs: Iterable[ToolSpec], embedder: Embedder | None = None
) -> VectorStore:
    emb = embedder or HashingEmbedder()
    names: list[str] = []
    rows: list[np.ndarray] = []
    for spec in specs:
        vec = np.asarray(emb(description_text(spec)), dtype=np.float64)
        if vec.shape != (emb.dimension,):
            raise spec_invalid(
                f"embedder returned dimension {vec.shape} for tool {spec.name!r}, "
                f"expected ({emb.dimension},)"
            )
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec = vec / norm
        names.append(spec.name)
        rows.append(vec)
    matrix = np.vstack(rows) if rows else np.zeros((0, emb.dimension))
    return VectorStore(names=names, matrix=matrix, embedder=emb, dimension=emb.dimension)


def embedding_search(store: VectorStore, query: str, k: int = 10) -> list[ToolMatch]:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not store.names:
        return []
    qvec = np.asarray(store.embedder(query), dtype=np.float64)
    norm = np.linalg.norm(qvec)
    if norm > 0:
        qvec = qvec / norm
    sims = store.matrix @ qvec
    ranked = sorted(zip(store.names, sims), key=lambda pair: (-pair[1], pair[0]))
    return [
        ToolMatch(tool_name=name, score=float(sim), strategy="embedding")
        for name, sim in ranked[:k]
    ]
