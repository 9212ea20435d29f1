"""Query/document normalization: tokenize, drop stop words, stem, n-grams.

The stop-word list (50 words) and the 20 suffix-stemming rules are fixture
files under ``data/`` so the pipeline is fully deterministic and the same
normalization is applied to indexed documents and to queries.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class StemRule:
    suffix: str
    replacement: str
    min_stem_len: int


def _load_lines(filename: str) -> list[str]:
    text = resources.files("toolhub.finder").joinpath(f"data/{filename}").read_text("utf-8")
    return [line for line in text.splitlines() if line.strip()]


def load_stopwords() -> frozenset[str]:
    return frozenset(_load_lines("stopwords.txt"))


def load_stem_rules() -> tuple[StemRule, ...]:
    rules = []
    for line in _load_lines("stemming_rules.tsv"):
        suffix, replacement, min_len = line.split("\t")
        rules.append(StemRule(suffix, replacement, int(min_len)))
    # Longest suffix wins; ties broken alphabetically for stability.
    rules.sort(key=lambda r: (-len(r.suffix), r.suffix))
    return tuple(rules)


STOPWORDS = load_stopwords()
STEM_RULES = load_stem_rules()


def stem(token: str, rules: tuple[StemRule, ...] = STEM_RULES) -> str:
    """Apply at most one suffix rule (longest matching suffix first)."""
    for rule in rules:
        if token.endswith(rule.suffix):
            stem_len = len(token) - len(rule.suffix)
            if stem_len >= rule.min_stem_len:
                return token[:stem_len] + rule.replacement
    return token


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text.lower())


def normalize_terms(text: str) -> list[str]:
    """Lowercase, tokenize, remove stop words, stem. Order preserved."""
    return [stem(tok) for tok in tokenize(text) if tok not in STOPWORDS]


def ngrams(terms: list[str], n: int) -> list[str]:
    if len(terms) < n:
        return []
    return [" ".join(terms[i : i + n]) for i in range(len(terms) - n + 1)]


def normalize_text(text: str) -> tuple[list[str], list[str]]:
    """Full pipeline: returns (terms, ngrams) where ngrams are the bigrams
    and trigrams over the post-stem term sequence."""
    terms = normalize_terms(text)
    return terms, ngrams(terms, 2) + ngrams(terms, 3)
