from __future__ import annotations

import re

from hypothesis import given
from hypothesis import strategies as st

from toolhub.finder import normalize
from toolhub.finder.normalize import (
    STEM_RULES,
    STOPWORDS,
    ngrams,
    normalize_terms,
    normalize_text,
    stem,
    tokenize,
)

from .oracles import oracle_normalize, oracle_stem


def test_stopword_list_has_exactly_50_entries():
    assert len(STOPWORDS) == 50


def test_rule_table_has_exactly_20_rules():
    assert len(STEM_RULES) == 20


def test_tokenize_lowercases_and_splits_on_non_alphanumerics():
    assert tokenize("Hello, World! x2-y") == ["hello", "world", "x2", "y"]


def test_all_stopwords_removed():
    text = " ".join(STOPWORDS)
    assert normalize_terms(text) == []


def test_worked_example():
    assert normalize_terms("Searching the databases") == ["search", "databas"]


# One exercising input per rule, in table form: token -> expected stem.
RULE_CASES = {
    "normalization": "normalize",
    "usefulness": "useful",
    "nervousness": "nervous",
    "effectiveness": "effective",
    "relational": "relate",
    "emotional": "emotion",
    "tendencies": "tendence",
    "vacancies": "vacance",
    "entities": "entity",
    "payments": "payment",
    "classes": "class",
    "knowingly": "know",
    "markedly": "mark",
    "darkness": "dark",
    "studies": "study",
    "running": "runn",
    "aligned": "align",
    "bigger": "bigg",
    "databases": "databas",
    "quickly": "quick",
}


def test_every_rule_exercised_by_table():
    suffixes_hit = set()
    for token, expected in RULE_CASES.items():
        assert stem(token) == expected, token
        for rule in STEM_RULES:
            if token.endswith(rule.suffix) and len(token) - len(rule.suffix) >= rule.min_stem_len:
                suffixes_hit.add(rule.suffix)
                break
    assert suffixes_hit == {r.suffix for r in STEM_RULES}


def test_longest_suffix_wins():
    # "normalization" ends with both "ization" and "ation"-like shorter rules;
    # the 7-character rule must be the one applied.
    assert stem("normalization") == "normalize"
    # "databases" matches both "es" and nothing longer that fits.
    assert stem("databases") == "databas"


def test_at_most_one_rule_applied():
    # "agedly": the "edly" rule is blocked by its minimum stem length, so the
    # "ly" rule fires; the resulting "aged" must not be re-stemmed to "ag".
    assert stem("agedly") == "aged"
    # "knowingly" loses "ingly" in one step, not "ly" then "ing".
    assert stem("knowingly") == "know"


def test_min_stem_length_blocks_short_tokens():
    # "es" rule needs a 2-character stem; "es" itself must pass through.
    assert stem("es") == "es"
    assert stem("ing") == "ing"


def test_stemming_idempotent_on_rule_outputs():
    for token in RULE_CASES:
        once = stem(token)
        assert stem(once) == once, token


@given(st.lists(st.sampled_from(sorted(STOPWORDS) + ["protein", "searching", "databases"]), max_size=10))
def test_normalize_matches_oracle(words):
    text = " ".join(words)
    assert normalize_terms(text) == oracle_normalize(text)


@given(st.text(alphabet="abcdefgilmnorstuyz ", max_size=40))
def test_stem_matches_oracle_on_arbitrary_tokens(text):
    for token in re.findall(r"[a-z0-9]+", text.lower()):
        assert stem(token) == oracle_stem(token)


def test_ngrams():
    assert ngrams(["a", "b", "c"], 2) == ["a b", "b c"]
    assert ngrams(["a"], 2) == []
    terms, grams = normalize_text("protein structure prediction model")
    assert terms == ["protein", "structure", "prediction", "model"]
    assert "protein structure" in grams
    assert "protein structure prediction" in grams


def test_same_pipeline_for_documents_and_queries():
    # the module exposes exactly one normalization entry point used everywhere
    assert normalize.normalize_terms("Databases") == normalize.normalize_terms("databases")
