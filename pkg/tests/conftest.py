from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings

from toolhub.demo import install_demo_pack
from toolhub.expert.http import serve_expert_http
from toolhub.expert.service import ExpertQueue
from toolhub.hub import ToolHub
from toolhub.protocol import ParameterSpec, ToolSpec

settings.register_profile(
    "ci", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")

# Small word pool biased toward suffixes so generated corpora exercise the
# stemmer; includes stop words to exercise their removal.
WORDS = [
    "protein", "proteins", "search", "searching", "database", "databases",
    "gene", "align", "alignment", "lookup", "query", "queries", "record",
    "convert", "conversion", "filter", "filtered", "sample", "compound",
    "structure", "predict", "prediction", "the", "of", "useful", "quickly",
    "normalization", "happiness", "entities", "payments", "classes",
]


def make_spec(name: str, description: str, param_descs: list[str] = ()) -> ToolSpec:
    params = tuple(
        ParameterSpec(name=f"p{i}", type="string", description=d, required=False)
        for i, d in enumerate(param_descs)
    )
    return ToolSpec(name=name, description=description, parameters=params)


def random_corpus(rng: random.Random, max_tools: int = 10) -> list[ToolSpec]:
    n = rng.randint(1, max_tools)
    specs = []
    for i in range(n):
        name = "_".join(rng.sample(WORDS, rng.randint(1, 2))).replace("the", "t0") + f"_{i}"
        name = name.replace("of", "o1")
        description = " ".join(rng.choices(WORDS, k=rng.randint(3, 12)))
        param_descs = [
            " ".join(rng.choices(WORDS, k=rng.randint(1, 6)))
            for _ in range(rng.randint(0, 2))
        ]
        specs.append(make_spec(name, description, param_descs))
    return specs


def random_query(rng: random.Random, max_terms: int = 6) -> str:
    return " ".join(rng.choices(WORDS, k=rng.randint(1, max_terms)))


@pytest.fixture()
def demo_hub() -> ToolHub:
    hub = ToolHub()
    install_demo_pack(hub.registry, backends=hub.backends)
    return hub


@pytest.fixture()
def expert_server():
    queue = ExpertQueue()
    handle = serve_expert_http(queue, heartbeat_seconds=0.2)
    yield queue, handle.address
    handle.stop()
