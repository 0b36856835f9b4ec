"""Shipped test assets.

A single end-to-end scenario (claim record, mock script, committed
expected report), a corpus of malformed model responses for the parser
robustness suite, and seeded generators for property tests. The expected
report is a committed artifact; regenerate it only deliberately, via
``python -m tracer.fixtures regenerate``.
"""

from __future__ import annotations

import datetime
import json
import math
import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from ..corpus import ClaimRecord, Corpus, Label, LABELS, Split, consolidate_label
from ..gateway import Gateway, MockScript, ResponseCache
from ..verdict import VerdictReport, load_reports

_RATING_CYCLE = ("True", "Mostly True", "Half True", "Mostly False", "False", "Pants on Fire")


def data_path(name: str) -> Path:
    return Path(resources.files("tracer.fixtures").joinpath("data", name))


SCENARIO_CLAIM = "scenario_claim.jsonl"
SCENARIO_MOCK = "scenario_mock.json"
SCENARIO_EXPECTED = "scenario_expected.jsonl"
MALFORMED_RESPONSES = "malformed_responses.json"


def load_scenario_record() -> ClaimRecord:
    from ..corpus import load_corpus

    return load_corpus(data_path(SCENARIO_CLAIM)).records[0]


def load_scenario_script() -> MockScript:
    """Fresh scripted backend for the scenario (call_log starts empty)."""
    return MockScript.from_file(data_path(SCENARIO_MOCK))


def make_scenario_gateway(cache_path: str | Path | None = None) -> Gateway:
    return Gateway(backend=load_scenario_script(), cache=ResponseCache(cache_path))


def load_expected_report() -> VerdictReport:
    return load_reports(data_path(SCENARIO_EXPECTED))[0]


def load_malformed_responses() -> list[dict]:
    with data_path(MALFORMED_RESPONSES).open("r", encoding="utf-8") as handle:
        return json.load(handle)


@dataclass
class RandomFixture:
    gold: list[Label]
    pred: list[Label]
    pool: list[str]


def generate_random_fixture(seed: int, n: int) -> RandomFixture:
    """Seeded gold/prediction label lists plus a synthetic sentence pool."""
    rng = random.Random(seed)
    return RandomFixture(
        gold=[rng.choice(LABELS) for _ in range(n)],
        pred=[rng.choice(LABELS) for _ in range(n)],
        pool=[f"synthetic evidence sentence {seed}-{i}" for i in range(n)],
    )


def make_retrieval_fixture(seed: int, pool_size: int) -> tuple[MockScript, str, list[str]]:
    """Scripted backend for retrieval property tests.

    The probe query embeds to the unit x-axis; pool sentences embed to
    random unit vectors in the upper half-plane, so similarities spread
    across (-1, 1). Each sentence gets a random entailment verdict.
    Everything is deterministic per seed.
    """
    rng = random.Random(seed)
    query = f"probe assumption {seed}"
    pool = [f"pool sentence {seed}-{i}" for i in range(pool_size)]
    embeddings = [{"text": query, "vector": [1.0, 0.0]}]
    rules = []
    for sentence in pool:
        angle = rng.uniform(0.0, math.pi)
        embeddings.append(
            {"text": sentence, "vector": [math.cos(angle), math.sin(angle)]}
        )
        rules.append(
            {"template": "nli", "contains": sentence, "response": rng.choice("ABC")}
        )
    script = MockScript.from_dict({"rules": rules, "embeddings": embeddings})
    return script, query, pool


def generate_synthetic_corpus(seed: int, n: int) -> Corpus:
    """Deterministic well-formed corpus for round-trip and ingest tests."""
    rng = random.Random(seed)
    records = []
    for i in range(n):
        rating = _RATING_CYCLE[i % len(_RATING_CYCLE)]
        year = rng.choice((2018, 2019, 2020))
        month = rng.randrange(1, 13)
        day = rng.randrange(1, 29)
        n_evidence = rng.randrange(2, 5)
        records.append(
            ClaimRecord(
                id=f"syn-{seed}-{i:03d}",
                claim=f"Synthetic claim number {i} about statistic {rng.randrange(1000)}.",
                date=datetime.date(year, month, day),
                raw_rating=rating,
                gold_label=consolidate_label(rating),
                evidence=[
                    f"Synthetic evidence {i}.{j} with detail {rng.randrange(1000)}."
                    for j in range(n_evidence)
                ],
                ruling=[
                    "Our ruling",
                    f"Synthetic ruling paragraph for claim {i}.",
                ],
            )
        )
    return Corpus(split=Split.TEST, records=records)


__all__ = [
    "MALFORMED_RESPONSES",
    "RandomFixture",
    "SCENARIO_CLAIM",
    "SCENARIO_EXPECTED",
    "SCENARIO_MOCK",
    "data_path",
    "generate_random_fixture",
    "generate_synthetic_corpus",
    "load_expected_report",
    "load_malformed_responses",
    "load_scenario_record",
    "load_scenario_script",
    "make_retrieval_fixture",
    "make_scenario_gateway",
]
