"""Shared test helpers: quick scripted gateways."""

from __future__ import annotations

import pytest

from tracer.gateway import Gateway, MockScript, ResponseCache


def make_gateway(
    rules=None, embeddings=None, default_dim=None, cache_path=None
) -> tuple[Gateway, MockScript]:
    """Gateway over an inline mock script; returns the script for call_log asserts."""
    script = MockScript.from_dict(
        {
            "rules": rules or [],
            "embeddings": embeddings or [],
            **({"default_embedding": {"dim": default_dim}} if default_dim else {}),
        }
    )
    return Gateway(backend=script, cache=ResponseCache(cache_path)), script


@pytest.fixture
def scenario_gateway():
    from tracer.fixtures import make_scenario_gateway

    return make_scenario_gateway()
