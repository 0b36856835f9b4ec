"""Gateway: templates, parsing, cache, mock backend, call accounting."""

import json
import string
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracer.errors import (
    BackendError,
    CacheCorruption,
    EmptyInput,
    MissingBinding,
    MockScriptMiss,
    UnknownBinding,
    UnknownTemplate,
    UnparseableChoice,
)
from tracer.gateway import (
    CompletionRequest,
    Gateway,
    LiveBackend,
    MockScript,
    PromptTemplate,
    ResponseCache,
    TemplateCatalog,
    parse_letter_choice,
    render_template,
)

from conftest import make_gateway


# -- templates -----------------------------------------------------------


def test_render_substitutes_all_placeholders():
    template = PromptTemplate.from_body("t", "Evidence: {evidence}\nClaim: {claim}")
    text = render_template(template, {"evidence": "E", "claim": "C"})
    assert "Evidence: E" in text
    assert "Claim: C" in text
    assert "{evidence}" not in text and "{claim}" not in text


def test_render_missing_binding():
    template = PromptTemplate.from_body("t", "Claim: {claim}")
    with pytest.raises(MissingBinding) as excinfo:
        render_template(template, {})
    assert excinfo.value.name == "claim"


def test_render_unknown_binding():
    template = PromptTemplate.from_body("t", "Claim: {claim}")
    with pytest.raises(UnknownBinding) as excinfo:
        render_template(template, {"claim": "c", "foo": "x"})
    assert excinfo.value.name == "foo"


def test_doubled_braces_are_literal_not_placeholders():
    template = PromptTemplate.from_body("t", "Score in {{0, 1}} for {intent}")
    assert template.required_bindings == frozenset({"intent"})
    assert render_template(template, {"intent": "i"}) == "Score in {0, 1} for i"


def test_bundled_catalog_covers_every_pipeline_template():
    catalog = TemplateCatalog.bundled()
    expected = {
        "relevance",
        "presentation",
        "ruling_enhancement",
        "intent_extraction",
        "intent_generation",
        "plausibility",
        "implicity",
        "sufficiency",
        "readability",
        "implicit_questions",
        "assumptions",
        "counterfactual",
        "reassessment",
        "nli",
        "cot_verdict",
    }
    assert expected <= set(catalog.ids())


def test_catalog_from_directory_and_unknown_template(tmp_path):
    (tmp_path / "greet.txt").write_text("Hello {name}", encoding="utf-8")
    catalog = TemplateCatalog.from_directory(tmp_path)
    assert catalog.render("greet", {"name": "x"}) == "Hello x"
    with pytest.raises(UnknownTemplate):
        catalog.get("absent")


# every placeholder occurring in a body is required, and vice versa
def test_bundled_templates_satisfy_binding_invariant():
    catalog = TemplateCatalog.bundled()
    for template_id in catalog.ids():
        template = catalog.get(template_id)
        rendered = render_template(
            template, {name: "x" for name in template.required_bindings}
        )
        for name in template.required_bindings:
            assert "{" + name + "}" not in rendered


# -- response cache ------------------------------------------------------


def test_cache_persists_and_reloads(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResponseCache(path)
    cache.put("k1", "v1")
    cache.put("k2", [1.0, 2.0])
    reloaded = ResponseCache(path)
    assert reloaded.get("k1") == "v1"
    assert reloaded.get("k2") == [1.0, 2.0]
    assert len(reloaded) == 2


def test_cache_later_appends_win(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResponseCache(path)
    cache.put("k", "old")
    cache.put("k", "new")
    assert ResponseCache(path).get("k") == "new"


def test_cache_corruption_names_the_line(tmp_path):
    path = tmp_path / "cache.jsonl"
    path.write_text('{"key": "a", "value": "b"}\ngarbage\n', encoding="utf-8")
    with pytest.raises(CacheCorruption) as excinfo:
        ResponseCache(path)
    assert "line 2" in str(excinfo.value)


def test_cache_clear_removes_file(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResponseCache(path)
    cache.put("k", "v")
    cache.clear()
    assert not path.exists()
    assert len(cache) == 0


def test_cache_concurrent_writers(tmp_path):
    path = tmp_path / "cache.jsonl"
    cache = ResponseCache(path)

    def writer(start):
        for i in range(start, start + 50):
            cache.put(f"k{i}", f"v{i}")

    threads = [threading.Thread(target=writer, args=(n * 50,)) for n in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    reloaded = ResponseCache(path)
    assert len(reloaded) == 200
    assert reloaded.get("k123") == "v123"


# -- mock backend --------------------------------------------------------


def test_mock_first_matching_rule_wins():
    script = MockScript.from_dict(
        {
            "rules": [
                {"template": "t", "contains": "special", "response": "S"},
                {"template": "t", "response": "D"},
            ]
        }
    )
    assert script.complete("t", "a special prompt") == "S"
    assert script.complete("t", "a plain prompt") == "D"


def test_mock_response_lists_are_consumed_in_order():
    script = MockScript.from_dict(
        {"rules": [{"template": "t", "responses": ["one", "two"]}]}
    )
    assert script.complete("t", "p") == "one"
    assert script.complete("t", "p") == "two"
    with pytest.raises(MockScriptMiss):
        script.complete("t", "p")


def test_mock_miss_raises_rather_than_inventing_output():
    script = MockScript.from_dict({"rules": []})
    with pytest.raises(MockScriptMiss):
        script.complete("relevance", "prompt")
    with pytest.raises(MockScriptMiss):
        script.embed("text nobody scripted")


def test_mock_call_log_is_complete_and_ordered():
    script = MockScript.from_dict(
        {
            "rules": [{"template": "t", "response": "R"}],
            "embeddings": [{"text": "e", "vector": [1.0]}],
        }
    )
    script.complete("t", "p1")
    script.embed("e")
    script.complete("t", "p2")
    assert [c.kind for c in script.call_log] == ["completion", "embedding", "completion"]
    assert [c.prompt for c in script.call_log] == ["p1", "e", "p2"]


def test_mock_default_embedding_is_deterministic_unit_norm():
    script = MockScript.from_dict({"default_embedding": {"dim": 12}})
    v1 = script.embed("some text")
    v2 = script.embed("some text")
    v3 = script.embed("other text")
    assert v1 == v2
    assert v1 != v3
    assert abs(sum(x * x for x in v1) - 1.0) < 1e-9


# -- gateway -------------------------------------------------------------


def test_gateway_complete_renders_and_dispatches():
    gateway, script = make_gateway(rules=[{"template": "relevance", "response": "A"}])
    text = gateway.run("relevance", claim="c", ruling="r", evidence="e")
    assert text == "A"
    assert len(script.call_log) == 1
    assert "c" in script.call_log[0].prompt


def test_gateway_cache_hit_skips_backend():
    gateway, script = make_gateway(rules=[{"template": "relevance", "response": "A"}])
    first = gateway.run("relevance", claim="c", ruling="r", evidence="e")
    second = gateway.run("relevance", claim="c", ruling="r", evidence="e")
    assert first == second == "A"
    assert len(script.call_log) == 1  # second answer came from cache
    assert gateway.counters.completion_cache_hits == 1
    assert gateway.counters.by_template == {"relevance": 1}


def test_gateway_distinct_bindings_are_distinct_requests():
    gateway, script = make_gateway(rules=[{"template": "relevance", "response": "A"}])
    gateway.run("relevance", claim="c1", ruling="r", evidence="e")
    gateway.run("relevance", claim="c2", ruling="r", evidence="e")
    assert len(script.call_log) == 2


def test_gateway_persistent_cache_across_instances(tmp_path):
    path = tmp_path / "cache.jsonl"
    gateway, script = make_gateway(
        rules=[{"template": "relevance", "response": "A"}], cache_path=path
    )
    gateway.run("relevance", claim="c", ruling="r", evidence="e")
    assert len(script.call_log) == 1

    gateway2, script2 = make_gateway(rules=[], cache_path=path)  # no rules needed
    assert gateway2.run("relevance", claim="c", ruling="r", evidence="e") == "A"
    assert script2.call_log == []


def test_gateway_embed_returns_cached_embedding():
    gateway, script = make_gateway(embeddings=[{"text": "e", "vector": [1.0, 0.0]}])
    first = gateway.embed("e")
    second = gateway.embed("e")
    assert first.vector == (1.0, 0.0)
    assert first == second
    assert len(script.call_log) == 1
    assert gateway.counters.embedding_cache_hits == 1


def test_gateway_embed_rejects_empty_text():
    gateway, _ = make_gateway()
    with pytest.raises(EmptyInput):
        gateway.embed("   ")


def test_unknown_template_raises():
    gateway, _ = make_gateway()
    with pytest.raises(UnknownTemplate):
        gateway.run("never_heard_of_it")


# -- live backend (stubbed transport) -------------------------------------


class _FakeResponse:
    def __init__(self, status_code, payload):
        self.status_code = status_code
        self._payload = payload
        self.text = json.dumps(payload)

    def json(self):
        return self._payload


class _FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.calls = 0

    def post(self, url, json=None, headers=None, timeout=None):
        self.calls += 1
        item = self.responses.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def _completion_payload(text):
    return {"choices": [{"message": {"content": text}}]}


def test_live_backend_retries_transient_errors_then_succeeds():
    import requests

    session = _FakeSession(
        [
            requests.ConnectionError("down"),
            _FakeResponse(503, {}),
            _FakeResponse(200, _completion_payload("ok")),
        ]
    )
    backend = LiveBackend(
        model_id="m", api_key="k", session=session, sleep=lambda s: None
    )
    assert backend.complete("p", 0.0, 16) == "ok"
    assert session.calls == 3


def test_live_backend_gives_up_after_max_retries():
    import requests

    session = _FakeSession([requests.ConnectionError("down")] * 10)
    backend = LiveBackend(
        model_id="m", api_key="k", max_retries=3, session=session, sleep=lambda s: None
    )
    with pytest.raises(BackendError) as excinfo:
        backend.complete("p", 0.0, 16)
    assert excinfo.value.retries == 3
    assert session.calls == 4  # initial attempt + 3 retries


def test_live_backend_client_errors_fail_immediately():
    session = _FakeSession([_FakeResponse(401, {"error": "no"})])
    backend = LiveBackend(model_id="m", api_key="k", session=session, sleep=lambda s: None)
    with pytest.raises(BackendError):
        backend.complete("p", 0.0, 16)
    assert session.calls == 1


def test_live_backend_embeddings_endpoint():
    session = _FakeSession(
        [_FakeResponse(200, {"data": [{"embedding": [0.1, 0.2]}]})]
    )
    backend = LiveBackend(model_id="m", api_key="k", session=session)
    assert backend.embed("t") == [0.1, 0.2]


# -- letter parsing property ---------------------------------------------

# wrappers made of characters that can never read as standalone letters
_wrapper = st.text(
    alphabet=string.whitespace + string.punctuation.replace("<", "").replace(">", ""),
    max_size=10,
)


@given(letter=st.sampled_from("abcd"), prefix=_wrapper, suffix=_wrapper)
def test_letter_choice_total_and_case_insensitive(letter, prefix, suffix):
    text = f"{prefix}{letter}{suffix}"
    assert parse_letter_choice(text, {"A", "B", "C", "D"}) == letter.upper()


@given(case=st.sampled_from(["B", "b", "B.", "b. Yes", "(B)", "Answer: b"]))
def test_letter_choice_lenient_formats(case):
    assert parse_letter_choice(case, {"A", "B"}) == "B"


def test_letter_choice_requires_nonempty_allowed():
    with pytest.raises(ValueError):
        parse_letter_choice("A", set())


def test_letter_choice_failure_carries_text():
    with pytest.raises(UnparseableChoice) as excinfo:
        parse_letter_choice("nothing here", {"A", "B"})
    assert excinfo.value.text == "nothing here"


# -- cache determinism invariant ------------------------------------------


def test_same_request_sequence_replays_identically(tmp_path):
    rules = [
        {"template": "relevance", "response": "A"},
        {"template": "presentation", "response": "B"},
    ]

    def run(cache_path):
        gateway, script = make_gateway(rules=rules, cache_path=cache_path)
        out = [
            gateway.run("relevance", claim="c", ruling="r", evidence="e"),
            gateway.run("presentation", claim="c", evidence="e"),
            gateway.run("relevance", claim="c", ruling="r", evidence="e"),
        ]
        return out, len(script.call_log)

    first_out, first_calls = run(tmp_path / "cache.jsonl")
    second_out, second_calls = run(tmp_path / "cache.jsonl")
    assert first_out == second_out
    assert first_calls == 2
    assert second_calls == 0  # everything served from the persistent cache
