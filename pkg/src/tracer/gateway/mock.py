"""Scripted offline backend.

A mock script is a JSON document describing canned completions and
embeddings. Completion rules are matched in order against the template
id and, optionally, a substring of the rendered prompt; the first match
wins. A rule may carry a single response (returned every time) or a
response list consumed one call at a time. Every served call is appended
to ``call_log`` so tests can assert exact call counts and ordering.

Script format::

    {
      "rules": [
        {"template": "relevance", "response": "A"},
        {"template": "presentation", "contains": "part-time", "response": "B"},
        {"template": "counterfactual", "responses": ["C", "A"]}
      ],
      "embeddings": [
        {"text": "exact text to embed", "vector": [1.0, 0.0]},
        {"contains": "snippet", "vector": [0.0, 1.0]}
      ],
      "default_embedding": {"dim": 8}
    }

Unmatched requests raise MockScriptMiss rather than inventing output;
a silent fallback would let a test pass on text the script never
anticipated. The optional default_embedding block enables a
deterministic hashed fallback vector for texts the script does not
enumerate (unit norm, seeded from the text itself).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import MockScriptMiss


@dataclass
class MockRule:
    template: str
    contains: str | None
    responses: list[str]
    repeat: bool
    served: int = 0

    def matches(self, template_id: str, prompt: str) -> bool:
        if self.template != template_id:
            return False
        if self.contains is not None and self.contains not in prompt:
            return False
        return self.repeat or self.served < len(self.responses)

    def next_response(self) -> str:
        if self.repeat:
            response = self.responses[0]
        else:
            response = self.responses[self.served]
        self.served += 1
        return response


@dataclass
class MockCall:
    """One request actually served by the backend (cache hits bypass it)."""

    kind: str
    template: str | None
    prompt: str
    response: object


def _hashed_unit_vector(text: str, dim: int) -> list[float]:
    # Deterministic pseudo-embedding: bytes of the digest, recentred and
    # normalized. Distinct texts land on distinct directions.
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    raw = [digest[i % len(digest)] - 127.5 for i in range(dim)]
    norm = math.sqrt(sum(x * x for x in raw))
    return [x / norm for x in raw]


@dataclass
class MockScript:
    """Deterministic scripted backend for completions and embeddings."""

    rules: list[MockRule] = field(default_factory=list)
    embeddings: list[dict] = field(default_factory=list)
    default_embedding_dim: int | None = None
    call_log: list[MockCall] = field(default_factory=list)

    @classmethod
    def from_dict(cls, data: dict) -> "MockScript":
        rules = []
        for entry in data.get("rules", []):
            if "responses" in entry:
                responses = list(entry["responses"])
                repeat = False
            else:
                responses = [entry["response"]]
                repeat = True
            rules.append(
                MockRule(
                    template=entry["template"],
                    contains=entry.get("contains"),
                    responses=responses,
                    repeat=repeat,
                )
            )
        default = data.get("default_embedding") or {}
        return cls(
            rules=rules,
            embeddings=list(data.get("embeddings", [])),
            default_embedding_dim=default.get("dim"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "MockScript":
        with Path(path).open("r", encoding="utf-8") as handle:
            return cls.from_dict(json.load(handle))

    def complete(self, template_id: str, prompt: str) -> str:
        for rule in self.rules:
            if rule.matches(template_id, prompt):
                response = rule.next_response()
                self.call_log.append(
                    MockCall(kind="completion", template=template_id, prompt=prompt, response=response)
                )
                return response
        raise MockScriptMiss(
            f"no mock rule matches template {template_id!r}; prompt starts: {prompt[:80]!r}"
        )

    def embed(self, text: str) -> list[float]:
        vector = None
        for entry in self.embeddings:
            if "text" in entry and entry["text"] == text:
                vector = [float(x) for x in entry["vector"]]
                break
            if "contains" in entry and entry["contains"] in text:
                vector = [float(x) for x in entry["vector"]]
                break
        if vector is None:
            if self.default_embedding_dim is None:
                raise MockScriptMiss(f"no mock embedding matches text: {text[:80]!r}")
            vector = _hashed_unit_vector(text, self.default_embedding_dim)
        self.call_log.append(MockCall(kind="embedding", template=None, prompt=text, response=vector))
        return vector

    def calls_for(self, template_id: str) -> list[MockCall]:
        return [c for c in self.call_log if c.template == template_id]
