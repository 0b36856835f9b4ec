"""Single point of contact with language models.

Everything the pipeline asks of a model flows through one Gateway
object: render a catalog template, check the persistent cache, and only
then touch the configured backend (live HTTP or a scripted mock). The
cache makes temperature-0 runs replayable: a second identical run reads
every answer back without a single backend call.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from ..errors import BackendError, EmptyInput
from .backends import API_KEY_ENV, LiveBackend, api_key_from_env
from .cache import ResponseCache, completion_key, embedding_key
from .mock import MockCall, MockScript
from .parsing import parse_binary_digit, parse_bracketed, parse_letter_choice
from .templates import PromptTemplate, TemplateCatalog, render_template

DEFAULT_MAX_TOKENS = 1024


@dataclass(frozen=True)
class Decoding:
    temperature: float = 0.0
    max_tokens: int = DEFAULT_MAX_TOKENS


@dataclass(frozen=True)
class CompletionRequest:
    template_id: str
    bindings: dict
    decoding: Decoding = Decoding()
    model_id: str = "mock"


@dataclass(frozen=True)
class Embedding:
    vector: tuple[float, ...]
    model_id: str


@dataclass
class GatewayCounters:
    completion_requests: int = 0
    completion_cache_hits: int = 0
    embedding_requests: int = 0
    embedding_cache_hits: int = 0
    backend_calls: int = 0
    # per-template backend call counts, for ablation gating checks
    by_template: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {
            "completion_requests": self.completion_requests,
            "completion_cache_hits": self.completion_cache_hits,
            "embedding_requests": self.embedding_requests,
            "embedding_cache_hits": self.embedding_cache_hits,
            "backend_calls": self.backend_calls,
            "by_template": dict(sorted(self.by_template.items())),
        }


class Gateway:
    """Template rendering + cache + backend, behind one interface.

    The backend is either a MockScript or a LiveBackend; both expose
    completion and embedding calls. A bounded semaphore caps in-flight
    backend requests when callers fan out across threads.
    """

    def __init__(
        self,
        backend,
        catalog: TemplateCatalog | None = None,
        cache: ResponseCache | None = None,
        model_id: str | None = None,
        embedding_model_id: str | None = None,
        decoding: Decoding = Decoding(),
        max_in_flight: int = 4,
    ):
        self.backend = backend
        self.catalog = catalog if catalog is not None else TemplateCatalog.bundled()
        # explicit None check: an empty cache is falsy but still the caller's cache
        self.cache = cache if cache is not None else ResponseCache()
        self.model_id = model_id or getattr(backend, "model_id", "mock")
        self.embedding_model_id = embedding_model_id or getattr(
            backend, "embedding_model_id", self.model_id
        )
        self.decoding = decoding
        self.counters = GatewayCounters()
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        self._counter_lock = threading.Lock()

    # -- completions ---------------------------------------------------

    def complete(self, request: CompletionRequest) -> str:
        template = self.catalog.get(request.template_id)
        prompt = render_template(template, request.bindings)
        key = completion_key(
            request.model_id,
            request.template_id,
            prompt,
            request.decoding.temperature,
            request.decoding.max_tokens,
        )
        cached = self.cache.get(key)
        with self._counter_lock:
            self.counters.completion_requests += 1
            if cached is not None:
                self.counters.completion_cache_hits += 1
        if cached is not None:
            return cached
        with self._semaphore:
            text = self._backend_complete(request, prompt)
        with self._counter_lock:
            self.counters.backend_calls += 1
            self.counters.by_template[request.template_id] = (
                self.counters.by_template.get(request.template_id, 0) + 1
            )
        self.cache.put(key, text)
        return text

    def _backend_complete(self, request: CompletionRequest, prompt: str) -> str:
        if isinstance(self.backend, MockScript):
            return self.backend.complete(request.template_id, prompt)
        return self.backend.complete(
            prompt, request.decoding.temperature, request.decoding.max_tokens
        )

    def run(self, template_id: str, **bindings) -> str:
        """Render-and-complete with the gateway's default decoding."""
        return self.complete(
            CompletionRequest(
                template_id=template_id,
                bindings=bindings,
                decoding=self.decoding,
                model_id=self.model_id,
            )
        )

    # -- embeddings ----------------------------------------------------

    def embed(self, text: str) -> Embedding:
        if not text or not text.strip():
            raise EmptyInput("cannot embed empty text")
        key = embedding_key(self.embedding_model_id, text)
        cached = self.cache.get(key)
        with self._counter_lock:
            self.counters.embedding_requests += 1
            if cached is not None:
                self.counters.embedding_cache_hits += 1
        if cached is not None:
            return Embedding(vector=tuple(cached), model_id=self.embedding_model_id)
        with self._semaphore:
            vector = self.backend.embed(text)
        with self._counter_lock:
            self.counters.backend_calls += 1
        self.cache.put(key, list(vector))
        return Embedding(vector=tuple(vector), model_id=self.embedding_model_id)


__all__ = [
    "API_KEY_ENV",
    "CompletionRequest",
    "Decoding",
    "Embedding",
    "Gateway",
    "GatewayCounters",
    "LiveBackend",
    "MockCall",
    "MockScript",
    "PromptTemplate",
    "ResponseCache",
    "TemplateCatalog",
    "api_key_from_env",
    "completion_key",
    "embedding_key",
    "parse_binary_digit",
    "parse_bracketed",
    "parse_letter_choice",
    "render_template",
]
