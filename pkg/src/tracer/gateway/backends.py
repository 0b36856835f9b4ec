"""Live model backend speaking the OpenAI-compatible wire format.

Covers the two endpoints the pipeline needs: chat completions and
embeddings. Transport failures and 5xx/429 statuses are retried with
exponential backoff; any other non-2xx status fails immediately, since
repeating a rejected request cannot change the outcome. Parse failures
downstream are never retried here.
"""

from __future__ import annotations

import os
import time

import requests

from ..errors import BackendError, ConfigError

API_KEY_ENV = "TRACER_API_KEY"
DEFAULT_BASE_URL = "https://api.openai.com/v1"
RETRYABLE_STATUSES = frozenset({429, 500, 502, 503, 504})


def api_key_from_env() -> str:
    key = os.environ.get(API_KEY_ENV, "").strip()
    if not key:
        raise ConfigError(f"{API_KEY_ENV} is not set; required for live backend mode")
    return key


class LiveBackend:
    """HTTP client for chat-completions and embeddings endpoints."""

    def __init__(
        self,
        model_id: str,
        embedding_model_id: str | None = None,
        base_url: str = DEFAULT_BASE_URL,
        api_key: str | None = None,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        timeout: float = 60.0,
        session: requests.Session | None = None,
        sleep=time.sleep,
    ):
        self.model_id = model_id
        self.embedding_model_id = embedding_model_id or model_id
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key if api_key is not None else api_key_from_env()
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self.timeout = timeout
        self.session = session or requests.Session()
        self._sleep = sleep

    def _headers(self) -> dict:
        return {
            "Authorization": f"Bearer {self.api_key}",
            "Content-Type": "application/json",
        }

    def _post(self, endpoint: str, payload: dict) -> dict:
        url = f"{self.base_url}/{endpoint}"
        attempts = 0
        while True:
            attempts += 1
            try:
                response = self.session.post(
                    url, json=payload, headers=self._headers(), timeout=self.timeout
                )
            except requests.RequestException as exc:
                if attempts > self.max_retries:
                    raise BackendError(
                        f"POST {endpoint} failed after {attempts} attempts: {exc}",
                        retries=attempts - 1,
                    ) from exc
                self._sleep(self.backoff_base * 2 ** (attempts - 1))
                continue
            if response.status_code in RETRYABLE_STATUSES:
                if attempts > self.max_retries:
                    raise BackendError(
                        f"POST {endpoint} returned {response.status_code} "
                        f"after {attempts} attempts",
                        retries=attempts - 1,
                    )
                self._sleep(self.backoff_base * 2 ** (attempts - 1))
                continue
            if response.status_code != 200:
                raise BackendError(
                    f"POST {endpoint} returned {response.status_code}: {response.text[:200]}",
                    retries=attempts - 1,
                )
            try:
                return response.json()
            except ValueError as exc:
                raise BackendError(
                    f"POST {endpoint} returned undecodable body", retries=attempts - 1
                ) from exc

    def complete(self, prompt: str, temperature: float, max_tokens: int) -> str:
        payload = {
            "model": self.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": temperature,
            "max_tokens": max_tokens,
        }
        data = self._post("chat/completions", payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed chat completion response: {data!r:.200}") from exc

    def embed(self, text: str) -> list[float]:
        payload = {"model": self.embedding_model_id, "input": text}
        data = self._post("embeddings", payload)
        try:
            return [float(x) for x in data["data"][0]["embedding"]]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise BackendError(f"malformed embedding response: {data!r:.200}") from exc
