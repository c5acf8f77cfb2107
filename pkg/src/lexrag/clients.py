"""Chat-completion and embedding clients, real (HTTP) and mock (offline).

The HTTP clients speak a chat-completions-style JSON wire shape with the
API key taken from an environment variable. The mocks are fully
deterministic: the hash embedder derives a vector from the text alone, and
the file-backed chat mock replays canned responses keyed by prompt hash,
synthesizing a deterministic response on a miss (record/replay style).
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from pathlib import Path

import httpx
import numpy as np

from .errors import ClientError
from .kb import EmbeddingVector

GENERATION_API_KEY_ENV = "LEXRAG_GENERATION_API_KEY"
EMBEDDING_API_KEY_ENV = "LEXRAG_EMBEDDING_API_KEY"


def _auth_headers(env_var: str) -> dict:
    key = os.environ.get(env_var, "")
    return {"Authorization": f"Bearer {key}"} if key else {}


class HttpChatClient:
    """POSTs {model, messages, temperature} and reads choices[0].message.content."""

    def __init__(self, endpoint: str, model: str, temperature: float = 0.7,
                 timeout: float = 60.0, max_retries: int = 2,
                 api_key_env: str = GENERATION_API_KEY_ENV, transport=None):
        self.endpoint = endpoint
        self.model = model
        self.temperature = temperature
        self.max_retries = max_retries
        self.identity = f"http:{model}"
        self._client = httpx.Client(timeout=timeout, transport=transport,
                                    headers=_auth_headers(api_key_env))

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.temperature,
        }
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                response = self._client.post(self.endpoint, json=payload)
                response.raise_for_status()
                body = response.json()
                return body["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
                last_error = exc
                time.sleep(0)  # yield; real backoff is the caller's retry budget
        raise ClientError(f"chat completion failed via {self.identity}: {last_error}")

    def close(self) -> None:
        self._client.close()


class HttpEmbeddingClient:
    """POSTs {model, input: [texts]} and reads data[*].embedding arrays."""

    def __init__(self, endpoint: str, model: str, timeout: float = 60.0,
                 max_retries: int = 2, api_key_env: str = EMBEDDING_API_KEY_ENV,
                 transport=None):
        self.endpoint = endpoint
        self.model = model
        self.max_retries = max_retries
        self.identity = f"http:{model}"
        self._dim: int | None = None
        self._client = httpx.Client(timeout=timeout, transport=transport,
                                    headers=_auth_headers(api_key_env))

    @property
    def dim(self) -> int:
        if self._dim is None:
            raise ClientError("embedding dim unknown before the first call")
        return self._dim

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        payload = {"model": self.model, "input": list(texts)}
        last_error: Exception | None = None
        for _ in range(self.max_retries + 1):
            try:
                response = self._client.post(self.endpoint, json=payload)
                response.raise_for_status()
                body = response.json()
                vectors = [EmbeddingVector.from_values(item["embedding"])
                           for item in body["data"]]
                if len(vectors) != len(texts):
                    raise ValueError(f"got {len(vectors)} embeddings for {len(texts)} texts")
                dims = {v.dim for v in vectors}
                if self._dim is not None:
                    dims.add(self._dim)
                if len(dims) > 1:
                    raise ValueError(f"embedder returned mixed dims {sorted(dims)}")
                if vectors:
                    self._dim = vectors[0].dim
                return vectors
            except (httpx.HTTPError, KeyError, IndexError, ValueError, TypeError) as exc:
                last_error = exc
        raise ClientError(f"embedding failed via {self.identity}: {last_error}")

    def close(self) -> None:
        self._client.close()


class HashEmbeddingClient:
    """Deterministic offline embedder: the vector is a pure function of the text."""

    def __init__(self, dim: int = 64, seed: int = 0):
        if dim < 2:
            raise ValueError("dim must be >= 2")
        self._dim = dim
        self.seed = seed
        self.identity = f"mock-hash-{dim}-{seed}"

    @property
    def dim(self) -> int:
        return self._dim

    def _vector(self, text: str) -> EmbeddingVector:
        digest = hashlib.sha256(f"{self.seed}:{text}".encode("utf-8")).digest()
        rng = np.random.Generator(np.random.PCG64(int.from_bytes(digest[:8], "little")))
        return EmbeddingVector.from_values(rng.standard_normal(self._dim))

    def embed(self, texts: list[str]) -> list[EmbeddingVector]:
        return [self._vector(t) for t in texts]


class EchoChatClient:
    """Generation mock that returns its prompt; lets tests see exact assembly."""

    identity = "mock-echo"

    def complete(self, prompt: str) -> str:
        return prompt


_COUNT_RE = re.compile(r"exactly (\d+)")


class FileBackedMockChatClient:
    """Replay chat mock: canned responses from a fixture dir keyed by prompt hash.

    A repeated identical prompt gets a per-occurrence key suffix, mirroring a
    sampling model that answers the same question differently each time. On a
    fixture miss the client either synthesizes a deterministic, schema-valid
    response (default) or raises ClientError when strict.
    """

    def __init__(self, fixture_dir=None, seed: int = 0, synthesize_on_miss: bool = True,
                 record: bool = False):
        self.fixture_dir = Path(fixture_dir) if fixture_dir else None
        self.seed = seed
        self.synthesize_on_miss = synthesize_on_miss
        self.record = record
        self.identity = f"mock-file-{seed}"
        self._occurrences: dict[str, int] = {}
        self._lock = threading.Lock()

    def _fixture_path(self, key: str) -> Path | None:
        if self.fixture_dir is None:
            return None
        return self.fixture_dir / f"{key}.txt"

    def complete(self, prompt: str) -> str:
        digest = hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:24]
        with self._lock:
            occurrence = self._occurrences.get(digest, 0) + 1
            self._occurrences[digest] = occurrence
        key = digest if occurrence == 1 else f"{digest}__{occurrence}"
        path = self._fixture_path(key)
        if path is not None and path.is_file():
            return path.read_text(encoding="utf-8")
        if not self.synthesize_on_miss:
            raise ClientError(f"no canned response for prompt key {key}")
        response = self._synthesize(prompt, key)
        if self.record and path is not None:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(response, encoding="utf-8")
        return response

    def _synthesize(self, prompt: str, key: str) -> str:
        count_match = _COUNT_RE.search(prompt)
        n = int(count_match.group(1)) if count_match else 3
        stamp = hashlib.sha256(f"{self.seed}:{key}".encode("utf-8")).hexdigest()[:10]
        items = [
            {
                "input": f"[{stamp}-{i}] Apa yang diatur mengenai topik {i} dalam konteks ini?",
                "output": f"Ketentuan {stamp}-{i}: jawaban ringkas berdasarkan konteks yang diberikan.",
            }
            for i in range(1, n + 1)
        ]
        return json.dumps(items, ensure_ascii=False, indent=1)
