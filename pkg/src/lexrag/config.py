"""Runtime configuration: JSON config file, env-var secrets, flag overrides.

Precedence is flags > environment > config file > defaults. The full config
is serialized into output artifacts (or their sidecar meta files) so every
artifact records how it was produced.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict

from .chunker import ChunkConfig
from .instructions import TaskKind
from .metrics import EvalParams

# Reference workload: per-task record targets for the bundled pipeline run.
DEFAULT_TARGETS = {
    TaskKind.OVERLAPPING_ANALYSIS.value: 1087,
    TaskKind.ELEMENT_EXTRACTION.value: 890,
    TaskKind.LEGAL_QA.value: 1794,
    TaskKind.SUMMARIZATION.value: 1415,
    TaskKind.DRAFTING_REVISIONS.value: 1571,
    TaskKind.DRAFTING_PROVISIONS.value: 1750,
}


@dataclass
class ClientSettings:
    generation_endpoint: str = "http://localhost:8001/v1/chat/completions"
    generation_model: str = "gpt-3.5-turbo"
    temperature: float = 0.7
    embedding_endpoint: str = "http://localhost:8002/v1/embeddings"
    embedding_model: str = "text-embedding-3-small"
    mock_dim: int = 64
    mock_seed: int = 0
    fixtures_dir: str | None = None
    # Strict replay: a fixture miss fails instead of synthesizing a response.
    fixtures_strict: bool = False


@dataclass
class ServiceSettings:
    host: str = "127.0.0.1"
    port: int = 8080
    cors_origins: list[str] = field(default_factory=lambda: ["*"])
    bearer_token: str | None = None


@dataclass
class AppConfig:
    corpus_dir: str = "statutes"
    kb_path: str = "kb.lkb"
    dataset_path: str = "dataset.jsonl"
    prompts_path: str | None = None
    chunk: ChunkConfig = field(default_factory=ChunkConfig)
    eval: EvalParams = field(default_factory=EvalParams)
    k: int = 4
    seed: int = 0
    budget_tokens: int = 2048
    test_fraction: float = 0.2
    index_level: str = "article"
    targets: dict[str, int] = field(default_factory=lambda: dict(DEFAULT_TARGETS))
    items_per_call: int = 3
    max_retries: int = 2
    parallelism: int = 1
    mock_clients: bool = False
    clients: ClientSettings = field(default_factory=ClientSettings)
    service: ServiceSettings = field(default_factory=ServiceSettings)

    def to_dict(self) -> dict:
        return asdict(self)


def _merge_dataclass(cls, defaults, data: dict):
    kwargs = {}
    for name in defaults.__dataclass_fields__:
        kwargs[name] = data[name] if name in data else getattr(defaults, name)
    return cls(**kwargs)


def _deep_merge(base: dict, extra: dict) -> dict:
    """Overlay extra on base, recursing into dicts and dropping None leaves."""
    merged = dict(base)
    for key, value in extra.items():
        if value is None:
            continue
        if isinstance(value, dict):
            below = merged.get(key)
            merged[key] = _deep_merge(below if isinstance(below, dict) else {}, value)
        else:
            merged[key] = value
    return merged


def load_config(path=None, overrides: dict | None = None) -> AppConfig:
    """Build an AppConfig from an optional JSON file plus explicit overrides."""
    data: dict = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    if overrides:
        data = _deep_merge(data, overrides)

    base = AppConfig()
    config = _merge_dataclass(AppConfig, base, data)
    if isinstance(config.chunk, dict):
        config.chunk = _merge_dataclass(ChunkConfig, ChunkConfig(), config.chunk)
    if isinstance(config.eval, dict):
        config.eval = _merge_dataclass(EvalParams, EvalParams(), config.eval)
    if isinstance(config.clients, dict):
        config.clients = _merge_dataclass(ClientSettings, ClientSettings(), config.clients)
    if isinstance(config.service, dict):
        config.service = _merge_dataclass(ServiceSettings, ServiceSettings(), config.service)
    return config
