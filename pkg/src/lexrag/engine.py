"""Query orchestration: embed, retrieve, assemble the prompt, generate.

Prompt order is fixed: system text, then retrieved context blocks in rank
order, then the user question. Under token-budget pressure the
lowest-ranked blocks are dropped whole; a partially quoted legal clause is
worse than one clause fewer. Citations come from retrieval metadata, never
from parsing the model's free text.
"""

from __future__ import annotations

import importlib.resources
import json
import time
from dataclasses import dataclass, field

from .errors import BudgetTooSmallError, NotFoundError
from .kb import EmbeddingClient, KnowledgeBase, RetrievalHit, search_topk
from .refs import SourceRef

DEFAULT_BUDGET_TOKENS = 2048
DEFAULT_PROMPT_ID = "default"


def load_system_prompts(path=None) -> dict[str, str]:
    """System prompts keyed by id, from a JSON file or the packaged default."""
    if path is None:
        resource = importlib.resources.files("lexrag").joinpath("data/prompts.json")
        return json.loads(resource.read_text(encoding="utf-8"))
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class QueryRequest:
    text: str
    k: int = 4
    system_prompt_id: str = DEFAULT_PROMPT_ID
    model_id: str = ""

    def __post_init__(self):
        if not self.text or not self.text.strip():
            raise ValueError("query text must be nonempty")
        if self.k < 0:
            raise ValueError("k must be non-negative (0 disables retrieval)")


@dataclass
class AssembledPrompt:
    system: str
    context_blocks: list[tuple[str, str]]
    user: str
    token_estimate: int

    def to_text(self) -> str:
        parts = [self.system]
        for rank, (label, text) in enumerate(self.context_blocks, start=1):
            parts.append(f"[{rank}] {label}\n{text}")
        parts.append(self.user)
        return "\n\n".join(parts)


@dataclass
class Answer:
    text: str
    citations: list[SourceRef]
    hits: list[RetrievalHit]
    model_id: str
    latency_ms: int = 0
    prompt: AssembledPrompt | None = field(default=None, compare=False, repr=False)


def _estimate(system: str, user: str, blocks: list[tuple[str, str]]) -> int:
    total = len(system.split()) + len(user.split())
    for rank, (label, text) in enumerate(blocks, start=1):
        total += len(f"[{rank}] {label}".split()) + len(text.split())
    return total


def assemble_prompt(request: QueryRequest, hits: list[RetrievalHit],
                    budget_tokens: int = DEFAULT_BUDGET_TOKENS,
                    system_prompts: dict[str, str] | None = None) -> AssembledPrompt:
    """Stack system + ranked context + user, dropping whole blocks to fit.

    Raises BudgetTooSmallError when even the context-free prompt overflows.
    """
    prompts = system_prompts if system_prompts is not None else load_system_prompts()
    system = prompts.get(request.system_prompt_id)
    if system is None:
        raise NotFoundError(f"unknown system prompt id {request.system_prompt_id!r}")

    base = len(system.split()) + len(request.text.split())
    if base > budget_tokens:
        raise BudgetTooSmallError(
            f"system + user need {base} tokens, budget is {budget_tokens}")

    blocks = [
        (hit.chunk.ref.canonical() if hit.chunk.ref else hit.chunk.id, hit.chunk.text)
        for hit in hits
    ]
    while blocks and _estimate(system, request.text, blocks) > budget_tokens:
        blocks.pop()
    return AssembledPrompt(system=system, context_blocks=blocks, user=request.text,
                           token_estimate=_estimate(system, request.text, blocks))


def answer_query(request: QueryRequest, kb: KnowledgeBase | None,
                 embed_client: EmbeddingClient | None, gen_client,
                 budget_tokens: int = DEFAULT_BUDGET_TOKENS,
                 system_prompts: dict[str, str] | None = None) -> Answer:
    """Full pipeline: embed the query, retrieve top-k, assemble, generate.

    k == 0 skips retrieval entirely (ablation mode); the knowledge base and
    embedder are then not touched.
    """
    started = time.perf_counter()
    if request.k > 0:
        if kb is None:
            raise ValueError("retrieval requested but no knowledge base is loaded")
        if embed_client is None:
            raise ValueError("retrieval requested but no embedding client is set")
        query_vector = embed_client.embed([request.text])[0]
        hits = search_topk(kb, query_vector, request.k)
    else:
        hits = []

    assembled = assemble_prompt(request, hits, budget_tokens, system_prompts)
    answer_text = gen_client.complete(assembled.to_text())

    citations: list[SourceRef] = []
    cited: set[str] = set()
    for hit in hits[:len(assembled.context_blocks)]:
        ref = hit.chunk.ref
        if ref is not None and ref.canonical() not in cited:
            cited.add(ref.canonical())
            citations.append(ref)

    latency_ms = int((time.perf_counter() - started) * 1000)
    return Answer(text=answer_text, citations=citations, hits=hits,
                  model_id=request.model_id or getattr(gen_client, "identity", ""),
                  latency_ms=latency_ms, prompt=assembled)
