"""HTTP service: query, index, and corpus inspection endpoints.

State is read-mostly. The knowledge base is replaced wholesale on index:
each query handler captures the current KB reference once, so in-flight
queries finish against the version they started with while the writer swaps
in the new one.
"""

from __future__ import annotations

import threading
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import corpus as corpus_mod
from . import kb as kb_mod
from .cli import corpus_chunks
from .config import AppConfig
from .engine import QueryRequest, answer_query
from .errors import ClientError, LexragError, NotFoundError
from .refs import parse_ref

SCHEMA_VERSION = 1


class ServiceState:
    """Shared handles for all request handlers; KB swap is a single assignment."""

    def __init__(self, config: AppConfig, embed_client, gen_client,
                 prompts: dict[str, str], corpus: corpus_mod.Corpus | None = None,
                 kb: kb_mod.KnowledgeBase | None = None):
        self.config = config
        self.embed_client = embed_client
        self.gen_client = gen_client
        self.prompts = prompts
        self.corpus = corpus
        self.kb = kb
        self.index_lock = threading.Lock()


class QueryBody(BaseModel):
    text: str
    k: Optional[int] = None
    system_prompt_id: Optional[str] = None


class InlineDocument(BaseModel):
    doc_id: str
    doc_kind: str = "regulation"
    text: str


class IndexBody(BaseModel):
    corpus_path: Optional[str] = None
    documents: Optional[list[InlineDocument]] = None


def create_app(state: ServiceState) -> FastAPI:
    app = FastAPI(title="lexrag service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=state.config.service.cors_origins,
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(HTTPException)
    def versioned_errors(request: Request, exc: HTTPException):
        # Every response body, errors included, carries the schema version.
        return JSONResponse(status_code=exc.status_code,
                            content={"schema_version": SCHEMA_VERSION,
                                     "detail": exc.detail})

    def require_token(request: Request) -> None:
        token = state.config.service.bearer_token
        if not token:
            return
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    @app.get("/api/health")
    def health():
        kb = state.kb
        return {
            "schema_version": SCHEMA_VERSION,
            "status": "ok",
            "kb_loaded": kb is not None,
            "entries": len(kb) if kb is not None else 0,
        }

    @app.post("/api/query", dependencies=[Depends(require_token)])
    def query(body: QueryBody):
        if not body.text or not body.text.strip():
            raise HTTPException(status_code=400, detail="query text must be nonempty")
        kb = state.kb  # one version end to end
        if kb is None:
            raise HTTPException(status_code=409, detail="no knowledge base loaded")
        try:
            request = QueryRequest(
                text=body.text,
                k=body.k if body.k is not None else state.config.k,
                system_prompt_id=body.system_prompt_id or "default",
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        try:
            answer = answer_query(request, kb, state.embed_client, state.gen_client,
                                  budget_tokens=state.config.budget_tokens,
                                  system_prompts=state.prompts)
        except ClientError as exc:
            raise HTTPException(status_code=502, detail=str(exc)) from exc
        except NotFoundError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return {
            "schema_version": SCHEMA_VERSION,
            "answer": answer.text,
            "citations": [ref.canonical() for ref in answer.citations],
            "hits": [
                {
                    "rank": hit.rank,
                    "score": round(hit.score, 6),
                    "ref": hit.chunk.ref.canonical() if hit.chunk.ref else None,
                    "text": hit.chunk.text,
                    "entry_id": hit.entry_id,
                }
                for hit in answer.hits
            ],
            "model_id": answer.model_id,
            "latency_ms": answer.latency_ms,
        }

    @app.post("/api/index", dependencies=[Depends(require_token)])
    def index(body: IndexBody):
        items: list[tuple[str, str, str]] = []
        if body.documents:
            items = [(d.doc_id, d.doc_kind, d.text) for d in body.documents]
        elif body.corpus_path:
            try:
                found = corpus_mod.scan_statute_dir(body.corpus_path)
            except NotFoundError as exc:
                raise HTTPException(status_code=422,
                                    detail=[{"doc_id": body.corpus_path,
                                             "error": str(exc)}]) from exc
            items = [(doc_id, kind, path.read_text(encoding="utf-8"))
                     for doc_id, kind, path in found]
        else:
            raise HTTPException(status_code=422,
                                detail=[{"doc_id": None,
                                         "error": "corpus_path or documents required"}])

        documents, diagnostics = corpus_mod.parse_statute_texts(items)
        if diagnostics:
            raise HTTPException(status_code=422, detail=diagnostics)
        with state.index_lock:  # single writer; readers keep their captured KB
            built = corpus_mod.Corpus(documents)
            chunks = corpus_chunks(built, state.config.index_level, state.config.chunk)
            try:
                new_kb = kb_mod.index(chunks, state.embed_client)
            except LexragError as exc:
                raise HTTPException(status_code=422,
                                    detail=[{"doc_id": None, "error": str(exc)}]) from exc
            state.corpus = built
            state.kb = new_kb
        return {
            "schema_version": SCHEMA_VERSION,
            "entries": len(new_kb),
            "dim": new_kb.dim,
            "embedder_id": new_kb.embedder_id,
        }

    @app.get("/api/corpus/{ref_text:path}")
    def corpus_lookup(ref_text: str):
        corpus = state.corpus
        if corpus is None:
            raise HTTPException(status_code=404, detail="no corpus loaded")
        try:
            ref = parse_ref(ref_text)
            seg = corpus_mod.resolve_reference(corpus, ref)
        except NotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {
            "schema_version": SCHEMA_VERSION,
            "ref": seg.ref.canonical(),
            "display": seg.ref.display(),
            "level": seg.level,
            "text": seg.text,
            "rendered": corpus_mod.render_segment(seg),
        }

    return app
