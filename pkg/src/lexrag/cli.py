"""Command-line pipeline: parse, chunk, gen-dataset, split, index, query, eval, serve.

Exit codes: 0 success, 1 domain error (one "error:" line on stderr),
2 usage error. Every command is deterministic given identical inputs,
config, and seed; --mock-clients makes the whole pipeline runnable offline.
"""

from __future__ import annotations

import functools
import json
import sys
from pathlib import Path

import click

from . import chunker, corpus as corpus_mod, instructions, kb as kb_mod, metrics
from .clients import (
    EchoChatClient,
    FileBackedMockChatClient,
    HashEmbeddingClient,
    HttpChatClient,
    HttpEmbeddingClient,
)
from .config import AppConfig, load_config
from .engine import QueryRequest, answer_query, load_system_prompts
from .errors import LexragError, TargetUnreachableError


def domain_errors(fn):
    """Map LexragError to exit code 1 with a grep-able one-line message."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except LexragError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)

    return wrapper


def _write_meta(out_path, config: AppConfig, command: str) -> None:
    meta = {"command": command, "config": config.to_dict()}
    Path(f"{out_path}.meta.json").write_text(
        json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _gen_client(config: AppConfig):
    if config.mock_clients:
        return FileBackedMockChatClient(fixture_dir=config.clients.fixtures_dir,
                                        seed=config.seed,
                                        synthesize_on_miss=not config.clients.fixtures_strict)
    return HttpChatClient(config.clients.generation_endpoint,
                          config.clients.generation_model,
                          temperature=config.clients.temperature,
                          max_retries=config.max_retries)


def _echo_client(config: AppConfig):
    if config.mock_clients:
        return EchoChatClient()
    return HttpChatClient(config.clients.generation_endpoint,
                          config.clients.generation_model,
                          temperature=config.clients.temperature,
                          max_retries=config.max_retries)


def _embed_client(config: AppConfig):
    if config.mock_clients:
        return HashEmbeddingClient(dim=config.clients.mock_dim,
                                   seed=config.clients.mock_seed)
    return HttpEmbeddingClient(config.clients.embedding_endpoint,
                               config.clients.embedding_model,
                               max_retries=config.max_retries)


config_option = click.option("--config", "config_path", type=click.Path(exists=True),
                             default=None, help="JSON config file.")
seed_option = click.option("--seed", type=int, default=None, help="Deterministic seed.")
mock_option = click.option("--mock-clients", is_flag=True, default=None,
                           help="Use offline deterministic mock clients.")


@click.group()
def main():
    """Legal-corpus RAG toolkit."""


@main.command("parse")
@click.option("--in", "in_dir", required=True, type=click.Path(exists=True),
              help="Directory of statute .txt files.")
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--kind", type=click.Choice(corpus_mod.DOC_KINDS), default="regulation",
              help="doc_kind for files outside regulations/ or reference_laws/.")
@config_option
@domain_errors
def parse_cmd(in_dir, out_path, kind, config_path):
    """Parse statute text files into a corpus JSON."""
    config = load_config(config_path)
    items = [(doc_id, doc_kind, path.read_text(encoding="utf-8"))
             for doc_id, doc_kind, path in corpus_mod.scan_statute_dir(in_dir, kind)]
    documents, diagnostics = corpus_mod.parse_statute_texts(items)
    if diagnostics:
        for diag in diagnostics:
            click.echo(f"error: {diag['doc_id']}: {diag['error']}", err=True)
        sys.exit(1)
    built = corpus_mod.Corpus(documents)
    corpus_mod.save_corpus(built, out_path, extra={"config": config.to_dict()})
    click.echo(f"parsed {len(documents)} document(s) -> {out_path}")


@main.command("chunk")
@click.option("--in", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--level", type=click.Choice(["chapter", "article", "clause", "document"]),
              default="article")
@click.option("--chunk-size", type=int, default=None)
@click.option("--overlap", type=int, default=None)
@config_option
@domain_errors
def chunk_cmd(corpus_path, out_path, level, chunk_size, overlap, config_path):
    """Dump corpus chunks as JSONL for inspection."""
    if overlap is None and level != "document":
        overlap = 0  # hierarchy segments are never sliding windows
    config = load_config(config_path, {"chunk": {"size": chunk_size, "overlap": overlap}})
    built = corpus_mod.load_corpus(corpus_path)
    chunks = corpus_chunks(built, level, config.chunk)
    count = chunker.dump_chunks(chunks, out_path)
    _write_meta(out_path, config, "chunk")
    click.echo(f"wrote {count} chunk(s) -> {out_path}")


def corpus_chunks(built: corpus_mod.Corpus, level: str, cfg: chunker.ChunkConfig):
    """Chunk a corpus at a hierarchy level, or as sliding windows per document."""
    if level == "document":
        chunks = []
        for doc in built.documents:
            text = instructions.document_text(doc)
            chunks.extend(chunker.chunk_text(text, cfg, ref=None, id_prefix=doc.id,
                                             seq_start=len(chunks)))
        return chunks
    segments = []
    for doc in built.documents:
        segments.extend(corpus_mod.segment(doc, level))
    return chunker.chunk_segments(segments, cfg.size)


@main.command("gen-dataset")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--targets", "targets_json", default=None,
              help='JSON map of task -> record count, e.g. \'{"legal_qa": 10}\'.')
@click.option("--items-per-call", type=int, default=None)
@click.option("--max-retries", type=int, default=None)
@click.option("--manifest", "manifest_path", type=click.Path(), default=None,
              help="Also write a fine-tuning manifest for the dataset.")
@click.option("--base-model", default="llama2-7b")
@config_option
@seed_option
@mock_option
@domain_errors
def gen_dataset_cmd(corpus_path, out_path, targets_json, items_per_call, max_retries,
                    manifest_path, base_model, config_path, seed, mock_clients):
    """Generate the instruction dataset for all configured tasks."""
    overrides = {"seed": seed, "mock_clients": mock_clients,
                 "items_per_call": items_per_call, "max_retries": max_retries}
    if targets_json:
        overrides["targets"] = json.loads(targets_json)
    config = load_config(config_path, overrides)
    built = corpus_mod.load_corpus(corpus_path)
    job = instructions.GenerationJobConfig(
        targets={instructions.TaskKind(k): v for k, v in config.targets.items()},
        items_per_call=config.items_per_call,
        max_retries=config.max_retries,
        seed=config.seed,
    )
    client = _gen_client(config)
    try:
        pairs = instructions.generate_dataset(built, job, config.chunk, client,
                                              parallelism=config.parallelism)
    except TargetUnreachableError as exc:
        instructions.export_jsonl(exc.partial, out_path)
        _write_meta(out_path, config, "gen-dataset")
        click.echo(f"wrote {len(exc.partial)} partial record(s) -> {out_path}", err=True)
        raise
    count = instructions.export_jsonl(pairs, out_path)
    _write_meta(out_path, config, "gen-dataset")
    click.echo(f"wrote {count} record(s) -> {out_path}")
    if manifest_path:
        manifest = instructions.build_training_manifest(out_path, base_model)
        instructions.export_training_manifest(manifest, manifest_path)
        click.echo(f"manifest -> {manifest_path}")


@main.command("split")
@click.option("--in", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--test-fraction", type=float, default=None, show_default="0.2")
@click.option("--out-train", required=True, type=click.Path())
@click.option("--out-test", required=True, type=click.Path())
@config_option
@seed_option
@domain_errors
def split_cmd(dataset_path, test_fraction, out_train, out_test, config_path, seed):
    """Split a dataset into stratified train/test JSONL files."""
    config = load_config(config_path, {"seed": seed, "test_fraction": test_fraction})
    pairs = instructions.load_jsonl(dataset_path)
    train, test = instructions.split_dataset(pairs, config.test_fraction, config.seed)
    instructions.export_jsonl(train, out_train)
    instructions.export_jsonl(test, out_test)
    _write_meta(out_test, config, "split")
    click.echo(f"train={len(train)} -> {out_train}; test={len(test)} -> {out_test}")


@main.command("index")
@click.option("--corpus", "corpus_path", required=True, type=click.Path(exists=True))
@click.option("--kb", "kb_path", required=True, type=click.Path())
@click.option("--level", type=click.Choice(["chapter", "article", "clause"]),
              default=None, show_default="article")
@click.option("--chunk-size", type=int, default=None)
@config_option
@mock_option
@domain_errors
def index_cmd(corpus_path, kb_path, level, chunk_size, config_path, mock_clients):
    """Embed corpus chunks and persist the knowledge base."""
    config = load_config(config_path, {"mock_clients": mock_clients,
                                       "index_level": level,
                                       "chunk": {"size": chunk_size, "overlap": 0}})
    built = corpus_mod.load_corpus(corpus_path)
    chunks = corpus_chunks(built, config.index_level, config.chunk)
    knowledge = kb_mod.index(chunks, _embed_client(config))
    written = kb_mod.save(knowledge, kb_path)
    _write_meta(kb_path, config, "index")
    click.echo(f"indexed {len(knowledge)} entr(ies), dim {knowledge.dim}, "
               f"{written} bytes -> {kb_path}")


@main.command("query")
@click.argument("text")
@click.option("--kb", "kb_path", required=True, type=click.Path(exists=True))
@click.option("--k", type=int, default=None, show_default="4")
@click.option("--system-prompt-id", default="default")
@click.option("--prompts", "prompts_path", type=click.Path(exists=True), default=None)
@config_option
@mock_option
@domain_errors
def query_cmd(text, kb_path, k, system_prompt_id, prompts_path, config_path, mock_clients):
    """Answer one query against a persisted knowledge base."""
    config = load_config(config_path, {"mock_clients": mock_clients, "k": k,
                                       "prompts_path": prompts_path})
    knowledge = kb_mod.load(kb_path)
    prompts = load_system_prompts(config.prompts_path)
    request = QueryRequest(text=text, k=config.k, system_prompt_id=system_prompt_id)
    answer = answer_query(request, knowledge, _embed_client(config),
                          _echo_client(config), budget_tokens=config.budget_tokens,
                          system_prompts=prompts)
    payload = {
        "answer": answer.text,
        "citations": [ref.canonical() for ref in answer.citations],
        "hits": [
            {"rank": h.rank, "score": round(h.score, 6),
             "ref": h.chunk.ref.canonical() if h.chunk.ref else None,
             "text": h.chunk.text}
            for h in answer.hits
        ],
        "model_id": answer.model_id,
    }
    click.echo(json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True))


@main.command("eval")
@click.option("--outputs", "outputs_path", required=True, type=click.Path(exists=True))
@click.option("--test-set", "test_set_path", required=True, type=click.Path(exists=True))
@click.option("--report", "report_path", type=click.Path(), default=None)
@click.option("--model", "model_label", default="-", help="Label for the results table.")
@click.option("--size", "size_label", default="-")
@click.option("--method", "method_label", default="-",
              help='Workflow label, e.g. "RAG", "Fine-tune", "Fine-tune + RAG".')
@click.option("--results", "results_path", type=click.Path(), default=None,
              help="JSON list of labeled rows; appends this run and prints the table.")
@config_option
@domain_errors
def eval_cmd(outputs_path, test_set_path, report_path, model_label, size_label,
             method_label, results_path, config_path):
    """Score model outputs with BLEU/METEOR against a test set."""
    config = load_config(config_path)
    report = metrics.evaluate_run(outputs_path, test_set_path, config.eval)
    if report_path:
        payload = report.to_dict()
        payload["config"] = config.to_dict()
        Path(report_path).write_text(
            json.dumps(payload, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    click.echo(f"examples={len(report.examples)} mean_bleu={report.mean_bleu:.6f} "
               f"mean_meteor={report.mean_meteor:.6f} missing={len(report.missing)}")
    if results_path:
        rows = []
        results_file = Path(results_path)
        if results_file.exists():
            rows = json.loads(results_file.read_text(encoding="utf-8"))
        rows.append({"model": model_label, "size": size_label, "method": method_label,
                     "bleu": report.mean_bleu, "meteor": report.mean_meteor})
        results_file.write_text(json.dumps(rows, indent=2, sort_keys=True) + "\n",
                                encoding="utf-8")
        click.echo(metrics.render_results_table(rows))


@main.command("serve")
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--kb", "kb_path", type=click.Path(exists=True), default=None,
              help="Knowledge base to preload.")
@click.option("--corpus", "corpus_path", type=click.Path(exists=True), default=None,
              help="Corpus JSON to preload for /api/corpus lookups.")
@config_option
@mock_option
@domain_errors
def serve_cmd(host, port, kb_path, corpus_path, config_path, mock_clients):
    """Run the HTTP query/index service."""
    import uvicorn

    from .service import ServiceState, create_app

    config = load_config(config_path, {"mock_clients": mock_clients,
                                       "service": {"host": host, "port": port}})
    state = ServiceState(config=config,
                         embed_client=_embed_client(config),
                         gen_client=_echo_client(config),
                         prompts=load_system_prompts(config.prompts_path))
    if kb_path:
        state.kb = kb_mod.load(kb_path)
    if corpus_path:
        state.corpus = corpus_mod.load_corpus(corpus_path)
    uvicorn.run(create_app(state), host=config.service.host, port=config.service.port)


if __name__ == "__main__":
    main()
