import json

from click.testing import CliRunner

from lexrag.cli import main

from .util import DESK_CORPUS


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_unknown_subcommand_exits_2():
    result = invoke("definitely-not-a-command")
    assert result.exit_code == 2


def test_parse_missing_dir_is_usage_error(tmp_path):
    result = invoke("parse", "--in", str(tmp_path / "nope"), "--out", str(tmp_path / "c.json"))
    assert result.exit_code == 2


def test_parse_dir_without_statutes_is_domain_error(tmp_path):
    result = invoke("parse", "--in", str(tmp_path), "--out", str(tmp_path / "c.json"))
    assert result.exit_code == 1
    assert result.stderr.startswith("error:")


def test_full_offline_pipeline(tmp_path):
    corpus_path = tmp_path / "corpus.json"
    result = invoke("parse", "--in", str(DESK_CORPUS), "--out", str(corpus_path))
    assert result.exit_code == 0, result.output
    payload = json.loads(corpus_path.read_text())
    assert len(payload["documents"]) >= 3
    assert "config" in payload
    kinds = {d["doc_kind"] for d in payload["documents"]}
    assert kinds == {"regulation", "reference_law"}

    chunks_path = tmp_path / "chunks.jsonl"
    result = invoke("chunk", "--in", str(corpus_path), "--out", str(chunks_path),
                    "--level", "article", "--chunk-size", "64")
    assert result.exit_code == 0, result.output
    lines = [json.loads(l) for l in chunks_path.read_text().splitlines()]
    assert lines and all(set(l) == {"id", "seq", "ref", "token_count", "text"} for l in lines)
    assert (tmp_path / "chunks.jsonl.meta.json").exists()

    kb_path = tmp_path / "kb.lkb"
    result = invoke("index", "--corpus", str(corpus_path), "--kb", str(kb_path),
                    "--mock-clients")
    assert result.exit_code == 0, result.output
    assert kb_path.stat().st_size > 0

    result = invoke("query", "ketentuan biaya pendidikan", "--kb", str(kb_path),
                    "--k", "3", "--mock-clients")
    assert result.exit_code == 0, result.output
    answer = json.loads(result.output)
    assert len(answer["hits"]) == 3
    assert answer["citations"]
    assert all(h["score"] == round(h["score"], 6) for h in answer["hits"])


def test_index_and_query_are_idempotent(tmp_path):
    corpus_path = tmp_path / "corpus.json"
    assert invoke("parse", "--in", str(DESK_CORPUS), "--out", str(corpus_path)).exit_code == 0
    kb_a, kb_b = tmp_path / "a.lkb", tmp_path / "b.lkb"
    assert invoke("index", "--corpus", str(corpus_path), "--kb", str(kb_a),
                  "--mock-clients").exit_code == 0
    assert invoke("index", "--corpus", str(corpus_path), "--kb", str(kb_b),
                  "--mock-clients").exit_code == 0
    assert kb_a.read_bytes() == kb_b.read_bytes()

    first = invoke("query", "standar pendidikan", "--kb", str(kb_a), "--mock-clients")
    second = invoke("query", "standar pendidikan", "--kb", str(kb_a), "--mock-clients")
    assert first.output == second.output


def test_gen_dataset_split_and_manifest(tmp_path):
    corpus_path = tmp_path / "corpus.json"
    assert invoke("parse", "--in", str(DESK_CORPUS), "--out", str(corpus_path)).exit_code == 0

    dataset = tmp_path / "dataset.jsonl"
    manifest = tmp_path / "manifest.json"
    targets = json.dumps({"legal_qa": 10, "summarization": 5})
    result = invoke("gen-dataset", "--corpus", str(corpus_path), "--out", str(dataset),
                    "--targets", targets, "--mock-clients", "--seed", "3",
                    "--manifest", str(manifest))
    assert result.exit_code == 0, result.output
    rows = [json.loads(l) for l in dataset.read_text().splitlines()]
    assert len(rows) == 15
    manifest_payload = json.loads(manifest.read_text())
    assert manifest_payload["epochs"] == 3
    assert manifest_payload["max_source_tokens"] == 2048

    train, test = tmp_path / "train.jsonl", tmp_path / "test.jsonl"
    result = invoke("split", "--in", str(dataset), "--test-fraction", "0.2",
                    "--seed", "1", "--out-train", str(train), "--out-test", str(test))
    assert result.exit_code == 0, result.output
    n_train = len(train.read_text().splitlines())
    n_test = len(test.read_text().splitlines())
    assert n_train + n_test == 15
    assert n_test == 3  # floor(0.2*10) + floor(0.2*5)


def test_gen_dataset_unreachable_writes_partial_and_fails(tmp_path):
    corpus_path = tmp_path / "corpus.json"
    assert invoke("parse", "--in", str(DESK_CORPUS), "--out", str(corpus_path)).exit_code == 0
    fixtures = tmp_path / "fixtures"
    fixtures.mkdir()
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "mock_clients": True,
        "clients": {"fixtures_dir": str(fixtures), "fixtures_strict": True},
    }))
    dataset = tmp_path / "dataset.jsonl"
    result = invoke("gen-dataset", "--corpus", str(corpus_path), "--out", str(dataset),
                    "--targets", json.dumps({"legal_qa": 4}), "--config", str(config),
                    "--max-retries", "0")
    assert result.exit_code == 1
    assert "error:" in result.stderr
    assert "legal_qa=4" in result.stderr
    assert dataset.exists() and dataset.read_text() == ""  # partial (empty) still written


def test_serve_preloads_kb_and_corpus(tmp_path, monkeypatch):
    corpus_path, kb_path = tmp_path / "corpus.json", tmp_path / "kb.lkb"
    assert invoke("parse", "--in", str(DESK_CORPUS), "--out", str(corpus_path)).exit_code == 0
    assert invoke("index", "--corpus", str(corpus_path), "--kb", str(kb_path),
                  "--mock-clients").exit_code == 0

    captured = {}

    def fake_run(app, host, port):
        captured["app"], captured["host"], captured["port"] = app, host, port

    import uvicorn
    monkeypatch.setattr(uvicorn, "run", fake_run)
    result = invoke("serve", "--kb", str(kb_path), "--corpus", str(corpus_path),
                    "--mock-clients", "--port", "9999")
    assert result.exit_code == 0, result.output
    assert captured["port"] == 9999

    from fastapi.testclient import TestClient
    client = TestClient(captured["app"])
    health = client.get("/api/health").json()
    assert health["kb_loaded"] is True and health["entries"] > 0
    assert client.get("/api/corpus/PP-57-2021/1/1").status_code == 200


def test_eval_command_with_results_table(tmp_path):
    test_set = tmp_path / "test.jsonl"
    rows = [
        {"input": "q1", "output": "jawaban satu dua tiga", "task": "legal_qa"},
        {"input": "q2", "output": "jawaban empat lima enam", "task": "summarization"},
    ]
    test_set.write_text("".join(json.dumps(r) + "\n" for r in rows))

    from lexrag.metrics import example_id_for
    outputs = tmp_path / "outputs.jsonl"
    outputs.write_text("".join(json.dumps({
        "example_id": example_id_for(r["task"], r["input"]),
        "hypothesis": r["output"],
    }) + "\n" for r in rows))

    report = tmp_path / "report.json"
    results = tmp_path / "results.json"
    result = invoke("eval", "--outputs", str(outputs), "--test-set", str(test_set),
                    "--report", str(report), "--model", "desk", "--size", "7B",
                    "--method", "Fine-tune + RAG", "--results", str(results))
    assert result.exit_code == 0, result.output
    assert "mean_bleu=1.000000" in result.output
    assert "Fine-tune + RAG" in result.output
    payload = json.loads(report.read_text())
    assert payload["mean_bleu"] == 1.0
    assert "config" in payload
