import random

import pytest

from lexrag.chunker import Chunk, ChunkConfig, chunk_segments, chunk_text, dump_chunks, load_chunks
from lexrag.corpus import parse_document, segment
from lexrag.errors import EmptyTextError, InvalidConfigError
from lexrag.refs import SourceRef

TEN_TOKENS = "t0 t1 t2 t3 t4 t5 t6 t7 t8 t9"


def test_no_overlap_sizes():
    chunks = chunk_text(TEN_TOKENS, ChunkConfig(size=4, overlap=0))
    assert [c.token_count for c in chunks] == [4, 4, 2]
    assert [c.seq for c in chunks] == [0, 1, 2]


def test_short_text_single_chunk():
    chunks = chunk_text("a b c", ChunkConfig(size=8, overlap=0))
    assert len(chunks) == 1
    assert chunks[0].text == "a b c"


def test_overlap_stride_offsets():
    chunks = chunk_text(TEN_TOKENS, ChunkConfig(size=4, overlap=2))
    starts = [c.text.split()[0] for c in chunks]
    assert starts == ["t0", "t2", "t4", "t6", "t8"]
    assert chunks[-1].token_count == 2
    assert all(c.token_count == 4 for c in chunks[:-1])


def test_invalid_configs():
    with pytest.raises(InvalidConfigError):
        ChunkConfig(size=0, overlap=0)
    with pytest.raises(InvalidConfigError):
        ChunkConfig(size=4, overlap=4)
    with pytest.raises(InvalidConfigError):
        ChunkConfig(size=4, overlap=-1)


def test_empty_text():
    with pytest.raises(EmptyTextError):
        chunk_text("   ", ChunkConfig(size=4, overlap=0))


def test_coverage_every_token_present():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 300)
        size = rng.randint(1, 50)
        overlap = rng.randint(0, size - 1)
        tokens = [f"w{i}" for i in range(n)]
        chunks = chunk_text(" ".join(tokens), ChunkConfig(size=size, overlap=overlap))
        covered = set()
        for c in chunks:
            covered.update(c.text.split())
        assert covered == set(tokens)
        assert [c.seq for c in chunks] == list(range(len(chunks)))


def test_reconstruction_with_zero_overlap():
    rng = random.Random(11)
    for _ in range(50):
        n = rng.randint(1, 500)
        text = " \n ".join(f"tok{rng.randint(0, 99)}" for _ in range(n))
        size = rng.randint(1, 64)
        chunks = chunk_text(text, ChunkConfig(size=size, overlap=0))
        assert " ".join(c.text for c in chunks) == " ".join(text.split())


def test_token_count_matches_text():
    for c in chunk_text(TEN_TOKENS, ChunkConfig(size=3, overlap=1)):
        assert c.token_count == len(c.text.split())


def test_chunk_segments_passthrough_preserves_refs():
    doc = parse_document("Pasal 1\n(1) A a.\n(2) B b.\n(3) C c.", "PP-X")
    segments = segment(doc, "clause")
    chunks = chunk_segments(segments, max_size=10)
    assert len(chunks) == 3
    assert [c.ref for c in chunks] == [s.ref for s in segments]
    assert [c.seq for c in chunks] == [0, 1, 2]


def test_chunk_segments_subchunks_oversize():
    doc = parse_document(f"Pasal 1\n(1) {TEN_TOKENS}", "PP-X")
    chunks = chunk_segments(segment(doc, "clause"), max_size=4)
    assert len(chunks) == 3
    ref = SourceRef("PP-X", article_number=1, clause_number=1)
    assert all(c.ref == ref for c in chunks)
    assert [c.seq for c in chunks] == [0, 1, 2]
    assert [c.token_count for c in chunks] == [4, 4, 2]


def test_chunk_segments_preamble_only_article():
    doc = parse_document("Pasal 1\nhanya pembukaan saja.", "PP-X")
    chunks = chunk_segments(segment(doc, "article"), max_size=16)
    assert len(chunks) == 1
    assert chunks[0].text == "hanya pembukaan saja."


def test_chunk_segments_empty_list():
    with pytest.raises(EmptyTextError):
        chunk_segments([], max_size=4)


def test_unique_ids_across_build():
    doc = parse_document(f"Pasal 1\n(1) {TEN_TOKENS}\n(2) short one", "PP-X")
    chunks = chunk_segments(segment(doc, "clause"), max_size=4)
    ids = [c.id for c in chunks]
    assert len(ids) == len(set(ids))


def test_jsonl_dump_round_trip(tmp_path):
    doc = parse_document("Pasal 1\n(1) A a.\n(2) B b.", "PP-X")
    chunks = chunk_segments(segment(doc, "clause"), max_size=8)
    path = tmp_path / "chunks.jsonl"
    assert dump_chunks(chunks, path) == 2
    loaded = load_chunks(path)
    assert loaded == chunks
    assert all(isinstance(c, Chunk) for c in loaded)
