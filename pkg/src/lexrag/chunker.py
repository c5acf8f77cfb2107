"""Fixed-size token chunking with configurable overlap.

A token is a whitespace-delimited word; no model tokenizer is involved, so
counts are exact and reproducible. Chunk i starts at token offset
i * (size - overlap) and chunks are emitted while that offset is inside the
text, so with overlap > 0 the tail may produce a short final chunk.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .corpus import Segment
from .errors import EmptyTextError, InvalidConfigError
from .refs import SourceRef, parse_ref


@dataclass(frozen=True)
class ChunkConfig:
    size: int = 512
    overlap: int = 64

    def __post_init__(self):
        if self.size <= 0:
            raise InvalidConfigError(f"chunk size must be positive, got {self.size}")
        if self.overlap < 0 or self.overlap >= self.size:
            raise InvalidConfigError(
                f"overlap must satisfy 0 <= overlap < size, got {self.overlap} vs {self.size}"
            )


@dataclass
class Chunk:
    id: str
    text: str
    seq: int
    ref: SourceRef | None
    token_count: int


def token_count(text: str) -> int:
    return len(text.split())


def chunk_text(text: str, cfg: ChunkConfig, *, ref: SourceRef | None = None,
               id_prefix: str = "text", seq_start: int = 0) -> list[Chunk]:
    """Split text into overlapping windows of cfg.size tokens.

    Every chunk except possibly the last has exactly cfg.size tokens, and
    with overlap=0 the space-joined chunk texts reproduce the
    space-normalized input.
    """
    tokens = text.split()
    if not tokens:
        raise EmptyTextError("cannot chunk empty text")
    stride = cfg.size - cfg.overlap
    chunks: list[Chunk] = []
    offset = 0
    i = 0
    while offset < len(tokens):
        window = tokens[offset:offset + cfg.size]
        seq = seq_start + i
        chunks.append(Chunk(
            id=f"{id_prefix}#{seq}",
            text=" ".join(window),
            seq=seq,
            ref=ref,
            token_count=len(window),
        ))
        offset += stride
        i += 1
    return chunks


def chunk_segments(segments: list[Segment], max_size: int) -> list[Chunk]:
    """Wrap hierarchy segments as chunks, sub-chunking anything oversize.

    Segments that fit in max_size tokens become one chunk each; larger ones
    are split by chunk_text with overlap 0, every piece inheriting the
    segment's ref. seq increases across the whole output.
    """
    if not segments:
        raise EmptyTextError("no segments to chunk")
    cfg = ChunkConfig(size=max_size, overlap=0)
    out: list[Chunk] = []
    for seg in segments:
        prefix = seg.ref.canonical()
        n = token_count(seg.text)
        if n <= max_size:
            out.append(Chunk(
                id=f"{prefix}#{len(out)}",
                text=" ".join(seg.text.split()),
                seq=len(out),
                ref=seg.ref,
                token_count=n,
            ))
        else:
            pieces = chunk_text(seg.text, cfg, ref=seg.ref,
                                id_prefix=prefix, seq_start=len(out))
            out.extend(pieces)
    return out


# --- JSONL dump (inspection format) ---

def dump_chunks(chunks: list[Chunk], path) -> int:
    with open(path, "w", encoding="utf-8") as fh:
        for ch in chunks:
            record = {
                "id": ch.id,
                "seq": ch.seq,
                "ref": ch.ref.canonical() if ch.ref else None,
                "token_count": ch.token_count,
                "text": ch.text,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")
    return len(chunks)


def load_chunks(path) -> list[Chunk]:
    chunks = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            chunks.append(Chunk(
                id=rec["id"],
                text=rec["text"],
                seq=rec["seq"],
                ref=parse_ref(rec["ref"]) if rec.get("ref") else None,
                token_count=rec["token_count"],
            ))
    return chunks
