"""Vectorized knowledge base: embed chunks, score by cosine, persist to disk.

Retrieval is an exhaustive scan over all entries (exact by construction, no
approximate index). Vector values are float32 end to end so the on-disk
round trip is bit-exact; similarity math runs in float64.

File format "LKB1": magic, then little-endian header (format version u32,
dim u32, entry count u64, embedder id as u32-length-prefixed UTF-8), then
per entry: id, chunk JSON blob (both length-prefixed), dim float32 values.
A CRC-32 of all preceding bytes closes the file.
"""

from __future__ import annotations

import json
import struct
import time
import warnings
import zlib
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from .chunker import Chunk
from .errors import (
    AllVectorsZeroError,
    CorruptFileError,
    DimMismatchError,
    EmptyTextError,
    VersionMismatchError,
    ZeroVectorError,
)
from .refs import parse_ref

MAGIC = b"LKB1"
FORMAT_VERSION = 1


class ZeroVectorWarning(UserWarning):
    """A chunk embedded to the zero vector and was left out of the index."""


@dataclass
class EmbeddingVector:
    dim: int
    values: list[float]
    norm: float

    def __post_init__(self):
        if self.dim <= 0 or len(self.values) != self.dim:
            raise DimMismatchError(f"expected {self.dim} values, got {len(self.values)}")

    @classmethod
    def from_values(cls, values) -> "EmbeddingVector":
        """Build a vector, quantizing to float32 and caching the norm."""
        quantized = np.asarray(values, dtype=np.float32).astype(np.float64)
        return cls(dim=int(quantized.size), values=[float(v) for v in quantized],
                   norm=float(np.sqrt(np.dot(quantized, quantized))))


@dataclass
class KbEntry:
    id: str
    chunk: Chunk
    vector: EmbeddingVector


@dataclass
class RetrievalHit:
    entry_id: str
    score: float
    rank: int
    chunk: Chunk


class EmbeddingClient(Protocol):
    identity: str

    @property
    def dim(self) -> int: ...

    def embed(self, texts: list[str]) -> list[EmbeddingVector]: ...


class KnowledgeBase:
    """Immutable embedding index; any number of concurrent readers."""

    def __init__(self, dim: int, entries: list[KbEntry], embedder_id: str,
                 created_at: float | None = None):
        for entry in entries:
            if entry.vector.dim != dim:
                raise DimMismatchError(
                    f"entry {entry.id!r} has dim {entry.vector.dim}, index has {dim}")
        self.dim = dim
        self.entries = list(entries)
        self.embedder_id = embedder_id
        self.created_at = created_at if created_at is not None else time.time()
        if entries:
            self._matrix = np.array([e.vector.values for e in entries], dtype=np.float64)
            self._norms = np.array([e.vector.norm for e in entries], dtype=np.float64)
        else:
            self._matrix = np.zeros((0, dim), dtype=np.float64)
            self._norms = np.zeros(0, dtype=np.float64)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other) -> bool:
        # created_at is provenance, not content; the file format has no
        # timestamp field, so structural equality ignores it.
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (self.dim == other.dim
                and self.embedder_id == other.embedder_id
                and self.entries == other.entries)


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dim != b.dim:
        raise DimMismatchError(f"dims differ: {a.dim} vs {b.dim}")
    if a.norm == 0.0 or b.norm == 0.0:
        raise ZeroVectorError("cosine is undefined for zero vectors")
    dot = float(np.dot(np.asarray(a.values), np.asarray(b.values)))
    return dot / (a.norm * b.norm)


def index(chunks: list[Chunk], client: EmbeddingClient) -> KnowledgeBase:
    """Embed chunks and build a knowledge base, one entry per chunk in order.

    Chunks that embed to the zero vector are skipped with a
    ZeroVectorWarning; if nothing survives, AllVectorsZeroError is raised.
    """
    if not chunks:
        raise EmptyTextError("no chunks to index")
    vectors = client.embed([c.text for c in chunks])
    if len(vectors) != len(chunks):
        raise DimMismatchError(
            f"embedder returned {len(vectors)} vectors for {len(chunks)} chunks")
    entries: list[KbEntry] = []
    seen: set[str] = set()
    for chunk, vector in zip(chunks, vectors):
        if vector.norm == 0.0:
            warnings.warn(f"chunk {chunk.id!r} embedded to a zero vector; skipped",
                          ZeroVectorWarning, stacklevel=2)
            continue
        if chunk.id in seen:
            raise ValueError(f"duplicate chunk id {chunk.id!r}")
        seen.add(chunk.id)
        entries.append(KbEntry(id=chunk.id, chunk=chunk, vector=vector))
    if not entries:
        raise AllVectorsZeroError("every chunk embedded to a zero vector")
    return KnowledgeBase(dim=entries[0].vector.dim, entries=entries,
                         embedder_id=client.identity)


def search_topk(kb: KnowledgeBase, query: EmbeddingVector, k: int) -> list[RetrievalHit]:
    """The k highest-cosine entries, score descending, insertion order on ties."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if query.dim != kb.dim:
        raise DimMismatchError(f"query dim {query.dim} vs index dim {kb.dim}")
    if query.norm == 0.0:
        raise ZeroVectorError("cannot search with a zero query vector")
    if not kb.entries:
        return []
    q = np.asarray(query.values, dtype=np.float64)
    scores = (kb._matrix @ q) / (kb._norms * query.norm)
    order = np.argsort(-scores, kind="stable")[:k]
    return [
        RetrievalHit(entry_id=kb.entries[i].id, score=float(scores[i]),
                     rank=rank, chunk=kb.entries[i].chunk)
        for rank, i in enumerate(order.tolist(), start=1)
    ]


# --- persistence ---

def _chunk_blob(chunk: Chunk) -> bytes:
    record = {
        "id": chunk.id,
        "seq": chunk.seq,
        "ref": chunk.ref.canonical() if chunk.ref else None,
        "token_count": chunk.token_count,
        "text": chunk.text,
    }
    return json.dumps(record, ensure_ascii=False, sort_keys=True).encode("utf-8")


def _chunk_from_blob(blob: bytes) -> Chunk:
    rec = json.loads(blob.decode("utf-8"))
    return Chunk(id=rec["id"], text=rec["text"], seq=rec["seq"],
                 ref=parse_ref(rec["ref"]) if rec.get("ref") else None,
                 token_count=rec["token_count"])


def _pack_str(value: str) -> bytes:
    raw = value.encode("utf-8")
    return struct.pack("<I", len(raw)) + raw


def save(kb: KnowledgeBase, path) -> int:
    """Write the knowledge base; returns bytes written."""
    parts = [MAGIC, struct.pack("<IIQ", FORMAT_VERSION, kb.dim, len(kb.entries)),
             _pack_str(kb.embedder_id)]
    for entry in kb.entries:
        parts.append(_pack_str(entry.id))
        blob = _chunk_blob(entry.chunk)
        parts.append(struct.pack("<I", len(blob)) + blob)
        parts.append(np.asarray(entry.vector.values, dtype="<f4").tobytes())
    body = b"".join(parts)
    data = body + struct.pack("<I", zlib.crc32(body))
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.data):
            raise CorruptFileError("file truncated mid-record")
        out = self.data[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def string(self) -> str:
        raw = self.take(self.u32())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise CorruptFileError("undecodable string field") from exc


def load(path) -> KnowledgeBase:
    """Read a knowledge base file, verifying magic and checksum first."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < len(MAGIC) + 4:
        raise CorruptFileError("file too short")
    if data[:len(MAGIC)] != MAGIC:
        raise CorruptFileError("bad magic")
    stored_crc = struct.unpack("<I", data[-4:])[0]
    if zlib.crc32(data[:-4]) != stored_crc:
        raise CorruptFileError("checksum mismatch")

    reader = _Reader(data[:-4])
    reader.take(len(MAGIC))
    version = reader.u32()
    if version != FORMAT_VERSION:
        raise VersionMismatchError(f"format version {version} is not supported")
    dim = reader.u32()
    count = reader.u64()
    if dim <= 0:
        raise CorruptFileError(f"nonsensical dim {dim}")
    embedder_id = reader.string()
    entries: list[KbEntry] = []
    for _ in range(count):
        entry_id = reader.string()
        blob = reader.take(reader.u32())
        try:
            chunk = _chunk_from_blob(blob)
        except (ValueError, KeyError, TypeError) as exc:
            raise CorruptFileError("undecodable chunk record") from exc
        raw = reader.take(dim * 4)
        values = np.frombuffer(raw, dtype="<f4")
        entries.append(KbEntry(id=entry_id, chunk=chunk,
                               vector=EmbeddingVector.from_values(values)))
    if reader.pos != len(reader.data):
        raise CorruptFileError("trailing bytes after last entry")
    try:
        return KnowledgeBase(dim=dim, entries=entries, embedder_id=embedder_id)
    except DimMismatchError as exc:
        raise CorruptFileError(str(exc)) from exc
