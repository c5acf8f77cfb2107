"""Shared test helpers: synthetic statute generation and parse oracles.

The statute generator produces messy but grammar-conforming text (blank
lines, split sentences, double spaces) from a lexicon that can never collide
with marker lines. The oracles here re-derive expectations independently of
the production parser.
"""

from __future__ import annotations

import random
import re
from pathlib import Path

import lexrag
from lexrag.refs import int_to_roman

DESK_CORPUS = Path(lexrag.__file__).parent / "data" / "desk_corpus"

WORDS = [
    "pendidikan", "satuan", "standar", "biaya", "peserta", "didik",
    "pemerintah", "daerah", "masyarakat", "wajib", "belajar", "evaluasi",
    "kurikulum", "mutu", "layanan", "anggaran", "nasional", "ketentuan",
    "pelaksanaan", "menteri", "paling", "sedikit", "tahun", "dana",
    "bantuan", "teknis", "terhadap", "dalam", "dengan", "untuk", "yang",
    "dan", "atau", "pada", "dapat", "harus", "berhak", "pembinaan",
    "pengawasan", "program", "sekolah", "guru", "penilaian", "sarana",
]


def _sentence(rng: random.Random, low: int = 3, high: int = 10) -> str:
    words = [rng.choice(WORDS) for _ in range(rng.randint(low, high))]
    text = " ".join(words)
    return text[0].upper() + text[1:] + "."


def _messy_lines(rng: random.Random, text: str) -> list[str]:
    """Split text over 1-3 lines and inject double spaces / indentation."""
    words = text.split()
    pieces = []
    while words:
        take = rng.randint(2, max(2, len(words)))
        chunk = " ".join(words[:take])
        if rng.random() < 0.3:
            chunk = chunk.replace(" ", "  ", 1)
        if rng.random() < 0.2:
            chunk = "  " + chunk
        pieces.append(chunk)
        words = words[take:]
    return pieces


def random_statute(rng: random.Random) -> str:
    """One grammar-conforming synthetic statute with noisy whitespace."""
    lines: list[str] = []
    for _ in range(rng.randint(0, 2)):
        lines.append(_sentence(rng, 3, 7).upper().rstrip("."))
    explicit_chapters = rng.random() < 0.7
    n_chapters = rng.randint(1, 4) if explicit_chapters else 1
    article_number = 0
    chapter_number = 0
    for _ in range(n_chapters):
        if explicit_chapters:
            chapter_number += rng.randint(1, 2)
            lines.append(f"BAB {int_to_roman(chapter_number)}")
            if rng.random() < 0.8:
                lines.append(" ".join(rng.choice(WORDS).upper()
                                      for _ in range(rng.randint(1, 4))))
            if rng.random() < 0.2:
                lines.append(" ".join(rng.choice(WORDS).upper()
                                      for _ in range(rng.randint(1, 3))))
        n_articles = rng.randint(0 if explicit_chapters else 1, 4)
        for _ in range(n_articles):
            article_number += rng.randint(1, 3)
            lines.append(f"Pasal {article_number}")
            has_preamble = rng.random() < 0.5
            n_clauses = rng.randint(0 if has_preamble else 1, 5)
            if has_preamble:
                lines.extend(_messy_lines(rng, _sentence(rng)))
            clause_number = 0
            for _ in range(n_clauses):
                clause_number += rng.randint(1, 2)
                clause_lines = _messy_lines(rng, _sentence(rng, 4, 14))
                lines.append(f"({clause_number}) {clause_lines[0]}")
                lines.extend(clause_lines[1:])
            if rng.random() < 0.3:
                lines.append("")
        if rng.random() < 0.3:
            lines.append("")
    return "\n".join(lines)


# --- independent oracles ---

_CHAPTER = re.compile(r"^BAB\s+([IVXLC]+)$")
_ARTICLE = re.compile(r"^Pasal\s+(\d+)$")
_CLAUSE = re.compile(r"^\((\d+)\)\s+")


def _squash(text: str) -> str:
    return "".join(text.split())


def non_marker_chars(raw_text: str) -> str:
    """All non-whitespace, non-marker characters of the input, in order."""
    out = []
    in_article = False
    for raw_line in raw_text.splitlines():
        line = re.sub(r"\s+", " ", raw_line).strip()
        if not line:
            continue
        if _CHAPTER.match(line):
            in_article = False
            continue
        m = _ARTICLE.match(line)
        if m:
            in_article = True
            continue
        m = _CLAUSE.match(line)
        if m and in_article:
            out.append(line[m.end():])
        else:
            out.append(line)
    return _squash("".join(out))


def tree_chars(doc) -> str:
    """Concatenated non-whitespace characters of the parse tree, in order."""
    parts = [doc.front_matter]
    for chapter in doc.chapters:
        if chapter.title:
            parts.append(chapter.title)
        for article in chapter.articles:
            if article.preamble:
                parts.append(article.preamble)
            for clause in article.clauses:
                parts.append(clause.text)
    return _squash("".join(parts))


def desk_statutes() -> list[tuple[str, str, str]]:
    """(doc_id, doc_kind, text) for the bundled synthetic statutes."""
    out = []
    for sub, kind in (("regulations", "regulation"), ("reference_laws", "reference_law")):
        for path in sorted((DESK_CORPUS / sub).glob("*.txt")):
            out.append((path.stem, kind, path.read_text(encoding="utf-8")))
    return out
