"""Hierarchical statute parsing: regulation text -> chapter/article/clause tree.

Text-first discipline: every non-marker character of the input lands in
exactly one tree node, in order. Marker grammar (applied per stripped line):

    BAB <roman>     opens a chapter; the following non-marker text is its title
    Pasal <n>       opens an article
    (<n>) <text>    opens a clause inside the current article

Everything before the first marker is document front matter. Whitespace is
normalized: runs of blanks collapse to one space, and line breaks inside a
single unit (clause, preamble, title) join with one space.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import (
    DuplicateArticleError,
    EmptyArticleError,
    EmptyInputError,
    LexragError,
    NonMonotonicNumberingError,
    NotFoundError,
)
from .refs import SourceRef, int_to_roman, roman_to_int

CHAPTER_MARKER = re.compile(r"^BAB\s+([IVXLC]+)$")
ARTICLE_MARKER = re.compile(r"^Pasal\s+(\d+)$")
CLAUSE_MARKER = re.compile(r"^\((\d+)\)\s+")

DOC_KINDS = ("regulation", "reference_law")
LEVELS = ("chapter", "article", "clause")


@dataclass
class Clause:
    number: int
    text: str


@dataclass
class Article:
    number: int
    heading: str | None = None
    preamble: str = ""
    clauses: list[Clause] = field(default_factory=list)


@dataclass
class Chapter:
    number: int
    title: str | None = None
    articles: list[Article] = field(default_factory=list)


@dataclass
class Document:
    id: str
    title: str
    doc_kind: str
    chapters: list[Chapter] = field(default_factory=list)
    front_matter: str = ""


@dataclass
class Segment:
    """One unit of corpus text at a fixed hierarchy depth."""

    level: str
    ref: SourceRef
    text: str
    # Source tree node, kept so article/chapter segments can be re-rendered
    # with their clause markers. Not part of equality.
    node: object = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.level not in LEVELS:
            raise ValueError(f"bad segment level: {self.level!r}")
        if self.ref.level != self.level:
            raise ValueError(f"ref {self.ref.canonical()} is {self.ref.level}-level, segment says {self.level}")
        if not self.text:
            raise ValueError("segments carry nonempty text")


def _normalize(line: str) -> str:
    return re.sub(r"\s+", " ", line).strip()


def parse_document(raw_text: str, doc_id: str, doc_kind: str = "regulation") -> Document:
    """Parse plain statute text into a Document tree.

    Raises EmptyInputError for whitespace-only input, DuplicateArticleError
    when an article number repeats, NonMonotonicNumberingError when chapter,
    article, or clause numbers decrease, and EmptyArticleError when an
    article ends up with neither preamble nor clauses.
    """
    if not raw_text.strip():
        raise EmptyInputError(f"{doc_id}: document text is empty")
    if doc_kind not in DOC_KINDS:
        raise ValueError(f"doc_kind must be one of {DOC_KINDS}, got {doc_kind!r}")

    front_lines: list[str] = []
    chapters: list[Chapter] = []
    chapter: Chapter | None = None
    article: Article | None = None
    clause: Clause | None = None
    # Pending title lines for the current chapter (joined lazily so multiple
    # stray lines before the first article all become title text).
    title_parts: list[str] = []
    seen_articles: set[int] = set()
    last_article_number = 0

    def close_title():
        nonlocal title_parts
        if chapter is not None and title_parts:
            chapter.title = " ".join(title_parts)
            title_parts = []

    def close_article():
        if article is not None and not article.preamble and not article.clauses:
            raise EmptyArticleError(f"{doc_id}: Pasal {article.number} has no content")

    for raw_line in raw_text.splitlines():
        line = _normalize(raw_line)
        if not line:
            continue

        m = CHAPTER_MARKER.match(line)
        if m:
            close_article()
            close_title()
            number = roman_to_int(m.group(1))
            if chapter is not None and number <= chapter.number:
                raise NonMonotonicNumberingError(
                    f"{doc_id}: BAB {m.group(1)} follows BAB {int_to_roman(chapter.number)}"
                )
            chapter = Chapter(number=number)
            chapters.append(chapter)
            article = None
            clause = None
            continue

        m = ARTICLE_MARKER.match(line)
        if m:
            close_article()
            close_title()
            number = int(m.group(1))
            if number in seen_articles:
                raise DuplicateArticleError(f"{doc_id}: Pasal {number} appears twice")
            if number < last_article_number:
                raise NonMonotonicNumberingError(
                    f"{doc_id}: Pasal {number} follows Pasal {last_article_number}"
                )
            seen_articles.add(number)
            last_article_number = number
            if chapter is None:
                # Short regulations omit chapters; give them one implicit BAB.
                chapter = Chapter(number=1)
                chapters.append(chapter)
            article = Article(number=number)
            chapter.articles.append(article)
            clause = None
            continue

        m = CLAUSE_MARKER.match(line)
        if m and article is not None:
            number = int(m.group(1))
            if article.clauses and number <= article.clauses[-1].number:
                raise NonMonotonicNumberingError(
                    f"{doc_id}: ayat ({number}) follows ayat ({article.clauses[-1].number}) "
                    f"in Pasal {article.number}"
                )
            clause = Clause(number=number, text=line[m.end():])
            article.clauses.append(clause)
            continue

        # Plain text: attach to the innermost open unit.
        if clause is not None:
            clause.text = f"{clause.text} {line}"
        elif article is not None:
            article.preamble = f"{article.preamble} {line}".strip()
        elif chapter is not None:
            title_parts.append(line)
        else:
            front_lines.append(line)

    close_article()
    close_title()

    front_matter = "\n".join(front_lines)
    title = front_lines[0] if front_lines else doc_id
    return Document(id=doc_id, title=title, doc_kind=doc_kind,
                    chapters=chapters, front_matter=front_matter)


def _article_text(article: Article) -> str:
    parts = []
    if article.preamble:
        parts.append(article.preamble)
    parts.extend(c.text for c in article.clauses)
    return "\n".join(parts)


def _chapter_text(chapter: Chapter) -> str:
    return "\n".join(_article_text(a) for a in chapter.articles)


def segment(doc: Document, level: str) -> list[Segment]:
    """Emit one Segment per unit at the given level, in document order.

    Units with no text (chapters without articles, articles without clauses
    at clause level) yield nothing.
    """
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}, got {level!r}")
    out: list[Segment] = []
    for chapter in doc.chapters:
        if level == "chapter":
            text = _chapter_text(chapter)
            if text:
                ref = SourceRef(doc.id, chapter_number=chapter.number)
                out.append(Segment("chapter", ref, text, node=chapter))
            continue
        for article in chapter.articles:
            if level == "article":
                ref = SourceRef(doc.id, article_number=article.number)
                out.append(Segment("article", ref, _article_text(article), node=article))
            else:
                for cl in article.clauses:
                    ref = SourceRef(doc.id, article_number=article.number,
                                    clause_number=cl.number)
                    out.append(Segment("clause", ref, cl.text, node=cl))
    return out


class Corpus:
    """Immutable set of parsed documents with a ref -> segment lookup."""

    def __init__(self, documents: list[Document]):
        self.documents = list(documents)
        self.lookup: dict[SourceRef, Segment] = {}
        seen_ids: set[str] = set()
        for doc in self.documents:
            if doc.id in seen_ids:
                raise ValueError(f"duplicate document id {doc.id!r} in corpus")
            seen_ids.add(doc.id)
            for level in LEVELS:
                for seg in segment(doc, level):
                    self.lookup[seg.ref] = seg

    def document(self, doc_id: str) -> Document:
        for doc in self.documents:
            if doc.id == doc_id:
                return doc
        raise NotFoundError(f"no document {doc_id!r} in corpus")


def resolve_reference(corpus: Corpus, ref: SourceRef) -> Segment:
    """Return the unique segment for a ref at the specificity it implies."""
    seg = corpus.lookup.get(ref)
    if seg is None:
        raise NotFoundError(f"no segment for reference {ref.canonical()}")
    return seg


# --- rendering (round-trip support) ---

def _render_article(article: Article) -> str:
    lines = [f"Pasal {article.number}"]
    if article.preamble:
        lines.append(article.preamble)
    for cl in article.clauses:
        lines.append(f"({cl.number}) {cl.text}")
    return "\n".join(lines)


def _render_chapter(chapter: Chapter) -> str:
    lines = [f"BAB {int_to_roman(chapter.number)}"]
    if chapter.title:
        lines.append(chapter.title)
    for article in chapter.articles:
        lines.append(_render_article(article))
    return "\n".join(lines)


def render_document(doc: Document) -> str:
    """Re-emit marker lines + text so parse(render(doc)) == doc structurally."""
    parts = []
    if doc.front_matter:
        parts.append(doc.front_matter)
    parts.extend(_render_chapter(ch) for ch in doc.chapters)
    return "\n".join(parts)


def render_segment(seg: Segment) -> str:
    """Render one segment back to marker form.

    Clause segments render from the ref alone; article and chapter segments
    need their source node (present on anything produced by segment() or
    resolve_reference).
    """
    if seg.level == "clause":
        return f"({seg.ref.clause_number}) {seg.text}"
    if seg.level == "article":
        if not isinstance(seg.node, Article):
            raise ValueError("article segment lost its source node; cannot re-render")
        return _render_article(seg.node)
    if not isinstance(seg.node, Chapter):
        raise ValueError("chapter segment lost its source node; cannot re-render")
    return _render_chapter(seg.node)


# --- JSON persistence (artifact plumbing) ---

def document_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "title": doc.title,
        "doc_kind": doc.doc_kind,
        "front_matter": doc.front_matter,
        "chapters": [
            {
                "number": ch.number,
                "title": ch.title,
                "articles": [
                    {
                        "number": a.number,
                        "heading": a.heading,
                        "preamble": a.preamble,
                        "clauses": [{"number": c.number, "text": c.text} for c in a.clauses],
                    }
                    for a in ch.articles
                ],
            }
            for ch in doc.chapters
        ],
    }


def document_from_dict(data: dict) -> Document:
    return Document(
        id=data["id"],
        title=data["title"],
        doc_kind=data["doc_kind"],
        front_matter=data.get("front_matter", ""),
        chapters=[
            Chapter(
                number=ch["number"],
                title=ch.get("title"),
                articles=[
                    Article(
                        number=a["number"],
                        heading=a.get("heading"),
                        preamble=a.get("preamble", ""),
                        clauses=[Clause(c["number"], c["text"]) for c in a.get("clauses", [])],
                    )
                    for a in ch.get("articles", [])
                ],
            )
            for ch in data.get("chapters", [])
        ],
    )


def save_corpus(corpus: Corpus, path, extra: dict | None = None) -> None:
    payload = {
        "schema_version": 1,
        "documents": [document_to_dict(d) for d in corpus.documents],
    }
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(path) -> Corpus:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    return Corpus([document_from_dict(d) for d in payload["documents"]])


def scan_statute_dir(root, default_kind: str = "regulation") -> list[tuple[str, str, "Path"]]:
    """Find UTF-8 statute .txt files under a directory, in sorted order.

    Files inside a regulations/ or reference_laws/ subdirectory get that
    doc_kind; anything else uses default_kind. The document id is the
    filename stem.
    """
    from pathlib import Path

    base = Path(root)
    if not base.is_dir():
        raise NotFoundError(f"statute directory {base} does not exist")
    found = []
    for path in sorted(base.rglob("*.txt")):
        kind = default_kind
        for part in path.relative_to(base).parts[:-1]:
            if part in ("regulations", "regulation"):
                kind = "regulation"
            elif part in ("reference_laws", "reference_law"):
                kind = "reference_law"
        found.append((path.stem, kind, path))
    if not found:
        raise NotFoundError(f"no .txt statutes under {base}")
    return found


def parse_statute_texts(items: list[tuple[str, str, str]]) -> tuple[list[Document], list[dict]]:
    """Parse (doc_id, doc_kind, text) triples; collect per-document failures."""
    documents: list[Document] = []
    diagnostics: list[dict] = []
    for doc_id, doc_kind, text in items:
        try:
            documents.append(parse_document(text, doc_id, doc_kind))
        except LexragError as exc:
            diagnostics.append({"doc_id": doc_id, "error": str(exc)})
    return documents, diagnostics
