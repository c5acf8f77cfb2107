"""Source references: pointers into a regulation at chapter, article, or clause depth.

Canonical string forms (used in files, URLs, and chunk provenance):

    PP-57-2021                regulation
    PP-57-2021/bab-3          chapter 3
    PP-57-2021/12             article 12
    PP-57-2021/12/4           clause 4 of article 12

Article numbering in Indonesian drafting is document-global, so article and
clause refs never carry a chapter number.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import NotFoundError

_ROMAN_VALUES = [
    (40, "XL"), (10, "X"), (9, "IX"), (5, "V"), (4, "IV"), (1, "I"),
]
_ROMAN_RE = re.compile(r"^[IVXLC]+$")


def roman_to_int(roman: str) -> int:
    """Parse a roman numeral (I..XXXIX range used by chapter markers)."""
    if not _ROMAN_RE.match(roman):
        raise ValueError(f"not a roman numeral: {roman!r}")
    single = {"I": 1, "V": 5, "X": 10, "L": 50, "C": 100}
    total = 0
    prev = 0
    for ch in reversed(roman):
        val = single[ch]
        if val < prev:
            total -= val
        else:
            total += val
            prev = val
    if total <= 0 or int_to_roman(total) != roman:
        raise ValueError(f"non-canonical roman numeral: {roman!r}")
    return total


def int_to_roman(value: int) -> str:
    if value <= 0:
        raise ValueError("roman numerals are positive")
    parts = []
    remaining = value
    for amount, symbol in _ROMAN_VALUES:
        while remaining >= amount:
            parts.append(symbol)
            remaining -= amount
    return "".join(parts)


@dataclass(frozen=True)
class SourceRef:
    """A reference to a regulation or one of its parts.

    Specificity grows left to right: a clause ref implies an article ref,
    which implies a regulation. Chapter refs sit on their own axis and never
    combine with article numbers.
    """

    regulation_id: str
    chapter_number: int | None = None
    article_number: int | None = None
    clause_number: int | None = None

    def __post_init__(self):
        if not self.regulation_id or "/" in self.regulation_id or self.regulation_id != self.regulation_id.strip():
            raise ValueError(f"bad regulation id: {self.regulation_id!r}")
        if self.clause_number is not None and self.article_number is None:
            raise ValueError("clause ref requires an article number")
        if self.chapter_number is not None and self.article_number is not None:
            raise ValueError("chapter refs do not carry article numbers")
        for field in (self.chapter_number, self.article_number, self.clause_number):
            if field is not None and field < 1:
                raise ValueError("part numbers are positive")

    @property
    def level(self) -> str:
        if self.clause_number is not None:
            return "clause"
        if self.article_number is not None:
            return "article"
        if self.chapter_number is not None:
            return "chapter"
        return "regulation"

    def canonical(self) -> str:
        if self.chapter_number is not None:
            return f"{self.regulation_id}/bab-{self.chapter_number}"
        if self.clause_number is not None:
            return f"{self.regulation_id}/{self.article_number}/{self.clause_number}"
        if self.article_number is not None:
            return f"{self.regulation_id}/{self.article_number}"
        return self.regulation_id

    def display(self) -> str:
        """Human form, e.g. "PP-57-2021 Pasal 12 ayat (4)"."""
        if self.chapter_number is not None:
            return f"{self.regulation_id} BAB {int_to_roman(self.chapter_number)}"
        if self.clause_number is not None:
            return f"{self.regulation_id} Pasal {self.article_number} ayat ({self.clause_number})"
        if self.article_number is not None:
            return f"{self.regulation_id} Pasal {self.article_number}"
        return self.regulation_id

    def article_ref(self) -> "SourceRef":
        """The enclosing article-level ref (identity for article refs)."""
        if self.article_number is None:
            raise ValueError(f"{self.canonical()} has no article")
        return SourceRef(self.regulation_id, article_number=self.article_number)

    def __str__(self) -> str:
        return self.canonical()


def parse_ref(text: str) -> SourceRef:
    """Parse a canonical ref string; raises NotFoundError on bad syntax."""
    parts = text.strip().split("/")
    if not parts or not parts[0]:
        raise NotFoundError(f"bad reference syntax: {text!r}")
    try:
        if len(parts) == 1:
            return SourceRef(parts[0])
        if len(parts) == 2 and parts[1].startswith("bab-"):
            return SourceRef(parts[0], chapter_number=int(parts[1][4:]))
        if len(parts) == 2:
            return SourceRef(parts[0], article_number=int(parts[1]))
        if len(parts) == 3:
            return SourceRef(parts[0], article_number=int(parts[1]), clause_number=int(parts[2]))
    except (ValueError, TypeError) as exc:
        raise NotFoundError(f"bad reference syntax: {text!r}") from exc
    raise NotFoundError(f"bad reference syntax: {text!r}")
