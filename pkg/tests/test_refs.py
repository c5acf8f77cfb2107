import pytest

from lexrag.errors import NotFoundError
from lexrag.refs import SourceRef, int_to_roman, parse_ref, roman_to_int


def test_canonical_round_trip_all_levels():
    refs = [
        SourceRef("PP-57-2021"),
        SourceRef("PP-57-2021", chapter_number=3),
        SourceRef("PP-57-2021", article_number=12),
        SourceRef("PP-57-2021", article_number=12, clause_number=4),
    ]
    for ref in refs:
        assert parse_ref(ref.canonical()) == ref


def test_canonical_forms():
    assert SourceRef("PP-X", article_number=1, clause_number=2).canonical() == "PP-X/1/2"
    assert SourceRef("PP-X", chapter_number=2).canonical() == "PP-X/bab-2"
    assert SourceRef("PP-X").canonical() == "PP-X"


def test_display_forms():
    assert SourceRef("PP-X", article_number=1, clause_number=2).display() == "PP-X Pasal 1 ayat (2)"
    assert SourceRef("PP-X", article_number=7).display() == "PP-X Pasal 7"
    assert SourceRef("PP-X", chapter_number=4).display() == "PP-X BAB IV"


def test_clause_requires_article():
    with pytest.raises(ValueError):
        SourceRef("PP-X", clause_number=1)


def test_chapter_and_article_exclusive():
    with pytest.raises(ValueError):
        SourceRef("PP-X", chapter_number=1, article_number=1)


def test_regulation_id_validation():
    with pytest.raises(ValueError):
        SourceRef("")
    with pytest.raises(ValueError):
        SourceRef("PP/X")


def test_level_property():
    assert SourceRef("R").level == "regulation"
    assert SourceRef("R", chapter_number=1).level == "chapter"
    assert SourceRef("R", article_number=1).level == "article"
    assert SourceRef("R", article_number=1, clause_number=1).level == "clause"


def test_parse_ref_bad_syntax():
    for bad in ["", "R/abc", "R/1/2/3", "R/bab-x", "R/0"]:
        with pytest.raises(NotFoundError):
            parse_ref(bad)


def test_roman_round_trip_to_39():
    for value in range(1, 40):
        assert roman_to_int(int_to_roman(value)) == value


def test_roman_rejects_garbage():
    for bad in ["", "ABC", "IIII", "VX"]:
        with pytest.raises(ValueError):
            roman_to_int(bad)
