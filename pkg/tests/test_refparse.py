import datetime as dt
import re

import pytest
from hypothesis import given, strategies as st

from adscite.refparse import (
    ParseFailure,
    RawDocument,
    SectionNotFound,
    extract_reference_section,
    format_reference_file,
    parse_authors,
    parse_document_file,
    parse_reference,
    parse_reference_file,
    split_reference_strings,
)

from helpers import raw

DAY = dt.date(2006, 9, 30)


def doc(body):
    return RawDocument("2006ApJ...645...77U", "UCP", body, DAY)


def split(section):
    return split_reference_strings(section, "2006ApJ...645...77U", "UCP", DAY)


# section extraction


def test_single_heading():
    body = "Some text here.\nReferences\nSmith, J. 2001, ApJ, 550, 100\n"
    assert extract_reference_section(doc(body)) == "Smith, J. 2001, ApJ, 550, 100"


def test_heading_in_prose_only():
    with pytest.raises(SectionNotFound):
        extract_reference_section(doc("See the References for details.\nMore text.\n"))


def test_last_heading_wins():
    body = "Intro\nReferences\nfirst list\nAppendix\nREFERENCES\nsecond list\n"
    assert extract_reference_section(doc(body)) == "second list"


@pytest.mark.parametrize("heading", ["7. References", "Bibliography", "LITERATURE CITED", "  References:"])
def test_heading_variants(heading):
    assert extract_reference_section(doc(f"text\n{heading}\nA ref 2001\n")) == "A ref 2001"


def test_trailing_appendix_not_trimmed():
    body = "References\nSmith 2001\nAppendix A\nTable"
    assert extract_reference_section(doc(body)).endswith("Table")


# splitting


def test_marker_split():
    refs = split("[1] Alvarez, R. 2001, ApJ, 550, 100\n[2] Brandt, K. 2001, ApJ, 560, L45")
    assert [(r.sequence, r.text) for r in refs] == [
        (1, "Alvarez, R. 2001, ApJ, 550, 100"),
        (2, "Brandt, K. 2001, ApJ, 560, L45"),
    ]


def test_continuation_merge():
    refs = split("Smith, J. 2001,\n  ApJ, 550, 100")
    assert [r.text for r in refs] == ["Smith, J. 2001, ApJ, 550, 100"]


def test_lowercase_continuation():
    refs = split("Smith, J. 2001, in proceedings of the\nmeeting, 12, 34\nJones, K. 2002, AJ, 1, 2")
    assert len(refs) == 2 and refs[0].text.endswith("meeting, 12, 34")


def test_ten_unmarked_lines():
    lines = [f"Author{i}, A. 20{i:02d}, ApJ, {i + 1}, {i + 10}" for i in range(10)]
    refs = split("\n".join(lines))
    assert [r.sequence for r in refs] == list(range(1, 11))
    assert [r.text for r in refs] == lines


def test_blank_lines_separate_and_marked_mode_merges():
    refs = split("1. Smith, J. 2001,\nApJ, 550, 100\n2. Jones, K. 2002, AJ, 1, 2\n\nLoose, L. 2003, PASP, 3, 4")
    assert [r.text for r in refs] == [
        "Smith, J. 2001, ApJ, 550, 100",
        "Jones, K. 2002, AJ, 1, 2",
        "Loose, L. 2003, PASP, 3, 4",
    ]


lines = st.lists(
    st.text(st.characters(blacklist_categories=("Cs", "Cc", "Zl", "Zp")), min_size=1, max_size=40),
    max_size=12,
)


@given(lines)
def test_split_loses_no_characters(chunks):
    section = "\n".join(chunks)
    refs = split(section)
    marker = re.compile(r"^\s*(?:\[\d+\]|\d{1,3}\.(?=\s)|[•*\-])\s*")
    expected = "".join(marker.sub("", line, count=1) for line in section.splitlines())
    got = "".join(r.text for r in refs)
    strip = lambda s: re.sub(r"\s+", "", s)
    assert strip(got) == strip(expected)


# parsing


def test_parse_aas_style_full_confidence():
    p = parse_reference(raw("Accomazzi, A., et al. 1999, ASPC, 172, 291"))
    assert [str(a) for a in p.authors] == ["Accomazzi, A."]
    assert (p.year, p.venue_token, p.volume, p.page, p.confidence) == (1999, "ASPC", "172", "291", 1.0)


def test_parse_spie():
    p = parse_reference(raw("Kurtz, M. J., et al. 2002, SPIE, 4847, 238"))
    assert (p.year, p.venue_token, p.volume, p.page) == (2002, "SPIE", "4847", "238")
    assert p.authors[0].initials == "M. J."


def test_unparseable():
    with pytest.raises(ParseFailure) as info:
        parse_reference(raw("mysterious scribble 12345"))
    assert info.value.raw.text == "mysterious scribble 12345"


def test_proceedings_single_number_is_page():
    p = parse_reference(raw("Demleitner, M. 2004, ccdm.conf, 521"))
    assert (p.venue_token, p.volume, p.page, p.confidence) == ("ccdm.conf", None, "521", 0.8)


@pytest.mark.parametrize(
    "text, template, fields",
    [
        ("Smith J., Jones K., 2001, MNRAS, 550, 100", "author-year-venue-volume-page",
         (["Smith", "Jones"], 2001, "MNRAS", "550", "100")),
        ("Smith et al. (2001), ApJ, 550, 100", "et-al-parenthesized-year",
         (["Smith"], 2001, "ApJ", "550", "100")),
        ("[3] A. Accomazzi and G. Eichhorn, Phys. Rev. D 55, 1234 (1997)", "numbered-bracket",
         (["Accomazzi", "Eichhorn"], 1997, "Phys. Rev. D", "55", "1234")),
        ("ApJ, 550, 100, Smith, J. 2001", "journal-abbrev-first",
         (["Smith"], 2001, "ApJ", "550", "100")),
        ("Smith, J. 2005, arXiv:0501.1234", "eprint-identifier",
         (["Smith"], 2005, "arXiv", "0501", "1234")),
        ("van der Berg, J.-P. & Li, X. 2010, A&A, 510, 12", "author-year-venue-volume-page",
         (["van der Berg", "Li"], 2010, "A&A", "510", "12")),
    ],
)
def test_templates(text, template, fields):
    p = parse_reference(raw(text))
    assert p.template == template
    assert ([a.surname for a in p.authors], p.year, p.venue_token, p.volume, p.page) == fields


def test_variants_are_alternate_boundaries():
    text = "Accomazzi, A., et al. 1999, ASPC, 172, 291"
    v1 = parse_reference(raw(text), 1)
    assert (v1.variant_index, v1.venue_token, v1.volume, v1.page) == (1, "ASPC, 172", None, "291")
    with pytest.raises(ParseFailure):
        parse_reference(raw(text), 2)
    with pytest.raises(ValueError):
        parse_reference(raw(text), -1)


def test_out_of_range_year_is_not_a_year():
    with pytest.raises(ParseFailure):
        parse_reference(raw("Smith, J. 1492, ApJ, 1, 2"))


def test_author_segment_forms():
    assert [a.key for a in parse_authors("A. Accomazzi, G. Eichhorn")] == [("accomazzi", "a"), ("eichhorn", "g")]
    assert [a.key for a in parse_authors("Smith JK, Jones K")] == [("smith", "j"), ("jones", "k")]
    assert parse_authors("12 monkeys") is None


@given(st.text(max_size=80), st.integers(0, 3))
def test_parse_deterministic(text, variant):
    if not text.strip():
        return
    r = raw(text)

    def run():
        try:
            return parse_reference(r, variant)
        except ParseFailure as exc:
            return ("fail", exc.reason)

    first, second = run(), run()
    assert first == second
    if not isinstance(first, tuple):
        assert 0 < first.confidence <= 1
        if first.confidence == 1.0:
            assert first.authors and None not in (first.year, first.venue_token, first.volume, first.page)


# ingest file


REF_FILE = """\
%%R 2006ApJ...645...77U %%S UCP %%D 2006-07-01
Accomazzi, A., et al. 1999, ASPC, 172, 291

Kurtz, M. J., et al. 2002, SPIE, 4847, 238
%R 2005IPM....41.1395K %S Elsevier %D 2005-09-01
Kurtz, M. J., et al. 2003, AAS, 203, 2005
"""


def test_reference_file():
    refs = parse_reference_file(REF_FILE)
    assert [(r.citing_bibcode, r.source_tag, r.sequence) for r in refs] == [
        ("2006ApJ...645...77U", "UCP", 1),
        ("2006ApJ...645...77U", "UCP", 2),
        ("2005IPM....41.1395K", "Elsevier", 1),
    ]
    assert refs[0].received_date == dt.date(2006, 7, 1)
    assert parse_reference_file(format_reference_file(refs)) == refs


def test_reference_file_requires_header():
    with pytest.raises(ValueError):
        parse_reference_file("Smith 2001\n")
    with pytest.raises(ValueError):
        parse_reference_file("%R 2006ApJ...645...77 %S UCP %D 2006-07-01\nx\n")


def test_document_file():
    docs = parse_document_file("%R 2006ApJ...645...77U %S arXiv %D 2006-07-01\nBody\nReferences\nSmith 2001\n")
    assert extract_reference_section(docs[0]) == "Smith 2001"
