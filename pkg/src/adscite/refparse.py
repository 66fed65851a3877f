"""Reference-section extraction, reference splitting and fielded parsing."""

from __future__ import annotations

import datetime as dt
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .bibcode import MAX_YEAR, MIN_YEAR, canonical
from .names import AuthorName

SCORED_FIELDS = 5


class SectionNotFound(LookupError):
    """No reference heading on its own line."""


class ParseFailure(ValueError):
    def __init__(self, raw: "RawReference", reason: str) -> None:
        super().__init__(f"{reason}: {raw.text!r}")
        self.raw = raw
        self.reason = reason


@dataclass(frozen=True)
class RawDocument:
    citing_bibcode: str
    source_tag: str
    body_text: str
    received_date: dt.date

    def __post_init__(self) -> None:
        if not self.body_text.strip():
            raise ValueError("document body is empty")


@dataclass(frozen=True)
class RawReference:
    citing_bibcode: str
    source_tag: str
    sequence: int
    text: str
    received_date: dt.date

    def __post_init__(self) -> None:
        if self.sequence < 1:
            raise ValueError("sequence must be >= 1")
        if not self.text.strip():
            raise ValueError("reference text is empty")


@dataclass(frozen=True)
class ParsedReference:
    raw: RawReference
    authors: tuple[AuthorName, ...]
    year: int | None
    venue_token: str | None
    volume: str | None
    page: str | None
    confidence: float
    variant_index: int
    template: str

    @property
    def first_author(self) -> AuthorName | None:
        return self.authors[0] if self.authors else None


# section extraction

_HEADING = re.compile(
    r"^[ \t]*(?:(?:\d+(?:\.\d+)*|[IVXLC]+)\.?[ \t]+)?"
    r"(?:references|bibliography|literature[ \t]+cited)[ \t]*:?[ \t]*$",
    re.IGNORECASE | re.MULTILINE,
)


def extract_reference_section(doc: RawDocument) -> str:
    """Text after the last reference heading, to the end of the document."""
    last = None
    for last in _HEADING.finditer(doc.body_text):
        pass
    if last is None:
        raise SectionNotFound(f"no reference heading in document for {doc.citing_bibcode}")
    return doc.body_text[last.end():].strip()


# splitting

_MARKER = re.compile(r"^\s*(?:\[\d+\]|\d{1,3}\.(?=\s)|[•*\-])\s*")


def split_reference_strings(
    section: str,
    citing_bibcode: str,
    source_tag: str,
    received_date: dt.date,
) -> list[RawReference]:
    lines = section.splitlines()
    first = next((line for line in lines if line.strip()), "")
    marked = bool(first) and bool(_MARKER.match(first))

    chunks: list[list[str]] = []
    broken = True  # next non-blank line starts a new reference
    for line in lines:
        if not line.strip():
            broken = True
            continue
        m = _MARKER.match(line)
        if m:
            chunks.append([line[m.end():].strip()])
        elif broken or not chunks:
            chunks.append([line.strip()])
        elif marked or line[0].isspace() or line.lstrip()[0].islower():
            chunks[-1].append(line.strip())
        else:
            chunks.append([line.strip()])
        broken = False

    refs = []
    for chunk in chunks:
        text = " ".join(part for part in chunk if part)
        if text:
            refs.append(RawReference(citing_bibcode, source_tag, len(refs) + 1, text, received_date))
    return refs


# parsing

_YEAR = r"(?P<yr>(?:1[5-9]\d\d|20\d\d|2100))[a-z]?"
_VOL = r"(?P<vol>[A-Za-z]?\d+[A-Za-z]?)"
_PAGE = r"(?P<pg>[A-Za-z]?\d+)"

_TEMPLATES: list[tuple[str, re.Pattern[str]]] = [
    (
        "author-year-venue-volume-page",
        re.compile(rf"^(?P<au>.+?),?\s+{_YEAR}[,.:]?\s+(?P<ven>.+?)[,.]?\s+{_VOL}[,:]?\s+{_PAGE}$"),
    ),
    (
        "et-al-parenthesized-year",
        re.compile(
            rf"^(?P<au>.+?),?\s+\({_YEAR}\)[,.:]?\s+(?P<ven>.+?)[,.]?\s+{_VOL}[,:]?\s+{_PAGE}$"
        ),
    ),
    (
        "numbered-bracket",
        re.compile(
            rf"^(?P<au>.+?),\s+(?P<ven>[^,]*?[A-Za-z][^,]*?)\s+{_VOL},?\s+{_PAGE}\s+\({_YEAR}\)$"
        ),
    ),
    (
        "journal-abbrev-first",
        re.compile(
            rf"^(?P<ven>[A-Za-z][A-Za-z&. ]*?)[,.]?\s+{_VOL},\s+{_PAGE},\s+(?P<au>.+?),?\s+\(?{_YEAR}\)?$"
        ),
    ),
    (
        "eprint-identifier",
        re.compile(
            rf"^(?P<au>.+?),?\s+\(?{_YEAR}\)?[,.:]?\s+(?P<ven>arXiv):(?P<vol>\d{{4}})\.(?P<pg>\d{{4,5}})(?:v\d+)?$"
        ),
    ),
    # alternate boundary: the venue token absorbs the volume, one trailing number is the page
    (
        "author-year-venue-page",
        re.compile(rf"^(?P<au>.+?),?\s+\(?{_YEAR}\)?[,.:]?\s+(?P<ven>.+?)[,.]?\s+{_PAGE}$"),
    ),
]

_ET_AL = re.compile(r"\bet\s*al\.?", re.IGNORECASE)
_CONJ = re.compile(r"\s+(?:and|&)\s+|\s*&\s*")
_INITIALS_FIRST = re.compile(r"^((?:[A-Z][a-z]?\.\s*-?\s*)+)\s*([^\W\d_][\w'’ -]*)$")
_SURNAME_INITIALS = re.compile(r"^([^\W\d_][\w'’ -]*?)\s+((?:[A-Z][a-z]?\.\s*-?)+|[A-Z]{1,3})$")
_SURNAME = re.compile(r"^[^\W\d_][\w'’ -]*$")


def _is_initials(piece: str) -> bool:
    compact = re.sub(r"[\s.\-]", "", piece)
    if not compact or len(compact) > 4:
        return False
    if "." in piece:
        return bool(re.fullmatch(r"(?:[A-Z][a-z]?\.?\s*-?\s*)+", piece))
    return compact.isupper() and compact.isalpha() and len(compact) <= 3


def parse_authors(segment: str) -> list[AuthorName] | None:
    """Split an author segment into names; ``None`` if it does not look like authors."""
    segment = _ET_AL.sub(",", segment)
    segment = _CONJ.sub(",", segment)
    pieces = [p.strip() for p in segment.split(",")]
    pieces = [p for p in pieces if p and p not in {".", "..."}]
    authors: list[AuthorName] = []
    for piece in pieces:
        piece = piece.rstrip(",")
        if _is_initials(piece):
            if not authors or authors[-1].initials:
                return None
            authors[-1] = AuthorName(authors[-1].surname, piece.strip())
            continue
        m = _INITIALS_FIRST.match(piece)
        if m:
            authors.append(AuthorName(m.group(2).strip(), m.group(1).strip()))
            continue
        m = _SURNAME_INITIALS.match(piece)
        if m:
            authors.append(AuthorName(m.group(1).strip(), m.group(2).strip()))
            continue
        if _SURNAME.match(piece) and len(piece.split()) <= 4:
            authors.append(AuthorName(piece.strip()))
            continue
        return None
    return authors or None


def _clean(text: str) -> str:
    text = _MARKER.sub("", text, count=1)
    text = re.sub(r"\s+", " ", text).strip()
    return text.rstrip(" .;")


def _interpretations(raw: RawReference) -> Iterator[ParsedReference]:
    text = _clean(raw.text)
    seen: set[tuple] = set()
    index = 0
    for name, pattern in _TEMPLATES:
        m = pattern.match(text)
        if not m:
            continue
        year = int(m.group("yr"))
        if not MIN_YEAR <= year <= MAX_YEAR:
            continue
        authors = parse_authors(m.group("au"))
        if authors is None:
            continue
        venue = m.group("ven").strip(" ,")
        if not re.search(r"[A-Za-z]", venue) or len(venue) > 80:
            continue
        groups = m.groupdict()
        volume = groups.get("vol")
        page = groups.get("pg")
        key = (tuple(a.key for a in authors), year, venue, volume, page)
        if key in seen:
            continue
        seen.add(key)
        present = sum(x is not None for x in (authors or None, year, venue, volume, page))
        yield ParsedReference(
            raw=raw,
            authors=tuple(authors),
            year=year,
            venue_token=venue,
            volume=volume,
            page=page,
            confidence=present / SCORED_FIELDS,
            variant_index=index,
            template=name,
        )
        index += 1


def parse_reference(raw: RawReference, variant: int = 0) -> ParsedReference:
    """Return the ``variant``-th distinct interpretation of ``raw``.

    Raises ParseFailure when no template matches or there are fewer
    interpretations than requested.
    """
    if variant < 0:
        raise ValueError("variant must be >= 0")
    found = False
    for parsed in _interpretations(raw):
        found = True
        if parsed.variant_index == variant:
            return parsed
    raise ParseFailure(raw, f"no variant {variant}" if found else "no template matches")


# reference ingest file

_HEADER = re.compile(r"^%{1,2}R\s+(\S+)\s+%{1,2}S\s+(\S+)\s+%{1,2}D\s+(\S+)\s*$")


def _headers(text: str) -> Iterator[tuple[str, str, dt.date, list[str]]]:
    current: tuple[str, str, dt.date] | None = None
    body: list[str] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        m = _HEADER.match(line)
        if m:
            if current is not None:
                yield (*current, body)
            try:
                current = (canonical(m.group(1)), m.group(2), dt.date.fromisoformat(m.group(3)))
            except ValueError as exc:
                raise ValueError(f"line {line_no}: {exc}") from exc
            body = []
        elif current is None:
            if line.strip():
                raise ValueError(f"line {line_no}: reference before any %R header")
        else:
            body.append(line)
    if current is not None:
        yield (*current, body)


def parse_reference_file(text: str) -> list[RawReference]:
    """One block per citing paper: a header line then one reference per line."""
    refs = []
    for citing, source, received, body in _headers(text):
        lines = [line.strip() for line in body if line.strip()]
        refs.extend(
            RawReference(citing, source, i, line, received) for i, line in enumerate(lines, start=1)
        )
    return refs


def parse_document_file(text: str) -> list[RawDocument]:
    """Same header convention, but each body is full text to run through extraction."""
    return [
        RawDocument(citing, source, "\n".join(body), received)
        for citing, source, received, body in _headers(text)
    ]


def format_reference_file(refs: Iterable[RawReference]) -> str:
    out = []
    current = None
    for ref in refs:
        key = (ref.citing_bibcode, ref.source_tag, ref.received_date)
        if key != current:
            if current is not None:
                out.append("")
            out.append(f"%R {ref.citing_bibcode} %S {ref.source_tag} %D {ref.received_date.isoformat()}")
            current = key
        out.append(ref.text)
    return "\n".join(out) + ("\n" if out else "")
