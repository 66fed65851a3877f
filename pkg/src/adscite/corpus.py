"""Canonical record store: bibcode lookup, term search and e-print linkage."""

from __future__ import annotations

import datetime as dt
import enum
import logging
import re
import threading
from dataclasses import dataclass, field, replace
from typing import Iterable

from .bibcode import Bibcode, BibcodeError, canonical
from .names import AuthorName, fold
from .tagged import TaggedFormatError, read_blocks, write_blocks

log = logging.getLogger(__name__)

_TOKEN = re.compile(r"[\w&]+")

DEFAULT_MATCH_THRESHOLD = 0.7
DEFAULT_YEAR_WINDOW = 1


class Kind(str, enum.Enum):
    JOURNAL = "journal"
    EPRINT = "eprint"
    OTHER = "other"


class RecordError(ValueError):
    """Invalid record or store operation; ``field`` names the offending field."""

    def __init__(self, message: str, field: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(fold(text))


@dataclass(frozen=True)
class BibRecord:
    bibcode: str
    title: str
    authors: tuple[AuthorName, ...]
    pub_year: int
    venue: str
    volume: str | None = None
    first_page: str | None = None
    refereed: bool = False
    kind: Kind = Kind.JOURNAL
    abstract: str | None = None
    keywords: tuple[str, ...] = ()
    source_tags: frozenset[str] = frozenset()
    has_reference_list: bool = False
    ingest_date: dt.date = dt.date(1970, 1, 1)

    def __post_init__(self) -> None:
        try:
            code = Bibcode.parse(self.bibcode)
        except BibcodeError as exc:
            raise RecordError(str(exc), f"bibcode.{exc.field}") from exc
        if self.pub_year != code.year:
            raise RecordError(
                f"pub_year {self.pub_year} != bibcode year {code.year}", "pub_year"
            )
        if self.kind is Kind.EPRINT and self.refereed:
            raise RecordError("e-prints cannot be refereed", "refereed")

    @property
    def code(self) -> Bibcode:
        return Bibcode.parse(self.bibcode)

    @property
    def first_author(self) -> AuthorName | None:
        return self.authors[0] if self.authors else None

    def search_tokens(self) -> set[str]:
        parts = [self.title, self.abstract or "", *self.keywords]
        return {tok for part in parts for tok in tokenize(part)}


@dataclass(frozen=True)
class EprintLink:
    eprint: str
    published: str
    origin: str  # "explicit" | "matched"
    match_score: float | None = None


@dataclass(frozen=True)
class SearchFilter:
    year_range: tuple[int, int] | None = None
    refereed_only: bool = False
    kind: Kind | None = None

    def accepts(self, rec: BibRecord) -> bool:
        if self.refereed_only and not rec.refereed:
            return False
        if self.kind is not None and rec.kind is not self.kind:
            return False
        if self.year_range is not None:
            lo, hi = self.year_range
            if not lo <= rec.pub_year <= hi:
                return False
        return True


def title_jaccard(a: str, b: str) -> float:
    ta, tb = set(tokenize(a)), set(tokenize(b))
    if not ta and not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


@dataclass
class CorpusStore:
    """Record store. Mutations are serialized; reads see a consistent view."""

    _records: dict[str, BibRecord] = field(default_factory=dict)
    _links: dict[str, EprintLink] = field(default_factory=dict)
    _with_refs: set[str] = field(default_factory=set)
    _postings: dict[str, set[str]] = field(default_factory=dict)
    _lock: threading.RLock = field(default_factory=threading.RLock, repr=False)

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self):
        return iter(sorted(self._records.values(), key=lambda r: r.bibcode))

    def add_record(self, record: BibRecord) -> str:
        """Store ``record``; returns ``"added"`` or ``"updated"`` (last write wins)."""
        record = replace(record, has_reference_list=record.bibcode in self._with_refs)
        with self._lock:
            previous = self._records.get(record.bibcode)
            if previous is not None:
                self._unindex(previous)
            self._records[record.bibcode] = record
            for tok in record.search_tokens():
                self._postings.setdefault(tok, set()).add(record.bibcode)
            # a kind change can invalidate an existing link
            link = self._links.get(record.bibcode)
            if link is not None and record.kind is not Kind.EPRINT:
                del self._links[record.bibcode]
        return "updated" if previous is not None else "added"

    def _unindex(self, record: BibRecord) -> None:
        for tok in record.search_tokens():
            posting = self._postings.get(tok)
            if posting is not None:
                posting.discard(record.bibcode)
                if not posting:
                    del self._postings[tok]

    def mark_reference_list(self, citing: Iterable[str]) -> None:
        """Record that reference lists exist for these citing bibcodes."""
        with self._lock:
            for code in citing:
                self._with_refs.add(code)
                rec = self._records.get(code)
                if rec is not None and not rec.has_reference_list:
                    self._records[code] = replace(rec, has_reference_list=True)

    def find_by_bibcode(self, code: Bibcode | str) -> BibRecord | None:
        return self._records.get(str(code))

    def __contains__(self, code: object) -> bool:
        return str(code) in self._records

    def search_records(
        self, terms: Iterable[str], filters: SearchFilter | None = None
    ) -> list[str]:
        tokens = sorted({tok for term in terms for tok in tokenize(term)})
        if not tokens:
            raise ValueError("search needs at least one non-empty term")
        filters = filters or SearchFilter()
        with self._lock:
            hits: set[str] | None = None
            for tok in tokens:
                posting = self._postings.get(tok, set())
                hits = set(posting) if hits is None else hits & posting
                if not hits:
                    return []
            records = [self._records[code] for code in hits or ()]
        return sorted(r.bibcode for r in records if filters.accepts(r))

    # e-print linkage

    @property
    def links(self) -> dict[str, EprintLink]:
        with self._lock:
            return dict(self._links)

    def link_for(self, eprint: str) -> EprintLink | None:
        return self._links.get(eprint)

    def _check_link(self, eprint: str, published: str) -> None:
        e = self._records.get(eprint)
        p = self._records.get(published)
        if e is None:
            raise RecordError(f"unknown bibcode {eprint}", "eprint")
        if p is None:
            raise RecordError(f"unknown bibcode {published}", "published")
        if e.kind is not Kind.EPRINT:
            raise RecordError(f"{eprint} is {e.kind.value}, not eprint", "eprint")
        if p.kind is Kind.EPRINT:
            raise RecordError(f"{published} is itself an eprint", "published")

    def link_eprint(self, eprint: Bibcode | str, published: Bibcode | str) -> EprintLink:
        eprint, published = canonical(eprint), canonical(published)
        with self._lock:
            self._check_link(eprint, published)
            link = EprintLink(eprint, published, "explicit")
            self._links[eprint] = link
        return link

    def add_link(self, link: EprintLink) -> None:
        """Restore a previously computed link (persistence path)."""
        with self._lock:
            self._check_link(link.eprint, link.published)
            self._links[link.eprint] = link

    def match_eprints(
        self,
        threshold: float = DEFAULT_MATCH_THRESHOLD,
        year_window: int = DEFAULT_YEAR_WINDOW,
    ) -> list[EprintLink]:
        """Link unlinked e-prints to published records by surname, year and title overlap."""
        made = []
        with self._lock:
            by_surname: dict[str, list[BibRecord]] = {}
            for rec in self._records.values():
                if rec.kind is not Kind.EPRINT and rec.first_author is not None:
                    by_surname.setdefault(rec.first_author.norm_surname, []).append(rec)
            for code in sorted(self._records):
                rec = self._records[code]
                if rec.kind is not Kind.EPRINT or code in self._links or rec.first_author is None:
                    continue
                scored = sorted(
                    (
                        (title_jaccard(rec.title, cand.title), cand.bibcode)
                        for cand in by_surname.get(rec.first_author.norm_surname, [])
                        if abs(cand.pub_year - rec.pub_year) <= year_window
                    ),
                    reverse=True,
                )
                scored = [s for s in scored if s[0] >= threshold]
                if not scored:
                    continue
                if len(scored) > 1 and scored[0][0] == scored[1][0]:
                    log.warning(
                        "ambiguous e-print match for %s: %s and %s tie at %.3f",
                        code, scored[0][1], scored[1][1], scored[0][0],
                    )
                    continue
                score, target = scored[0]
                link = EprintLink(code, target, "matched", score)
                self._links[code] = link
                made.append(link)
        return made


# record ingest file

_REPEATABLE = {"A", "S", "W"}


def parse_records(text: str, default_ingest: dt.date | None = None) -> list[BibRecord]:
    """Parse the tagged record format into records.

    Tags: R bibcode, T title, A author (repeatable), D year, J venue,
    V volume, P first page, F refereed 0/1, E kind, S source tag
    (repeatable), B abstract, W keyword (repeatable), I ingest date.
    """
    default_ingest = default_ingest or dt.date(1970, 1, 1)
    records = []
    for block in read_blocks(text):
        fields: dict[str, list[str]] = {}
        for tag, value, line_no in block:
            if tag not in _REPEATABLE and tag in fields:
                raise TaggedFormatError(f"duplicate %{tag}", line_no)
            fields.setdefault(tag, []).append(value)
        first = block[0][2]

        def one(tag: str, default: str | None = None) -> str | None:
            return fields.get(tag, [default])[0]

        try:
            bibcode = one("R")
            if bibcode is None:
                raise RecordError("missing %R", "bibcode")
            year_text = one("D") or bibcode[:4]
            kind = Kind(one("E", "journal"))
            rec = BibRecord(
                bibcode=bibcode,
                title=one("T", "") or "",
                authors=tuple(AuthorName.parse(a) for a in fields.get("A", [])),
                pub_year=int(year_text),
                venue=one("J", "") or "",
                volume=one("V"),
                first_page=one("P"),
                refereed=one("F", "0") == "1",
                kind=kind,
                abstract=one("B"),
                keywords=tuple(fields.get("W", [])),
                source_tags=frozenset(fields.get("S", [])),
                ingest_date=dt.date.fromisoformat(one("I")) if "I" in fields else default_ingest,
            )
        except (RecordError, ValueError) as exc:
            if isinstance(exc, TaggedFormatError):
                raise
            raise TaggedFormatError(str(exc), first) from exc
        records.append(rec)
    return records


def format_records(records: Iterable[BibRecord]) -> str:
    blocks = []
    for r in records:
        block = [("R", r.bibcode), ("T", r.title)]
        block += [("A", str(a)) for a in r.authors]
        block += [("D", str(r.pub_year)), ("J", r.venue)]
        if r.volume is not None:
            block.append(("V", r.volume))
        if r.first_page is not None:
            block.append(("P", r.first_page))
        block += [("F", "1" if r.refereed else "0"), ("E", r.kind.value)]
        block += [("S", s) for s in sorted(r.source_tags)]
        if r.abstract is not None:
            block.append(("B", r.abstract))
        block += [("W", k) for k in r.keywords]
        block.append(("I", r.ingest_date.isoformat()))
        blocks.append(block)
    return write_blocks(blocks)
