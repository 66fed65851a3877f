"""Resolve parsed references to existing records.

For each parse variant we build tentative bibcodes, keep those that exist
in the corpus, score them against the parsed fields and accept the best
candidate if it clears the threshold.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping

from .bibcode import Bibcode, BibcodeError
from .corpus import BibRecord, CorpusStore
from .names import fold, normalize_surname
from .refparse import ParsedReference, ParseFailure, RawReference, parse_reference

DEFAULT_WEIGHTS = {"year": 0.25, "authors": 0.25, "venue": 0.25, "volume_page": 0.25}


class MissingYear(ValueError):
    pass


class UnknownCitingBibcode(LookupError):
    pass


def venue_key(token: str) -> str:
    return re.sub(r"[^a-z0-9&]+", "", fold(token))


@dataclass(frozen=True)
class VenueTarget:
    venue_code: str
    volume: str | None = None  # fixed volume field, e.g. "conf" for proceedings


@dataclass
class VenueAbbrevTable:
    entries: dict[str, list[VenueTarget]] = field(default_factory=dict)

    def add(self, token: str, venue_code: str, volume: str | None = None) -> None:
        if not 1 <= len(venue_code) <= 5:
            raise ValueError(f"venue code {venue_code!r} must be 1-5 characters")
        targets = self.entries.setdefault(venue_key(token), [])
        target = VenueTarget(venue_code, volume or None)
        if target not in targets:
            targets.append(target)

    def lookup(self, token: str | None) -> list[VenueTarget]:
        if not token:
            return []
        return list(self.entries.get(venue_key(token), []))

    @classmethod
    def from_tsv(cls, text: str) -> "VenueAbbrevTable":
        table = cls()
        for line_no, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.rstrip("\n").split("\t")
            if len(cols) not in (2, 3):
                raise ValueError(f"line {line_no}: expected 2 or 3 tab-separated columns")
            table.add(*cols)
        return table

    @classmethod
    def load(cls, path: str | Path | None = None) -> "VenueAbbrevTable":
        if path is None:
            text = resources.files("adscite").joinpath("data/venues.tsv").read_text("utf-8")
        else:
            text = Path(path).read_text("utf-8")
        return cls.from_tsv(text)


@dataclass(frozen=True)
class ResolutionConfig:
    threshold: float = 0.8
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    max_variants: int = 3

    def __post_init__(self) -> None:
        if not 0 < self.threshold <= 1:
            raise ValueError("threshold must be in (0, 1]")
        if set(self.weights) != set(DEFAULT_WEIGHTS):
            raise ValueError(f"weights must have keys {sorted(DEFAULT_WEIGHTS)}")
        if not math.isclose(sum(self.weights.values()), 1.0, abs_tol=1e-9):
            raise ValueError("weights must sum to 1")
        if self.max_variants < 1:
            raise ValueError("max_variants must be >= 1")


@dataclass(frozen=True)
class ResolvedReference:
    citing: str
    cited: str
    score: float
    source_tag: str
    resolved_date: dt.date
    provenance: str | None = None

    def __post_init__(self) -> None:
        if self.citing == self.cited:
            raise ValueError(f"self-citation {self.citing}")
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("score outside [0, 1]")


class Reason(str, enum.Enum):
    PARSE_FAILED = "parse_failed"
    NO_CANDIDATE = "no_candidate"
    BELOW_THRESHOLD = "below_threshold"


@dataclass(frozen=True)
class UnresolvedReference:
    raw: RawReference
    best_guess: ParsedReference | None
    best_score: float
    reason: Reason
    ambiguous: bool = False


@dataclass(frozen=True)
class SourceCount:
    attempted: int = 0
    resolved: int = 0
    first_year: int | None = None
    last_year: int | None = None

    def add(self, resolved: bool, year: int | None) -> "SourceCount":
        years = [y for y in (self.first_year, self.last_year, year) if y is not None]
        return SourceCount(
            self.attempted + 1,
            self.resolved + int(resolved),
            min(years) if years else None,
            max(years) if years else None,
        )


@dataclass
class BatchResult:
    resolved: list[ResolvedReference] = field(default_factory=list)
    unresolved: list[UnresolvedReference] = field(default_factory=list)
    errors: list[tuple[RawReference, str]] = field(default_factory=list)
    per_source_counts: dict[str, SourceCount] = field(default_factory=dict)


def _author_initial(parsed: ParsedReference) -> str:
    first = parsed.first_author
    if first is None:
        return "."
    letters = normalize_surname(first.surname)
    return letters[0].upper() if letters else "."


def _split_page(page: str | None) -> tuple[str, str]:
    """``"L100"`` -> (``"L"``, ``"100"``); plain pages get the ``.`` qualifier."""
    if page and page[0].isalpha():
        return page[0].upper(), page[1:]
    return ".", page or ""


def tentative_bibcodes(parsed: ParsedReference, table: VenueAbbrevTable) -> list[str]:
    if parsed.year is None:
        raise MissingYear(f"cannot form a bibcode without a year: {parsed.raw.text!r}")
    qualifier, page = _split_page(parsed.page)
    codes: list[str] = []
    for target in table.lookup(parsed.venue_token):
        volume = target.volume if target.volume is not None else (parsed.volume or "")
        try:
            code = str(Bibcode(parsed.year, target.venue_code, volume, qualifier, page, _author_initial(parsed)))
        except BibcodeError:
            continue
        if code not in codes:
            codes.append(code)
    return codes


def edit_similarity(a: str, b: str) -> float:
    """1 - Levenshtein distance / longer length."""
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return 1.0 - prev[-1] / max(len(a), len(b))


def _record_volume(record: BibRecord) -> str:
    return record.volume if record.volume is not None else record.code.volume


def _record_page(record: BibRecord) -> str:
    if record.first_page is not None:
        return record.first_page
    code = record.code
    return (code.qualifier if code.qualifier != "." else "") + code.page


def component_scores(
    parsed: ParsedReference, record: BibRecord, table: VenueAbbrevTable | None = None
) -> dict[str, float]:
    table = table if table is not None else VenueAbbrevTable.load()
    if parsed.year is None:
        year = 0.0
    else:
        delta = abs(parsed.year - record.pub_year)
        year = 1.0 if delta == 0 else 0.5 if delta == 1 else 0.0

    authors = 0.0
    if parsed.first_author is not None and record.first_author is not None:
        authors = edit_similarity(parsed.first_author.norm_surname, record.first_author.norm_surname)

    targets = table.lookup(parsed.venue_token)
    code = record.code
    matching = [t for t in targets if t.venue_code == code.venue_code]
    venue = 1.0 if matching else 0.0

    volume = parsed.volume
    if volume is None and matching and matching[0].volume is not None:
        volume = matching[0].volume
    vol_ok = volume is not None and fold(volume) == fold(_record_volume(record))
    page_ok = parsed.page is not None and fold(parsed.page) == fold(_record_page(record))
    volume_page = (vol_ok + page_ok) / 2
    return {"year": year, "authors": authors, "venue": venue, "volume_page": volume_page}


def similarity_score(
    parsed: ParsedReference,
    record: BibRecord,
    config: ResolutionConfig | None = None,
    table: VenueAbbrevTable | None = None,
) -> float:
    config = config or ResolutionConfig()
    parts = component_scores(parsed, record, table)
    total = math.fsum(config.weights[k] * parts[k] for k in sorted(parts))
    return min(1.0, max(0.0, total))


def _initials_agree(parsed: ParsedReference, record: BibRecord) -> bool:
    a, b = parsed.first_author, record.first_author
    return a is not None and b is not None and bool(a.first_initial) and a.first_initial == b.first_initial


def resolve_reference(
    raw: RawReference,
    store: CorpusStore,
    config: ResolutionConfig | None = None,
    table: VenueAbbrevTable | None = None,
    resolved_on: dt.date | None = None,
) -> ResolvedReference | UnresolvedReference:
    """Resolve one reference string.

    Every parse variant (up to ``max_variants``) is scored and the single best
    candidate across variants is kept, so the chosen record never depends on
    the threshold. Distinct records tied at the top score, with no
    first-initial agreement to separate them, count as ambiguous.
    """
    config = config or ResolutionConfig()
    table = table if table is not None else VenueAbbrevTable.load()
    if raw.citing_bibcode not in store:
        raise UnknownCitingBibcode(raw.citing_bibcode)

    first_parse: ParsedReference | None = None
    # (score, initial agreement, -variant) -> best per bibcode
    best: dict[str, tuple[float, bool, int, ParsedReference]] = {}
    for variant in range(config.max_variants):
        try:
            parsed = parse_reference(raw, variant)
        except ParseFailure:
            break
        first_parse = first_parse or parsed
        if parsed.year is None:
            continue
        for code in tentative_bibcodes(parsed, table):
            record = store.find_by_bibcode(code)
            if record is None and code[13] == ".":
                record = store.find_by_bibcode(code[:13] + "L" + code[14:])
            if record is None or record.bibcode == raw.citing_bibcode:
                continue
            entry = (similarity_score(parsed, record, config, table), _initials_agree(parsed, record), -variant, parsed)
            if record.bibcode not in best or entry[:3] > best[record.bibcode][:3]:
                best[record.bibcode] = entry

    if first_parse is None:
        return UnresolvedReference(raw, None, 0.0, Reason.PARSE_FAILED)
    if not best:
        return UnresolvedReference(raw, first_parse, 0.0, Reason.NO_CANDIDATE)

    ranked = sorted(best.items(), key=lambda kv: (kv[1][0], kv[1][1]), reverse=True)
    top_code, (top_score, top_initial, _, top_parse) = ranked[0]
    ambiguous = len(ranked) > 1 and ranked[1][1][:2] == (top_score, top_initial)
    if top_score >= config.threshold and not ambiguous:
        return ResolvedReference(
            citing=raw.citing_bibcode,
            cited=top_code,
            score=top_score,
            source_tag=raw.source_tag,
            resolved_date=resolved_on or dt.date.today(),
        )
    return UnresolvedReference(raw, top_parse, top_score, Reason.BELOW_THRESHOLD, ambiguous)


def resolve_batch(
    raws: Iterable[RawReference],
    store: CorpusStore,
    config: ResolutionConfig | None = None,
    table: VenueAbbrevTable | None = None,
    resolved_on: dt.date | None = None,
) -> BatchResult:
    config = config or ResolutionConfig()
    table = table if table is not None else VenueAbbrevTable.load()
    resolved_on = resolved_on or dt.date.today()
    result = BatchResult()
    for raw in raws:
        try:
            outcome = resolve_reference(raw, store, config, table, resolved_on)
        except (UnknownCitingBibcode, MissingYear) as exc:
            result.errors.append((raw, f"{type(exc).__name__}: {exc}"))
            continue
        citing = store.find_by_bibcode(raw.citing_bibcode)
        ok = isinstance(outcome, ResolvedReference)
        (result.resolved if ok else result.unresolved).append(outcome)
        counts = result.per_source_counts.get(raw.source_tag, SourceCount())
        result.per_source_counts[raw.source_tag] = counts.add(ok, citing.pub_year if citing else None)
    return result
