"""Citation index construction under the e-print policies, plus coverage reporting."""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .corpus import CorpusStore, EprintLink, Kind
from .resolver import ResolvedReference, SourceCount, UnresolvedReference, venue_key

log = logging.getLogger(__name__)

UNPARSED_KEY = "unparsed"


@dataclass(frozen=True)
class PolicyConfig:
    as_of: dt.date
    staleness_days: int = 365

    def __post_init__(self) -> None:
        if self.staleness_days <= 0:
            raise ValueError("staleness_days must be positive")


@dataclass(frozen=True)
class PolicyEvent:
    rule: str
    pair: tuple[str, str]
    detail: str = ""


def apply_eprint_policy(
    resolved: Iterable[ResolvedReference],
    store: CorpusStore,
    links: Mapping[str, EprintLink] | None,
    policy: PolicyConfig,
    events: list[PolicyEvent] | None = None,
) -> list[ResolvedReference]:
    """Drop, re-attribute or keep e-print reference pairs.

    * linked e-print whose published version has its own references: dropped
    * linked e-print otherwise: pairs move to the published record
    * unlinked e-print older than ``staleness_days``: dropped
    """
    resolved = list(resolved)
    links = store.links if links is None else links
    events = events if events is not None else []
    # pairs the published side holds on its own, before any re-attribution
    own_pairs: set[tuple[str, str]] = set()
    for ref in resolved:
        rec = store.find_by_bibcode(ref.citing)
        if rec is None or rec.kind is not Kind.EPRINT:
            own_pairs.add((ref.citing, ref.cited))
    has_own = {citing for citing, _ in own_pairs}

    kept: list[ResolvedReference] = []
    moved: set[tuple[str, str]] = set()
    for ref in resolved:
        rec = store.find_by_bibcode(ref.citing)
        if rec is None or rec.kind is not Kind.EPRINT:
            kept.append(ref)
            continue
        pair = (ref.citing, ref.cited)
        link = links.get(ref.citing)
        if link is not None:
            published = link.published
            if published in has_own:
                events.append(PolicyEvent("replaced-by-published", pair, published))
                continue
            new_pair = (published, ref.cited)
            if ref.cited == published:
                events.append(PolicyEvent("reattribution-self-loop", pair, published))
                continue
            if new_pair in own_pairs or new_pair in moved:
                events.append(PolicyEvent("reattribution-duplicate", pair, published))
                continue
            moved.add(new_pair)
            events.append(PolicyEvent("reattributed", pair, published))
            kept.append(replace(ref, citing=published, provenance=f"reattributed from {ref.citing}"))
            continue
        age = (policy.as_of - rec.ingest_date).days
        if age > policy.staleness_days:
            events.append(PolicyEvent("stale-eprint", pair, f"{age} days"))
            continue
        kept.append(ref)
    for ev in events:
        log.debug("policy %s: %s -> %s (%s)", ev.rule, ev.pair[0], ev.pair[1], ev.detail)
    return kept


@dataclass(frozen=True)
class CitationIndex:
    cited_to_citing: Mapping[str, tuple[str, ...]]
    citing_to_cited: Mapping[str, tuple[str, ...]]
    build_date: dt.date
    policy: PolicyConfig
    manifest: Mapping[str, object] = field(default_factory=dict)

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[str, str]],
        policy: PolicyConfig,
        build_date: dt.date | None = None,
        manifest: Mapping[str, object] | None = None,
    ) -> "CitationIndex":
        forward: dict[str, set[str]] = {}
        backward: dict[str, set[str]] = {}
        for citing, cited in pairs:
            if citing == cited:
                continue
            forward.setdefault(citing, set()).add(cited)
            backward.setdefault(cited, set()).add(citing)
        return cls(
            cited_to_citing={k: tuple(sorted(v)) for k, v in sorted(backward.items())},
            citing_to_cited={k: tuple(sorted(v)) for k, v in sorted(forward.items())},
            build_date=build_date or policy.as_of,
            policy=policy,
            manifest=dict(manifest or {}),
        )

    def pairs(self) -> list[tuple[str, str]]:
        return [(a, b) for a, refs in self.citing_to_cited.items() for b in refs]

    def __len__(self) -> int:
        return sum(len(v) for v in self.citing_to_cited.values())


def citations_of(index: CitationIndex, cited: str) -> tuple[str, ...]:
    return index.cited_to_citing.get(str(cited), ())


def references_of(index: CitationIndex, citing: str) -> tuple[str, ...]:
    return index.citing_to_cited.get(str(citing), ())


def _digest(rows: Iterable[str]) -> str:
    h = hashlib.sha256()
    for row in rows:
        h.update(row.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def rebuild_citation_index(
    resolved: Iterable[ResolvedReference],
    store: CorpusStore,
    links: Mapping[str, EprintLink] | None,
    policy: PolicyConfig,
    events: list[PolicyEvent] | None = None,
) -> CitationIndex:
    resolved = list(resolved)
    links = store.links if links is None else links
    surviving = apply_eprint_policy(resolved, store, links, policy, events)
    pairs = sorted({(r.citing, r.cited) for r in surviving})
    manifest = {
        "as_of": policy.as_of.isoformat(),
        "staleness_days": policy.staleness_days,
        "input_pairs": len(resolved),
        "output_pairs": len(pairs),
        "resolved_digest": _digest(sorted(f"{r.citing}\t{r.cited}\t{r.source_tag}" for r in resolved)),
        "links_digest": _digest(sorted(f"{l.eprint}\t{l.published}\t{l.origin}" for l in links.values())),
    }
    return CitationIndex.from_pairs(pairs, policy, manifest=manifest)


def format_index(index: CitationIndex) -> tuple[str, str]:
    """Tab-separated pair list and a JSON build manifest."""
    pairs = "".join(f"{a}\t{b}\n" for a, b in index.pairs())
    manifest = dict(index.manifest)
    manifest["build_date"] = index.build_date.isoformat()
    manifest["pairs_digest"] = _digest(f"{a}\t{b}" for a, b in index.pairs())
    return pairs, json.dumps(manifest, indent=2, sort_keys=True) + "\n"


def load_index(pairs_text: str, manifest_text: str) -> CitationIndex:
    manifest = json.loads(manifest_text)
    policy = PolicyConfig(dt.date.fromisoformat(manifest["as_of"]), manifest["staleness_days"])
    pairs = [tuple(line.split("\t")) for line in pairs_text.splitlines() if line.strip()]
    return CitationIndex.from_pairs(
        pairs, policy, dt.date.fromisoformat(manifest["build_date"]), manifest
    )


# unresolved accounting


def unresolved_key(item: UnresolvedReference) -> str:
    guess = item.best_guess
    if guess is None:
        return UNPARSED_KEY
    surname = guess.first_author.norm_surname if guess.first_author else ""
    year = str(guess.year) if guess.year is not None else ""
    venue = venue_key(guess.venue_token or "")
    if not (surname or year or venue):
        return UNPARSED_KEY
    return f"{surname}|{year}|{venue}"


def unresolved_report(unresolved: Iterable[UnresolvedReference], k: int = 20) -> list[tuple[str, int]]:
    """Most frequent unresolved sources, grouped by (surname, year, venue)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = Counter(unresolved_key(item) for item in unresolved)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


@dataclass(frozen=True)
class CoverageRow:
    source_tag: str
    attempted: int
    resolved: int
    rate: str
    date_range: str


def percent(part: int, whole: int) -> int:
    """Whole percent, rounding halves up."""
    return (200 * part + whole) // (2 * whole)


def source_coverage_report(batch_counts: Mapping[str, SourceCount]) -> list[CoverageRow]:
    rows = []
    for tag in sorted(batch_counts):
        c = batch_counts[tag]
        rate = "n/a" if c.attempted == 0 else f"{percent(c.resolved, c.attempted)}%"
        if c.first_year is None:
            span = "n/a"
        else:
            span = f"{c.first_year}-{c.last_year}"
        rows.append(CoverageRow(tag, c.attempted, c.resolved, rate, span))
    return rows


def format_coverage(rows: Iterable[CoverageRow]) -> str:
    lines = ["Source\tAttempted\tRecords\tResolved\tDate Range"]
    lines += [f"{r.source_tag}\t{r.attempted}\t{r.resolved}\t{r.rate}\t{r.date_range}" for r in rows]
    return "\n".join(lines) + "\n"
