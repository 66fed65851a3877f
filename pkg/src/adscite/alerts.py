"""Stored-query notifications computed from the difference between two index builds."""

from __future__ import annotations

import datetime as dt
import threading
from dataclasses import dataclass, field, replace
from typing import Iterable

from .citegraph import CitationIndex, citations_of
from .corpus import CorpusStore, SearchFilter
from .metrics import RankedPaper, rank_by_citations
from .names import AuthorName
from .tagged import TaggedFormatError, read_blocks, write_blocks


@dataclass(frozen=True)
class StoredQuery:
    subscriber_id: str
    tracked_bibcodes: frozenset[str] = frozenset()
    followed_authors: tuple[AuthorName, ...] = ()
    topic_terms: tuple[str, ...] = ()
    last_run: dt.date = dt.date(1970, 1, 1)

    def __post_init__(self) -> None:
        if not self.subscriber_id.strip():
            raise ValueError("subscriber_id must be non-empty")
        if not (self.tracked_bibcodes or self.followed_authors or any(t.strip() for t in self.topic_terms)):
            raise ValueError(f"stored query {self.subscriber_id!r} has no interests")


@dataclass(frozen=True)
class AlertBatch:
    subscriber_id: str
    run_date: dt.date
    new_citations: tuple[tuple[str, str], ...] = ()
    new_author_papers: tuple[str, ...] = ()
    topic_papers_ranked: tuple[RankedPaper, ...] = ()

    def __bool__(self) -> bool:
        return bool(self.new_citations or self.new_author_papers or self.topic_papers_ranked)


@dataclass
class AlertRegistry:
    queries: dict[str, StoredQuery] = field(default_factory=dict)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def register_stored_query(self, query: StoredQuery) -> str:
        with self._lock:
            replaced = query.subscriber_id in self.queries
            self.queries[query.subscriber_id] = query
        return "replaced" if replaced else "registered"

    def run(
        self,
        before: CitationIndex,
        after: CitationIndex,
        store: CorpusStore,
        run_date: dt.date,
    ) -> list[AlertBatch]:
        with self._lock:
            batches, updated = run_alerts(self.queries.values(), before, after, store, run_date)
            self.queries = {q.subscriber_id: q for q in updated}
        return batches


def _new_citations(query: StoredQuery, before: CitationIndex, after: CitationIndex, store: CorpusStore):
    found = []
    for target in sorted(query.tracked_bibcodes):
        old = set(citations_of(before, target))
        for citer in citations_of(after, target):
            if citer not in old and citer in store:
                found.append((citer, target))
    return tuple(found)


def run_alerts(
    queries: Iterable[StoredQuery],
    before: CitationIndex,
    after: CitationIndex,
    store: CorpusStore,
    run_date: dt.date,
) -> tuple[list[AlertBatch], list[StoredQuery]]:
    """Evaluate every stored query; returns non-empty batches and queries with ``last_run`` advanced."""
    batches = []
    updated = []
    records = list(store)
    for query in sorted(queries, key=lambda q: q.subscriber_id):
        window = [r for r in records if query.last_run < r.ingest_date <= run_date]
        authors = tuple(
            r.bibcode for r in window
            if any(a.matches(f) for a in r.authors for f in query.followed_authors)
        )
        topic: tuple[RankedPaper, ...] = ()
        terms = [t for t in query.topic_terms if t.strip()]
        if terms and window:
            fresh = {r.bibcode for r in window}
            hits = [c for c in store.search_records(terms, SearchFilter()) if c in fresh]
            topic = tuple(rank_by_citations(after, store, hits)[0])
        batch = AlertBatch(query.subscriber_id, run_date, _new_citations(query, before, after, store), authors, topic)
        if batch:
            batches.append(batch)
        updated.append(replace(query, last_run=max(query.last_run, run_date)))
    return batches, updated


def format_alerts(batches: Iterable[AlertBatch]) -> str:
    out = []
    for b in batches:
        lines = [f"== {b.subscriber_id} {b.run_date.isoformat()}"]
        lines += [f"citation\t{citing}\t{cited}" for citing, cited in b.new_citations]
        lines += [f"author\t{code}" for code in b.new_author_papers]
        lines += [f"topic\t{p.rank}\t{p.bibcode}\t{p.metric_value}" for p in b.topic_papers_ranked]
        out.append("\n".join(lines))
    return "\n\n".join(out) + ("\n" if out else "")


# persistence: U subscriber, C tracked bibcode, A author, Q topic term, I last run


def parse_queries(text: str) -> list[StoredQuery]:
    queries = []
    for block in read_blocks(text):
        fields: dict[str, list[str]] = {}
        for tag, value, _ in block:
            fields.setdefault(tag, []).append(value)
        try:
            queries.append(StoredQuery(
                subscriber_id=fields.get("U", [""])[0],
                tracked_bibcodes=frozenset(fields.get("C", [])),
                followed_authors=tuple(AuthorName.parse(a) for a in fields.get("A", [])),
                topic_terms=tuple(fields.get("Q", [])),
                last_run=dt.date.fromisoformat(fields.get("I", ["1970-01-01"])[0]),
            ))
        except ValueError as exc:
            raise TaggedFormatError(str(exc), block[0][2]) from exc
    return queries


def format_queries(queries: Iterable[StoredQuery]) -> str:
    blocks = []
    for q in sorted(queries, key=lambda q: q.subscriber_id):
        block = [("U", q.subscriber_id)]
        block += [("C", c) for c in sorted(q.tracked_bibcodes)]
        block += [("A", str(a)) for a in q.followed_authors]
        block += [("Q", t) for t in q.topic_terms]
        block.append(("I", q.last_run.isoformat()))
        blocks.append(block)
    return write_blocks(blocks)
