"""Citation counts, filters, h-index and the set-level "useful"/"instructive" operators."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .citegraph import CitationIndex, citations_of, references_of
from .corpus import CorpusStore
from .names import AuthorName


@dataclass(frozen=True)
class CitationFilter:
    refereed_only: bool = False
    year_min: int | None = None
    year_max: int | None = None
    exclude_self: bool = False
    base_authors: tuple[AuthorName, ...] = ()

    def __post_init__(self) -> None:
        if self.year_min is not None and self.year_max is not None and self.year_min > self.year_max:
            raise ValueError("year_min > year_max")
        if self.exclude_self and not self.base_authors:
            raise ValueError("exclude_self needs base_authors")

    @property
    def is_identity(self) -> bool:
        return not (self.refereed_only or self.exclude_self) and self.year_min is None and self.year_max is None


NO_FILTER = CitationFilter()


@dataclass(frozen=True)
class RankedPaper:
    bibcode: str
    metric_value: int
    rank: int


@dataclass
class FilteredCitations:
    per_paper: dict[str, tuple[str, ...]]
    total: int
    unknown: list[str] = field(default_factory=list)


def passes_filter(citer: str, store: CorpusStore, flt: CitationFilter) -> bool:
    if flt.is_identity:
        return True
    rec = store.find_by_bibcode(citer)
    if rec is None:
        return False
    if flt.refereed_only and not rec.refereed:
        return False
    if flt.year_min is not None and rec.pub_year < flt.year_min:
        return False
    if flt.year_max is not None and rec.pub_year > flt.year_max:
        return False
    if flt.exclude_self and any(a.matches(b) for a in rec.authors for b in flt.base_authors):
        return False
    return True


def filtered_citations(
    index: CitationIndex,
    store: CorpusStore,
    targets: Iterable[str],
    flt: CitationFilter = NO_FILTER,
) -> FilteredCitations:
    per_paper: dict[str, tuple[str, ...]] = {}
    unknown = []
    for target in dict.fromkeys(targets):
        if store.find_by_bibcode(target) is None and target not in index.cited_to_citing:
            unknown.append(target)
        per_paper[target] = tuple(c for c in citations_of(index, target) if passes_filter(c, store, flt))
    return FilteredCitations(per_paper, sum(len(v) for v in per_paper.values()), unknown)


def _rank(counts: dict[str, int]) -> list[RankedPaper]:
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [RankedPaper(code, value, i) for i, (code, value) in enumerate(ordered, start=1)]


def rank_by_citations(
    index: CitationIndex,
    store: CorpusStore,
    papers: Iterable[str],
    flt: CitationFilter = NO_FILTER,
) -> tuple[list[RankedPaper], int]:
    result = filtered_citations(index, store, papers, flt)
    counts = {code: len(citers) for code, citers in result.per_paper.items()}
    return _rank(counts), result.total


def h_from_counts(counts: Iterable[int]) -> int:
    h = 0
    for rank, count in enumerate(sorted(counts, reverse=True), start=1):
        if count < rank:
            break
        h = rank
    return h


def h_index(
    index: CitationIndex,
    store: CorpusStore,
    papers: Iterable[str],
    flt: CitationFilter = NO_FILTER,
) -> int:
    result = filtered_citations(index, store, papers, flt)
    return h_from_counts(len(v) for v in result.per_paper.values())


def _top(counter: Counter, k: int) -> list[tuple[str, int]]:
    if k < 1:
        raise ValueError("k must be >= 1")
    return sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k]


def most_useful(index: CitationIndex, papers: Iterable[str], k: int = 20) -> list[tuple[str, int]]:
    """Records most often referenced by members of ``papers``."""
    counter: Counter = Counter()
    for member in dict.fromkeys(papers):
        counter.update(set(references_of(index, member)))
    return _top(counter, k)


def most_instructive(index: CitationIndex, papers: Iterable[str], k: int = 20) -> list[tuple[str, int]]:
    """Records citing the largest number of members of ``papers``."""
    counter: Counter = Counter()
    for member in dict.fromkeys(papers):
        counter.update(set(citations_of(index, member)))
    return _top(counter, k)
