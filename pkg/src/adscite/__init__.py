"""Reference resolution and citation indexing for bibliographic corpora."""

from .bibcode import Bibcode, BibcodeError
from .citegraph import (
    CitationIndex,
    PolicyConfig,
    apply_eprint_policy,
    citations_of,
    rebuild_citation_index,
    references_of,
    source_coverage_report,
    unresolved_report,
)
from .corpus import BibRecord, CorpusStore, EprintLink, Kind, SearchFilter
from .metrics import CitationFilter, h_index, most_instructive, most_useful, rank_by_citations
from .names import AuthorName
from .refparse import ParsedReference, RawReference, parse_reference
from .resolver import ResolutionConfig, ResolvedReference, UnresolvedReference, resolve_batch, resolve_reference

__version__ = "0.1.0"
