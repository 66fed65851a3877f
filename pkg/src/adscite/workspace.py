"""Flat-file state shared by the pipeline stages of the command line tool."""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass
from pathlib import Path

from .alerts import StoredQuery, format_queries, parse_queries
from .citegraph import CitationIndex, PolicyConfig, format_index, load_index
from .corpus import CorpusStore, EprintLink, format_records, parse_records
from .refparse import RawReference, format_reference_file, parse_reference, parse_reference_file
from .resolver import Reason, ResolvedReference, SourceCount, UnresolvedReference


def _read(path: Path) -> str:
    return path.read_text("utf-8") if path.exists() else ""


def _rows(path: Path, maxsplit: int = -1) -> list[list[str]]:
    return [line.split("\t", maxsplit) for line in _read(path).splitlines() if line.strip() and not line.startswith("#")]


def _opt(value: str) -> str | None:
    return None if value == "-" else value


@dataclass
class Workspace:
    root: Path

    def __post_init__(self) -> None:
        self.root = Path(self.root)

    def path(self, name: str) -> Path:
        return self.root / name

    def ensure(self) -> None:
        self.root.mkdir(parents=True, exist_ok=True)

    def _write(self, name: str, text: str) -> None:
        self.ensure()
        tmp = self.path(name + ".tmp")
        tmp.write_text(text, "utf-8")
        tmp.replace(self.path(name))

    # corpus

    def load_store(self) -> CorpusStore:
        store = CorpusStore()
        for rec in parse_records(_read(self.path("records.txt"))):
            store.add_record(rec)
        store.mark_reference_list({r.citing_bibcode for r in self.load_references()})
        for eprint, published, origin, score in _rows(self.path("links.tsv")):
            store.add_link(EprintLink(eprint, published, origin, None if score == "-" else float(score)))
        return store

    def save_store(self, store: CorpusStore) -> None:
        self._write("records.txt", format_records(store))
        links = sorted(store.links.values(), key=lambda l: l.eprint)
        self._write("links.tsv", "".join(
            f"{l.eprint}\t{l.published}\t{l.origin}\t{'-' if l.match_score is None else repr(l.match_score)}\n"
            for l in links
        ))

    # raw references

    def load_references(self) -> list[RawReference]:
        return parse_reference_file(_read(self.path("references.txt")))

    def save_references(self, refs: list[RawReference]) -> None:
        refs = sorted(refs, key=lambda r: (r.citing_bibcode, r.source_tag, r.sequence))
        self._write("references.txt", format_reference_file(refs))

    # resolution output

    def save_resolution(self, resolved, unresolved, counts: dict[str, SourceCount]) -> None:
        self._write("resolved.tsv", "".join(
            f"{r.citing}\t{r.cited}\t{r.score!r}\t{r.source_tag}\t{r.resolved_date.isoformat()}\n"
            for r in resolved
        ))
        self._write("unresolved.tsv", "".join(
            f"{u.raw.citing_bibcode}\t{u.raw.source_tag}\t{u.raw.sequence}\t{u.raw.received_date.isoformat()}\t"
            f"{u.reason.value}\t{u.best_score!r}\t"
            f"{'-' if u.best_guess is None else u.best_guess.variant_index}\t{int(u.ambiguous)}\t{u.raw.text}\n"
            for u in unresolved
        ))
        self._write("counts.tsv", "".join(
            f"{tag}\t{c.attempted}\t{c.resolved}\t{c.first_year or '-'}\t{c.last_year or '-'}\n"
            for tag, c in sorted(counts.items())
        ))

    def load_resolved(self) -> list[ResolvedReference]:
        return [
            ResolvedReference(citing, cited, float(score), tag, dt.date.fromisoformat(day))
            for citing, cited, score, tag, day in _rows(self.path("resolved.tsv"))
        ]

    def load_unresolved(self) -> list[UnresolvedReference]:
        items = []
        for row in _rows(self.path("unresolved.tsv"), 8):
            citing, tag, seq, day, reason, score, variant, ambiguous, text = row
            raw = RawReference(citing, tag, int(seq), text, dt.date.fromisoformat(day))
            guess = None if variant == "-" else parse_reference(raw, int(variant))
            items.append(UnresolvedReference(raw, guess, float(score), Reason(reason), ambiguous == "1"))
        return items

    def load_counts(self) -> dict[str, SourceCount]:
        return {
            tag: SourceCount(int(a), int(r), None if lo == "-" else int(lo), None if hi == "-" else int(hi))
            for tag, a, r, lo, hi in _rows(self.path("counts.tsv"))
        }

    # index

    def has_index(self) -> bool:
        return self.path("index_manifest.json").exists()

    def save_index(self, index: CitationIndex, prefix: str = "index") -> None:
        pairs, manifest = format_index(index)
        self._write(f"{prefix}_pairs.tsv", pairs)
        self._write(f"{prefix}_manifest.json", manifest)

    def load_index(self, prefix: str = "index") -> CitationIndex | None:
        if not self.path(f"{prefix}_manifest.json").exists():
            return None
        return load_index(_read(self.path(f"{prefix}_pairs.tsv")), _read(self.path(f"{prefix}_manifest.json")))

    @staticmethod
    def empty_index(as_of: dt.date) -> CitationIndex:
        return CitationIndex.from_pairs([], PolicyConfig(as_of))

    # stored queries

    def load_queries(self) -> list[StoredQuery]:
        return parse_queries(_read(self.path("queries.txt")))

    def save_queries(self, queries: list[StoredQuery]) -> None:
        self._write("queries.txt", format_queries(queries))
