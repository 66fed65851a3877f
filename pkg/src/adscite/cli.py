"""``adscite`` command line tool.

Each invocation runs one pipeline stage against a workspace directory::

    adscite ingest-records records.txt
    adscite ingest-refs refs.txt
    adscite resolve
    adscite build-index --as-of 2006-09-30
    adscite query cites 1999ASPC..172..291A
    adscite report sources --figure sources.png

Data goes to stdout, diagnostics to stderr. Exit status is 0 on success,
1 on bad input and 2 on internal errors.
"""

from __future__ import annotations

import argparse
import datetime as dt
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .alerts import AlertRegistry, format_alerts, parse_queries
from .bibcode import BibcodeError, canonical
from .citegraph import (
    PolicyConfig,
    PolicyEvent,
    citations_of,
    format_coverage,
    rebuild_citation_index,
    references_of,
    source_coverage_report,
    unresolved_report,
)
from .corpus import CorpusStore, Kind, RecordError, SearchFilter, parse_records
from .export import export_rss, export_xml_abstracts
from .metrics import (
    CitationFilter,
    filtered_citations,
    h_index,
    most_instructive,
    most_useful,
    passes_filter,
    rank_by_citations,
)
from .names import AuthorName
from .refparse import (
    SectionNotFound,
    extract_reference_section,
    parse_document_file,
    parse_reference_file,
    split_reference_strings,
)
from .resolver import ResolutionConfig, VenueAbbrevTable, resolve_batch
from .tagged import TaggedFormatError
from .workspace import Workspace

log = logging.getLogger("adscite")

INPUT_ERRORS = (ValueError, KeyError, LookupError, OSError, BibcodeError, RecordError, TaggedFormatError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _date(text: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an ISO-8601 date: {text!r}") from None


def _bibcode(text: str) -> str:
    try:
        return canonical(text)
    except BibcodeError as exc:
        raise argparse.ArgumentTypeError(f"malformed bibcode {text!r} ({exc})") from None


def _year_range(text: str) -> tuple[int | None, int | None]:
    lo, sep, hi = text.partition(":")
    try:
        a = int(lo) if lo else None
        b = (int(hi) if hi else None) if sep else a
    except ValueError:
        raise argparse.ArgumentTypeError(f"year range must look like A:B, got {text!r}") from None
    return a, b


def _read_authors(path: str) -> tuple[AuthorName, ...]:
    lines = Path(path).read_text("utf-8").splitlines()
    return tuple(AuthorName.parse(line) for line in lines if line.strip())


def _filter(args) -> CitationFilter:
    lo, hi = args.year if args.year else (None, None)
    base = _read_authors(args.exclude_self) if args.exclude_self else ()
    return CitationFilter(
        refereed_only=args.refereed,
        year_min=lo,
        year_max=hi,
        exclude_self=bool(base),
        base_authors=base,
    )


def _add_filter_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--refereed", action="store_true", help="count refereed citing papers only")
    p.add_argument("--year", type=_year_range, metavar="A:B", help="citing-paper publication years")
    p.add_argument("--exclude-self", metavar="AUTHORS_FILE",
                   help='file of "Surname, I." lines; drop citers sharing an author')


def _out(text: str) -> None:
    sys.stdout.write(text)


def _load_index(ws: Workspace):
    index = ws.load_index()
    if index is None:
        raise UsageError("no citation index in workspace; run build-index first")
    return index


def _store_ready(ws: Workspace) -> CorpusStore:
    store = ws.load_store()
    if not len(store):
        raise UsageError(f"workspace {ws.root} has no records; run ingest-records first")
    return store


# commands


def cmd_ingest_records(args, ws: Workspace) -> None:
    store = ws.load_store()
    added = updated = 0
    for rec in parse_records(Path(args.file).read_text("utf-8"), args.date):
        if store.add_record(rec) == "updated":
            updated += 1
        else:
            added += 1
    ws.save_store(store)
    print(f"records: {added} added, {updated} updated, {len(store)} total", file=sys.stderr)


def cmd_ingest_refs(args, ws: Workspace) -> None:
    text = Path(args.file).read_text("utf-8")
    if args.document:
        incoming = []
        for doc in parse_document_file(text):
            try:
                section = extract_reference_section(doc)
            except SectionNotFound as exc:
                print(f"skipped: {exc}", file=sys.stderr)
                continue
            incoming += split_reference_strings(section, doc.citing_bibcode, doc.source_tag, doc.received_date)
    else:
        incoming = parse_reference_file(text)
    # a re-delivered list for (citing, source) replaces the earlier one
    replaced = {(r.citing_bibcode, r.source_tag) for r in incoming}
    refs = [r for r in ws.load_references() if (r.citing_bibcode, r.source_tag) not in replaced]
    ws.save_references(refs + incoming)
    print(f"references: {len(incoming)} ingested for {len(replaced)} reference lists", file=sys.stderr)


def _resolution_config(path: str | None) -> ResolutionConfig:
    if not path:
        return ResolutionConfig()
    data = json.loads(Path(path).read_text("utf-8"))
    return ResolutionConfig(**data)


def cmd_resolve(args, ws: Workspace) -> None:
    store = _store_ready(ws)
    config = _resolution_config(args.config)
    table = VenueAbbrevTable.load(args.venues)
    result = resolve_batch(ws.load_references(), store, config, table, args.date)
    ws.save_resolution(result.resolved, result.unresolved, result.per_source_counts)
    for raw, err in result.errors:
        print(f"error: {raw.citing_bibcode}#{raw.sequence}: {err}", file=sys.stderr)
    n = len(result.resolved) + len(result.unresolved)
    print(f"resolved {len(result.resolved)} of {n} references", file=sys.stderr)


def cmd_link(args, ws: Workspace) -> None:
    store = _store_ready(ws)
    link = store.link_eprint(args.eprint, args.published)
    ws.save_store(store)
    _out(f"{link.eprint}\t{link.published}\t{link.origin}\n")


def cmd_match_eprints(args, ws: Workspace) -> None:
    store = _store_ready(ws)
    links = store.match_eprints(args.threshold, args.year_window)
    ws.save_store(store)
    _out("".join(f"{l.eprint}\t{l.published}\t{l.origin}\t{l.match_score:.3f}\n" for l in links))


def cmd_build_index(args, ws: Workspace) -> None:
    store = _store_ready(ws)
    policy = PolicyConfig(args.as_of, args.staleness)
    events: list[PolicyEvent] = []
    index = rebuild_citation_index(ws.load_resolved(), store, None, policy, events)
    ws.save_index(index)
    for ev in events:
        log.info("policy %s: %s -> %s %s", ev.rule, ev.pair[0], ev.pair[1], ev.detail)
    print(f"index: {len(index)} citation pairs ({len(events)} policy actions)", file=sys.stderr)


def cmd_query(args, ws: Workspace) -> None:
    store = ws.load_store()
    index = _load_index(ws)
    flt = _filter(args)
    if args.direction == "cites":
        listed = filtered_citations(index, store, [args.bibcode], flt).per_paper[args.bibcode]
    else:
        # filters apply to the listed papers, as they do for citers
        listed = tuple(c for c in references_of(index, args.bibcode) if passes_filter(c, store, flt))
    _out("".join(f"{code}\n" for code in listed))


def _selection(args, store: CorpusStore) -> list[str]:
    chosen: list[str] = list(args.bibcodes or [])
    if args.set_file:
        for line in Path(args.set_file).read_text("utf-8").splitlines():
            if line.strip():
                chosen.append(canonical(line.strip()))
    if args.search:
        chosen += store.search_records(args.search)
    if args.author:
        who = AuthorName.parse(args.author)
        chosen += [r.bibcode for r in store if any(a.matches(who) for a in r.authors)]
    if not chosen:
        raise UsageError("select papers with bibcodes, --set-file, --search or --author")
    return list(dict.fromkeys(chosen))


def cmd_metrics(args, ws: Workspace) -> None:
    store = ws.load_store()
    index = _load_index(ws)
    papers = _selection(args, store)
    if args.kind == "rank":
        ranked, total = rank_by_citations(index, store, papers, _filter(args))
        if args.top:
            ranked = ranked[: args.top]
        _out("".join(f"{p.rank}\t{p.bibcode}\t{p.metric_value}\n" for p in ranked))
        _out(f"total\t\t{total}\n")
    elif args.kind == "hindex":
        _out(f"{h_index(index, store, papers, _filter(args))}\n")
    else:
        op = most_useful if args.kind == "useful" else most_instructive
        rows = op(index, papers, args.top or 20)
        _out("".join(f"{i}\t{code}\t{n}\n" for i, (code, n) in enumerate(rows, start=1)))


def cmd_report(args, ws: Workspace) -> None:
    if args.kind == "sources":
        rows = source_coverage_report(ws.load_counts())
        _out(format_coverage(rows))
        if args.figure:
            from .plotting import plot_coverage

            plot_coverage(rows, args.figure)
    else:
        items = unresolved_report(ws.load_unresolved(), args.top)
        _out("".join(f"{key}\t{count}\n" for key, count in items))
        if args.figure:
            from .plotting import plot_unresolved

            plot_unresolved(items, args.figure)


def cmd_alerts(args, ws: Workspace) -> None:
    registry = AlertRegistry({q.subscriber_id: q for q in ws.load_queries()})
    if args.action == "register":
        for q in parse_queries(Path(args.file).read_text("utf-8")):
            print(f"{q.subscriber_id}: {registry.register_stored_query(q)}", file=sys.stderr)
        ws.save_queries(list(registry.queries.values()))
        return
    store = ws.load_store()
    after = _load_index(ws)
    before = ws.load_index("alerts") or ws.empty_index(args.date)
    batches = registry.run(before, after, store, args.date)
    ws.save_queries(list(registry.queries.values()))
    ws.save_index(after, "alerts")
    _out(format_alerts(batches))
    if args.rss:
        Path(args.rss).mkdir(parents=True, exist_ok=True)
        for batch in batches:
            codes = list(dict.fromkeys(
                [c for c, _ in batch.new_citations] + list(batch.new_author_papers)
                + [p.bibcode for p in batch.topic_papers_ranked]
            ))
            records = [store.find_by_bibcode(c) for c in codes]
            feed = export_rss([r for r in records if r], f"alerts for {batch.subscriber_id}")
            Path(args.rss, f"{batch.subscriber_id}.xml").write_text(feed, "utf-8")


def cmd_export(args, ws: Workspace) -> None:
    store = ws.load_store()
    lo, hi = args.year if args.year else (None, None)
    filters = SearchFilter(
        year_range=(lo or 1500, hi or 2100) if args.year else None,
        refereed_only=args.refereed,
        kind=Kind(args.kind) if args.kind else None,
    )
    codes = store.search_records(args.terms, filters)
    records = [store.find_by_bibcode(c) for c in codes]
    query = " ".join(args.terms)
    if args.format == "xml":
        index = _load_index(ws)
        per = filtered_citations(index, store, codes).per_paper
        text = export_xml_abstracts(records, {c: len(v) for c, v in per.items()}, query=query)
    else:
        text = export_rss(records, args.title or f"adscite: {query}")
    if args.output:
        Path(args.output).write_text(text, "utf-8")
    else:
        _out(text)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="adscite", description="Reference resolution and citation index tool.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-w", "--workspace", default=os.environ.get("ADSCITE_WORKSPACE", ".adscite"),
                        help="state directory (default: $ADSCITE_WORKSPACE or .adscite)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    today = dt.date.today()

    p = sub.add_parser("ingest-records", help="add or replace records from a tagged file")
    p.add_argument("file")
    p.add_argument("--date", type=_date, default=today, help="ingest date for records without %%I")
    p.set_defaults(func=cmd_ingest_records)

    p = sub.add_parser("ingest-refs", help="add reference lists")
    p.add_argument("file")
    p.add_argument("--document", action="store_true", help="bodies are full text; extract and split")
    p.set_defaults(func=cmd_ingest_refs)

    p = sub.add_parser("resolve", help="resolve all ingested references")
    p.add_argument("--config", help="JSON with threshold, weights, max_variants")
    p.add_argument("--venues", help="venue abbreviation table (TSV)")
    p.add_argument("--date", type=_date, default=today)
    p.set_defaults(func=cmd_resolve)

    p = sub.add_parser("link", help="explicitly link an e-print to its published version")
    p.add_argument("eprint", type=_bibcode)
    p.add_argument("published", type=_bibcode)
    p.set_defaults(func=cmd_link)

    p = sub.add_parser("match-eprints", help="link e-prints to published versions automatically")
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--year-window", type=int, default=1)
    p.set_defaults(func=cmd_match_eprints)

    p = sub.add_parser("build-index", help="invert resolved references into the citation index")
    p.add_argument("--as-of", type=_date, default=today)
    p.add_argument("--staleness", type=int, default=365, metavar="DAYS")
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("query", help="citations to or references from one record")
    p.add_argument("direction", choices=["cites", "refs"])
    p.add_argument("bibcode", type=_bibcode)
    _add_filter_args(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("metrics", help="ranking, h-index and second-order operators")
    p.add_argument("kind", choices=["rank", "hindex", "useful", "instructive"])
    p.add_argument("bibcodes", nargs="*", type=_bibcode)
    p.add_argument("--set-file", help="file with one bibcode per line")
    p.add_argument("--search", nargs="+", metavar="TERM")
    p.add_argument("--author", help='all records by "Surname, I."')
    p.add_argument("--top", type=int)
    _add_filter_args(p)
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("report", help="coverage and unresolved-reference reports")
    p.add_argument("kind", choices=["sources", "unresolved"])
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--figure", help="also write a bar chart to this path")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("alerts", help="stored-query notifications")
    p.add_argument("action", choices=["register", "run"])
    p.add_argument("file", nargs="?", help="stored query file (register)")
    p.add_argument("--date", type=_date, default=today)
    p.add_argument("--rss", metavar="DIR", help="also write one RSS feed per subscriber")
    p.set_defaults(func=cmd_alerts)

    p = sub.add_parser("export", help="XML Abstracts or RSS for a term search")
    p.add_argument("format", choices=["xml", "rss"])
    p.add_argument("terms", nargs="+")
    p.add_argument("--refereed", action="store_true")
    p.add_argument("--year", type=_year_range, metavar="A:B")
    p.add_argument("--kind", choices=[k.value for k in Kind])
    p.add_argument("--title", help="RSS channel title")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help and --version
        return exc.code if isinstance(exc.code, int) else 1
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    if args.command == "alerts" and args.action == "register" and not args.file:
        print("adscite: alerts register needs a stored query file", file=sys.stderr)
        return 1
    ws = Workspace(Path(args.workspace))
    try:
        args.func(args, ws)
    except UsageError as exc:
        print(f"adscite: {exc}", file=sys.stderr)
        return 1
    except INPUT_ERRORS as exc:
        print(f"adscite: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"adscite: internal error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
