import datetime as dt
import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from adscite.citegraph import (
    CitationIndex,
    PolicyConfig,
    apply_eprint_policy,
    citations_of,
    format_coverage,
    format_index,
    load_index,
    rebuild_citation_index,
    references_of,
    source_coverage_report,
    unresolved_report,
)
from adscite.corpus import Kind
from adscite.resolver import Reason, SourceCount, UnresolvedReference
from adscite.refparse import parse_reference

from helpers import DAY, pair, raw, record, store_of

E = "2005arXiv0507.0123N"
P = "2006ApJ...640..233N"
X = "2003MNRAS.340.1001D"
Y = "2004A&A...420...89H"
A = "2005A&A...440....1L"
C = "2006AJ....131...50M"
POLICY = PolicyConfig(as_of=DAY)


def eprint_store(e_ingest=dt.date(2006, 1, 1)):
    return store_of(
        record(E, authors=("Nakamura, Y.",), kind=Kind.EPRINT, ingest=e_ingest),
        record(P, authors=("Nakamura, Y.",)),
        record(X), record(Y), record(A), record(C),
    )


def test_linked_eprint_replaced_when_published_has_references():
    store = eprint_store()
    store.link_eprint(E, P)
    out = apply_eprint_policy([pair(E, X), pair(E, Y), pair(P, X)], store, None, POLICY)
    assert [(r.citing, r.cited) for r in out] == [(P, X)]


def test_linked_eprint_reattributed_when_published_has_none():
    store = eprint_store()
    store.link_eprint(E, P)
    out = apply_eprint_policy([pair(E, X, score=0.9)], store, None, POLICY)
    assert [(r.citing, r.cited, r.score, r.source_tag) for r in out] == [(P, X, 0.9, "UCP")]
    assert out[0].provenance == f"reattributed from {E}"


def test_reattribution_drops_self_loops_and_duplicates():
    store = eprint_store()
    store.link_eprint(E, P)
    events = []
    out = apply_eprint_policy([pair(E, P), pair(E, X), pair(E, X, source="arXiv")], store, None, POLICY, events)
    assert [(r.citing, r.cited) for r in out] == [(P, X)]
    assert [e.rule for e in events] == ["reattribution-self-loop", "reattributed", "reattribution-duplicate"]


@pytest.mark.parametrize("age, kept", [(200, True), (365, True), (366, False), (400, False)])
def test_staleness(age, kept):
    store = eprint_store(e_ingest=DAY - dt.timedelta(days=age))
    out = apply_eprint_policy([pair(E, X)], store, None, POLICY)
    assert bool(out) is kept


def test_published_stale_eprint_is_restored_via_link():
    store = eprint_store(e_ingest=DAY - dt.timedelta(days=900))
    assert apply_eprint_policy([pair(E, X)], store, None, POLICY) == []
    store.link_eprint(E, P)
    assert [(r.citing, r.cited) for r in apply_eprint_policy([pair(E, X)], store, None, POLICY)] == [(P, X)]


def test_policy_idempotent():
    store = eprint_store(e_ingest=DAY - dt.timedelta(days=10))
    once = apply_eprint_policy([pair(E, X), pair(E, Y), pair(A, X)], store, {}, POLICY)
    assert apply_eprint_policy(once, store, {}, POLICY) == once
    store.link_eprint(E, P)
    once = apply_eprint_policy([pair(E, X), pair(E, Y), pair(A, X)], store, None, POLICY)
    assert apply_eprint_policy(once, store, None, POLICY) == once


def test_shrinking_staleness_never_adds_pairs():
    rng = random.Random(3)
    store = store_of(*[record(f"2005arXiv05{i:02d}.0001Q", authors=("Quinn, F.",), kind=Kind.EPRINT,
                              ingest=DAY - dt.timedelta(days=rng.randint(0, 800))) for i in range(30)], record(X))
    pairs = [pair(f"2005arXiv05{i:02d}.0001Q", X) for i in range(30)]
    sizes = [len(apply_eprint_policy(pairs, store, {}, PolicyConfig(DAY, d))) for d in (800, 500, 365, 100, 1)]
    assert sizes == sorted(sizes, reverse=True)


# inversion


def test_inversion():
    index = rebuild_citation_index([pair(A, X), pair(C, X)], store_of(), {}, POLICY)
    assert citations_of(index, X) == (A, C)
    assert references_of(index, A) == (X,)


def test_duplicate_sources_count_once():
    index = rebuild_citation_index([pair(A, X, "UCP"), pair(A, X, "ISI")], store_of(), {}, POLICY)
    assert citations_of(index, X) == (A,) and len(index) == 1


def test_empty_index():
    index = rebuild_citation_index([], store_of(), {}, POLICY)
    assert len(index) == 0 and citations_of(index, X) == () and references_of(index, X) == ()


def test_policy_removed_eprint_absent_everywhere():
    store = eprint_store()
    store.link_eprint(E, P)
    index = rebuild_citation_index([pair(E, X), pair(E, Y), pair(P, Y), pair(A, X)], store, None, POLICY)
    for cited in (X, Y):
        assert E not in citations_of(index, cited)
    assert citations_of(index, X) == (A,)
    assert citations_of(index, Y) == (P,)


def test_references_of_without_list_is_empty():
    store = store_of(record(C))
    index = rebuild_citation_index([pair(A, X)], store, {}, POLICY)
    assert not store.find_by_bibcode(C).has_reference_list
    assert references_of(index, C) == ()


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), max_size=200))
def test_duality(edges):
    codes = [f"2000ApJ...{i:03d}....1A" for i in range(31)]
    index = CitationIndex.from_pairs([(codes[a], codes[b]) for a, b in edges], POLICY)
    fwd = {(a, b) for a, refs in index.citing_to_cited.items() for b in refs}
    bwd = {(a, b) for b, citers in index.cited_to_citing.items() for a in citers}
    assert fwd == bwd == {(codes[a], codes[b]) for a, b in edges if a != b}


def test_rebuild_is_pure():
    store = eprint_store()
    store.link_eprint(E, P)
    refs = [pair(E, X), pair(A, X), pair(C, Y)]
    a = rebuild_citation_index(refs, store, None, POLICY)
    b = rebuild_citation_index(list(reversed(refs)), store, None, POLICY)
    assert a.citing_to_cited == b.citing_to_cited and a.cited_to_citing == b.cited_to_citing
    assert format_index(a) == format_index(b)


def test_index_export_round_trip():
    index = rebuild_citation_index([pair(A, X), pair(C, X)], store_of(), {}, POLICY)
    pairs_text, manifest_text = format_index(index)
    assert pairs_text == f"{A}\t{X}\n{C}\t{X}\n"
    manifest = json.loads(manifest_text)
    assert manifest["as_of"] == "2006-09-30" and manifest["staleness_days"] == 365
    assert {"resolved_digest", "links_digest", "pairs_digest"} <= set(manifest)
    again = load_index(pairs_text, manifest_text)
    assert again.cited_to_citing == index.cited_to_citing


# reports


def unres(text, reason=Reason.NO_CANDIDATE):
    r = raw(text)
    try:
        guess = parse_reference(r)
    except Exception:
        guess = None
        reason = Reason.PARSE_FAILED
    return UnresolvedReference(r, guess, 0.0, reason)


def test_unresolved_grouping():
    items = [unres("Einstein, A. 1905, Ann. Phys., 17, 891"),
             unres("Einstein A., 1905, Ann. Phys., 18, 639"),
             unres("[2] A. Einstein, Ann. Phys. 17, 132 (1905)"),
             unres("Planck, M. 1901, Ann. Phys., 4, 553"),
             unres("Bohr, N. 1913, Phil. Mag., 26, 1")]
    report = unresolved_report(items, 1)
    assert report == [("einstein|1905|annphys", 3)]
    assert len(unresolved_report(items, 10)) == 3


def test_unparsed_sentinel_ranked_normally():
    items = [unres("private communication"), unres("in press"), unres("Bohr, N. 1913, Phil. Mag., 26, 1")]
    assert unresolved_report(items, 5) == [("unparsed", 2), ("bohr|1913|philmag", 1)]


def test_unresolved_ties_by_key():
    items = [unres("Zeta, Z. 1913, Phil. Mag., 26, 1"), unres("Alpha, A. 1913, Phil. Mag., 26, 1")]
    assert [k for k, _ in unresolved_report(items, 5)] == ["alpha|1913|philmag", "zeta|1913|philmag"]
    with pytest.raises(ValueError):
        unresolved_report(items, 0)


def test_coverage_report():
    rows = source_coverage_report({
        "ISI": SourceCount(10, 8, 1982, 2002),
        "OCR": SourceCount(0, 0, None, None),
        "UCP": SourceCount(8, 7, 1995, 2006),
    })
    assert [(r.source_tag, r.rate, r.date_range) for r in rows] == [
        ("ISI", "80%", "1982-2002"), ("OCR", "n/a", "n/a"), ("UCP", "88%", "1995-2006")]
    text = format_coverage(rows)
    assert text.splitlines()[0] == "Source\tAttempted\tRecords\tResolved\tDate Range"
    assert "ISI\t10\t8\t80%\t1982-2002" in text


def test_percent_rounds_half_up():
    rows = source_coverage_report({"X": SourceCount(8, 1, 2000, 2000)})  # 12.5%
    assert rows[0].rate == "13%"
