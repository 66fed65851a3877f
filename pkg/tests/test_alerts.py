import datetime as dt

import pytest

from adscite.alerts import (
    AlertRegistry,
    StoredQuery,
    format_alerts,
    format_queries,
    parse_queries,
    run_alerts,
)
from adscite.citegraph import CitationIndex, PolicyConfig
from adscite.names import AuthorName

from helpers import DAY, record, store_of

T = "1999ASPC..172..291A"
A = "2006ApJ...645...77U"
W = "2006A&A...450..999W"


def idx(pairs):
    return CitationIndex.from_pairs(pairs, PolicyConfig(DAY))


@pytest.fixture
def store():
    return store_of(
        record(T, authors=("Accomazzi, A.",), ingest=dt.date(1999, 6, 1)),
        record(A, authors=("Uribe, C.", "Kurtz, M. J."), title="Citation analysis", ingest=dt.date(2006, 7, 1)),
        record(W, authors=("Weber, O.",), title="Virtual observatory dust", ingest=dt.date(2006, 5, 1)),
    )


def test_register_and_replace():
    reg = AlertRegistry()
    assert reg.register_stored_query(StoredQuery("s1", tracked_bibcodes=frozenset({T}))) == "registered"
    assert reg.register_stored_query(StoredQuery("s1", topic_terms=("dust",))) == "replaced"
    assert reg.queries["s1"].topic_terms == ("dust",) and not reg.queries["s1"].tracked_bibcodes


def test_empty_interests_rejected():
    with pytest.raises(ValueError):
        StoredQuery("s1")


def test_new_citation(store):
    q = StoredQuery("s1", tracked_bibcodes=frozenset({T}), last_run=DAY - dt.timedelta(days=1))
    batches, updated = run_alerts([q], idx([]), idx([(A, T)]), store, DAY)
    assert len(batches) == 1 and batches[0].new_citations == ((A, T),)
    assert updated[0].last_run == DAY


def test_no_new_records_no_batches(store):
    q = StoredQuery("s1", tracked_bibcodes=frozenset({T}), followed_authors=(AuthorName("Kurtz", "M."),),
                    topic_terms=("dust",), last_run=DAY)
    same = idx([(A, T)])
    assert run_alerts([q], same, same, store, DAY)[0] == []


def test_two_subscribers_same_target(store):
    qs = [StoredQuery(s, tracked_bibcodes=frozenset({T}), last_run=DAY) for s in ("s1", "s2")]
    batches, _ = run_alerts(qs, idx([]), idx([(A, T)]), store, DAY)
    assert [(b.subscriber_id, b.new_citations) for b in batches] == [("s1", ((A, T),)), ("s2", ((A, T),))]


def test_author_and_topic_window(store):
    q = StoredQuery("s1", followed_authors=(AuthorName("Kurtz", "M."),), topic_terms=("dust",),
                    last_run=dt.date(2006, 4, 1))
    batches, _ = run_alerts([q], idx([]), idx([(A, W)]), store, DAY)
    (b,) = batches
    assert b.new_author_papers == (A,)
    assert [(p.bibcode, p.metric_value, p.rank) for p in b.topic_papers_ranked] == [(W, 1, 1)]
    text = format_alerts(batches)
    assert text.startswith("== s1 2006-09-30\n") and f"topic\t1\t{W}\t1" in text


def test_registry_run_advances_last_run(store):
    reg = AlertRegistry()
    reg.register_stored_query(StoredQuery("s1", tracked_bibcodes=frozenset({T})))
    assert len(reg.run(idx([]), idx([(A, T)]), store, DAY)) == 1
    assert reg.queries["s1"].last_run == DAY


def test_query_file_round_trip():
    qs = [StoredQuery("s1", frozenset({T}), (AuthorName("Kurtz", "M. J."),), ("virtual observatory",),
                      dt.date(2006, 1, 1))]
    assert parse_queries(format_queries(qs)) == qs
