import datetime as dt

from adscite.bibcode import Bibcode
from adscite.corpus import BibRecord, CorpusStore, Kind
from adscite.names import AuthorName
from adscite.refparse import RawReference
from adscite.resolver import ResolvedReference

DAY = dt.date(2006, 9, 30)


def record(code, authors=("Smith, J.",), title="Untitled", kind=Kind.JOURNAL, refereed=None,
           ingest=dt.date(2000, 1, 1), keywords=(), abstract=None, venue=None):
    bc = Bibcode.parse(code)
    if refereed is None:
        refereed = kind is Kind.JOURNAL
    return BibRecord(
        bibcode=code,
        title=title,
        authors=tuple(AuthorName.parse(a) for a in authors),
        pub_year=bc.year,
        venue=venue if venue is not None else bc.venue_code,
        volume=bc.volume or None,
        first_page=((bc.qualifier if bc.qualifier != "." else "") + bc.page) or None,
        refereed=refereed,
        kind=kind,
        abstract=abstract,
        keywords=tuple(keywords),
        ingest_date=ingest,
    )


def store_of(*records):
    store = CorpusStore()
    for r in records:
        store.add_record(r)
    return store


def raw(text, citing="2006ApJ...645...77U", source="UCP", seq=1, day=DAY):
    return RawReference(citing, source, seq, text, day)


def pair(citing, cited, source="UCP", score=1.0):
    return ResolvedReference(citing, cited, score, source, DAY)


def code(i, venue="ApJ", year=2000, initial="A"):
    """Deterministic distinct bibcodes for synthetic graphs."""
    return str(Bibcode(year + (i // 10000) % 100, venue, str(i % 10000 // 100), ".", str(i % 100 + 1), initial))
