"""XML Abstracts and RSS 2.0 encoders."""

from __future__ import annotations

import datetime as dt
import email.utils
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

from .corpus import BibRecord

ABS_URL = "https://ui.adsabs.harvard.edu/abs/"
RSS_REQUIRED_CHANNEL = ("title", "link", "description")


@dataclass(frozen=True)
class ExportEnvelope:
    query_echo: str
    record_count: int
    total_citations: int | None
    records: tuple[BibRecord, ...]

    def __post_init__(self) -> None:
        if self.record_count != len(self.records):
            raise ValueError("record_count does not match records")


def _serialize(root: ET.Element) -> str:
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode", xml_declaration=True) + "\n"


def export_xml_abstracts(
    records: Sequence[BibRecord],
    counts: Mapping[str, int],
    total: int | None = None,
    query: str = "",
) -> str:
    missing = [r.bibcode for r in records if r.bibcode not in counts]
    if missing:
        raise KeyError(f"no citation count for {', '.join(missing)}")
    summed = sum(counts[r.bibcode] for r in records)
    if total is not None and total != summed:
        raise ValueError(f"total {total} != sum of record counts {summed}")
    env = ExportEnvelope(query, len(records), summed, tuple(records))

    root = ET.Element("records", {
        "query": env.query_echo,
        "retrieved": str(env.record_count),
        "citations": str(env.total_citations),
    })
    for rec in env.records:
        el = ET.SubElement(root, "record", {"citations": str(counts[rec.bibcode])})
        ET.SubElement(el, "bibcode").text = rec.bibcode
        ET.SubElement(el, "title").text = rec.title
        for author in rec.authors:
            ET.SubElement(el, "author").text = str(author)
        ET.SubElement(el, "year").text = f"{rec.pub_year:04d}"
        if rec.venue:
            ET.SubElement(el, "journal").text = rec.venue
        ET.SubElement(el, "refereed").text = "true" if rec.refereed else "false"
    return _serialize(root)


def schema_text() -> str:
    return resources.files("adscite").joinpath("data/xml_abstracts.xsd").read_text("utf-8")


def validate_xml_abstracts(document: str) -> None:
    """Raise ``lxml.etree.DocumentInvalid`` unless ``document`` conforms to the shipped schema."""
    from lxml import etree

    schema = etree.XMLSchema(etree.fromstring(schema_text().encode("utf-8")))
    schema.assertValid(etree.fromstring(document.encode("utf-8")))


def export_rss(
    records: Sequence[BibRecord],
    channel_title: str,
    link: str = ABS_URL,
    description: str | None = None,
) -> str:
    """RSS 2.0 channel. Items carry title, link, guid and date only; never citation counts."""
    rss = ET.Element("rss", {"version": "2.0"})
    channel = ET.SubElement(rss, "channel")
    ET.SubElement(channel, "title").text = channel_title
    ET.SubElement(channel, "link").text = link
    ET.SubElement(channel, "description").text = description or f"Records matching: {channel_title}"
    for rec in records:
        item = ET.SubElement(channel, "item")
        ET.SubElement(item, "title").text = rec.title
        ET.SubElement(item, "link").text = ABS_URL + rec.bibcode
        ET.SubElement(item, "guid", {"isPermaLink": "false"}).text = rec.bibcode
        authors = "; ".join(str(a) for a in rec.authors)
        if authors:
            ET.SubElement(item, "description").text = authors
        published = dt.datetime(rec.pub_year, 1, 1, tzinfo=dt.timezone.utc)
        ET.SubElement(item, "pubDate").text = email.utils.format_datetime(published)
    return _serialize(rss)
