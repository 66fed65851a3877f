"""19-character bibliographic record identifiers.

Layout: ``YYYY`` + venue (right-padded with dots to 5) + volume (left-padded
to 4) + qualifier + page (left-padded to 4) + first-author initial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

BIBCODE_LENGTH = 19
MIN_YEAR = 1500
MAX_YEAR = 2100

_VENUE_RE = re.compile(r"^[A-Za-z0-9&]{1,5}$")
_VOLPAGE_RE = re.compile(r"^[A-Za-z0-9&]{0,4}$")


class BibcodeError(ValueError):
    """Raised for malformed bibcode text or fields; ``field`` names the culprit."""

    def __init__(self, message: str, field: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


@total_ordering
@dataclass(frozen=True, eq=False)
class Bibcode:
    year: int
    venue_code: str
    volume: str = ""
    qualifier: str = "."
    page: str = ""
    author_initial: str = "."

    def __post_init__(self) -> None:
        if not isinstance(self.year, int) or not MIN_YEAR <= self.year <= MAX_YEAR:
            raise BibcodeError(f"year {self.year!r} outside [{MIN_YEAR}, {MAX_YEAR}]", "year")
        if not _VENUE_RE.match(self.venue_code):
            raise BibcodeError(f"bad venue code {self.venue_code!r}", "venue_code")
        if not _VOLPAGE_RE.match(self.volume):
            raise BibcodeError(f"bad volume {self.volume!r}", "volume")
        if not _VOLPAGE_RE.match(self.page):
            raise BibcodeError(f"bad page {self.page!r}", "page")
        if len(self.qualifier) != 1 or not (self.qualifier == "." or self.qualifier.isalnum()):
            raise BibcodeError(f"bad qualifier {self.qualifier!r}", "qualifier")
        a = self.author_initial
        if len(a) != 1 or not (a == "." or (a.isascii() and a.isupper())):
            raise BibcodeError(f"bad author initial {a!r}", "author_initial")

    def __str__(self) -> str:
        return (
            f"{self.year:04d}"
            f"{self.venue_code.ljust(5, '.')}"
            f"{self.volume.rjust(4, '.')}"
            f"{self.qualifier}"
            f"{self.page.rjust(4, '.')}"
            f"{self.author_initial}"
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Bibcode):
            return NotImplemented
        return str(self) == str(other)

    def __lt__(self, other: "Bibcode") -> bool:
        if not isinstance(other, Bibcode):
            return NotImplemented
        return str(self) < str(other)

    def __hash__(self) -> int:
        return hash(str(self))

    @property
    def text(self) -> str:
        return str(self)

    @classmethod
    def parse(cls, text: str) -> "Bibcode":
        if len(text) != BIBCODE_LENGTH:
            raise BibcodeError(
                f"expected {BIBCODE_LENGTH} characters, got {len(text)} in {text!r}", "length"
            )
        if not text[:4].isdigit():
            raise BibcodeError(f"non-numeric year in {text!r}", "year")
        return cls(
            year=int(text[:4]),
            venue_code=text[4:9].rstrip("."),
            volume=text[9:13].lstrip("."),
            qualifier=text[13],
            page=text[14:18].lstrip("."),
            author_initial=text[18],
        )


def canonical(value: "Bibcode | str") -> str:
    """Validate and return the 19-character text form."""
    if isinstance(value, Bibcode):
        return str(value)
    return str(Bibcode.parse(value))
