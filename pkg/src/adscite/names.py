"""Author names and the normalization used for matching and self-citation checks."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass

_NON_LETTER = re.compile(r"[^a-z]+")


def fold(text: str) -> str:
    """Case-fold and strip diacritics. Idempotent."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return stripped.casefold()


def normalize_surname(surname: str) -> str:
    return _NON_LETTER.sub("", fold(surname))


@dataclass(frozen=True)
class AuthorName:
    surname: str
    initials: str = ""

    def __post_init__(self) -> None:
        if not self.surname.strip():
            raise ValueError("author surname must be non-empty")

    @classmethod
    def parse(cls, text: str) -> "AuthorName":
        """Parse ``"Surname, I. J."`` (or a bare surname)."""
        surname, _, initials = text.partition(",")
        return cls(surname.strip(), initials.strip())

    @property
    def norm_surname(self) -> str:
        return normalize_surname(self.surname)

    @property
    def first_initial(self) -> str:
        letters = _NON_LETTER.sub("", fold(self.initials))
        return letters[:1]

    @property
    def key(self) -> tuple[str, str]:
        return (self.norm_surname, self.first_initial)

    def matches(self, other: "AuthorName") -> bool:
        """Same normalized surname; initials must agree when both sides have one."""
        if self.norm_surname != other.norm_surname:
            return False
        a, b = self.first_initial, other.first_initial
        return not a or not b or a == b

    def __str__(self) -> str:
        return f"{self.surname}, {self.initials}" if self.initials else self.surname
