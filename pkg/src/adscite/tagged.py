"""Reader/writer for the line-oriented ``%K value`` block format."""

from __future__ import annotations

from typing import Iterable, Iterator


class TaggedFormatError(ValueError):
    def __init__(self, message: str, line_no: int) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def read_blocks(text: str) -> Iterator[list[tuple[str, str, int]]]:
    """Yield blocks of ``(tag, value, line_no)``; blank lines separate blocks."""
    block: list[tuple[str, str, int]] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            if block:
                yield block
                block = []
            continue
        if line.startswith("#"):
            continue
        if not line.startswith("%") or len(line) < 2:
            raise TaggedFormatError(f"expected '%K value', got {line!r}", line_no)
        tag = line[1]
        yield_value = line[2:].strip()
        block.append((tag, yield_value, line_no))
    if block:
        yield block


def write_blocks(blocks: Iterable[Iterable[tuple[str, str]]]) -> str:
    out = []
    for block in blocks:
        out.append("".join(f"%{tag} {value}\n" for tag, value in block))
    return "\n".join(out)
