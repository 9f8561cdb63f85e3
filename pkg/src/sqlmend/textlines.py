"""Line splitting and whitespace normalization shared by every stage.

The line model used throughout the package: a line is a maximal run of text
terminated by "\n". A sole trailing newline terminates the last line instead
of opening an empty one; interior blank lines are real lines.
"""

from __future__ import annotations


def split_lines(text: str) -> list[str]:
    """Split ``text`` into lines. Empty input yields no lines."""
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return lines


def strip_trailing_ws(line: str) -> str:
    return line.rstrip()


def normalize_sql(text: str) -> str:
    """Canonical form used for bug-vs-correct equality: per-line trailing
    whitespace removed, trailing newline dropped."""
    return "\n".join(line.rstrip() for line in split_lines(text))


def join_lines(lines: list[str]) -> str:
    return "\n".join(lines)


def line_byte_spans(lines: list[str]) -> list[tuple[int, int]]:
    """Byte spans of each line over ``join_lines(lines)`` encoded as UTF-8.

    The joining "\n" belongs to the span of the line it terminates, so the
    spans partition the encoded text exactly (no gaps, no overlaps).
    """
    spans: list[tuple[int, int]] = []
    pos = 0
    last = len(lines) - 1
    for i, line in enumerate(lines):
        width = len(line.encode("utf-8")) + (0 if i == last else 1)
        spans.append((pos, pos + width))
        pos += width
    return spans
