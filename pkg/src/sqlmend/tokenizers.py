"""Tokenizer adapters: anything mapping text to (token_id, byte_start, byte_end)
triples over the UTF-8 encoding of the text.

Spans must be ordered and non-overlapping (start of token k+1 >= end of token
k); they need not cover every byte — the whitespace tokenizer, for instance,
leaves separators untokenized.
"""

from __future__ import annotations

import json
import subprocess
import zlib
from typing import Iterable, Protocol


class TokenizeError(RuntimeError):
    pass


TokenTriple = tuple[int, int, int]


class TokenizerAdapter(Protocol):
    def tokenize(self, text: str) -> list[TokenTriple]: ...


def validate_spans(tokens: Iterable[TokenTriple], byte_len: int) -> None:
    """Reject span lists violating the adapter contract."""
    prev_end = 0
    for k, (_tid, start, end) in enumerate(tokens):
        if start < 0 or end > byte_len:
            raise TokenizeError(f"token {k} span [{start}, {end}) outside text of {byte_len} bytes")
        if end <= start:
            raise TokenizeError(f"token {k} has empty span [{start}, {end})")
        if start < prev_end:
            raise TokenizeError(f"token {k} overlaps or reorders: starts at {start}, previous ended at {prev_end}")
        prev_end = end


class WhitespaceTokenizer:
    """Maximal non-whitespace byte runs; the default for tests and the CLI.

    Token ids are a stateless CRC32 of the token bytes, so identical surface
    forms get identical ids without any vocabulary."""

    _WHITESPACE = frozenset(b" \t\n\r\x0b\x0c")

    def tokenize(self, text: str) -> list[TokenTriple]:
        data = text.encode("utf-8")
        tokens: list[TokenTriple] = []
        start = None
        for i, byte in enumerate(data):
            if byte in self._WHITESPACE:
                if start is not None:
                    tokens.append((_token_id(data[start:i]), start, i))
                    start = None
            elif start is None:
                start = i
        if start is not None:
            tokens.append((_token_id(data[start:]), start, len(data)))
        return tokens


class ByteTokenizer:
    """Every byte is a token with its own value as id."""

    def tokenize(self, text: str) -> list[TokenTriple]:
        data = text.encode("utf-8")
        return [(b, i, i + 1) for i, b in enumerate(data)]


class CommandTokenizer:
    """External tokenizer process: UTF-8 text on stdin, one JSON [id, start,
    end] triple per stdout line."""

    def __init__(self, command: list[str], timeout_s: float = 60.0):
        self.command = command
        self.timeout_s = timeout_s

    def tokenize(self, text: str) -> list[TokenTriple]:
        try:
            proc = subprocess.run(
                self.command,
                input=text.encode("utf-8"),
                capture_output=True,
                timeout=self.timeout_s,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise TokenizeError(f"tokenizer command failed: {exc}") from exc
        if proc.returncode != 0:
            raise TokenizeError(
                f"tokenizer command exited {proc.returncode}: {proc.stderr.decode('utf-8', 'replace').strip()}"
            )
        tokens: list[TokenTriple] = []
        for lineno, line in enumerate(proc.stdout.decode("utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                triple = json.loads(line)
                tid, start, end = (int(x) for x in triple)
            except (ValueError, TypeError) as exc:
                raise TokenizeError(f"tokenizer output line {lineno} is not an [id, start, end] triple: {line!r}") from exc
            tokens.append((tid, start, end))
        return tokens


def _token_id(data: bytes) -> int:
    return zlib.crc32(data) & 0x7FFFFFFF


def resolve_tokenizer(name_or_cmd: str) -> TokenizerAdapter:
    """CLI helper: 'whitespace', 'byte', or a shell command line."""
    if name_or_cmd == "whitespace":
        return WhitespaceTokenizer()
    if name_or_cmd == "byte":
        return ByteTokenizer()
    import shlex

    return CommandTokenizer(shlex.split(name_or_cmd))
