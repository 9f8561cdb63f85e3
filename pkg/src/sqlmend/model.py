"""Shared domain types and their invariants. No I/O here.

Every type is a frozen dataclass validated on construction, safe to share
between workers, and round-trips losslessly through its ``to_record`` /
``from_record`` JSON form (the JSONL file contracts live in ``sqlmend.jsonl``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Optional, Sequence

from .textlines import normalize_sql, split_lines

_U64_MAX = (1 << 64) - 1


class InvariantError(ValueError):
    """A domain type was constructed with data violating its invariants."""


class EventKind(str, Enum):
    EXECUTE_ERROR = "execute_error"
    EXECUTE_SUCCESS = "execute_success"
    SAVE_CODE = "save_code"


class PairSource(str, Enum):
    DIVERSE_COLLECTED = "diverse_collected"
    ORIENTED_GENERATED = "oriented_generated"


class LineClass(str, Enum):
    CONSISTENT = "consistent"
    DIFF = "diff"


@dataclass(frozen=True, slots=True)
class SqlEvent:
    """One timestamped user action from the platform log."""

    session_id: str
    script_id: str
    ts_ms: int
    kind: EventKind
    sql_text: str
    error_message: str = ""

    def __post_init__(self) -> None:
        if not self.sql_text:
            raise InvariantError("sql_text must be non-empty")
        if self.kind is EventKind.EXECUTE_ERROR:
            if not self.error_message:
                raise InvariantError("execute_error events carry an error_message")
        elif self.error_message:
            raise InvariantError(f"{self.kind.value} events carry no error_message")

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "session_id": self.session_id,
            "script_id": self.script_id,
            "ts_ms": self.ts_ms,
            "kind": self.kind.value,
            "sql": self.sql_text,
        }
        if self.kind is EventKind.EXECUTE_ERROR:
            rec["error"] = self.error_message
        return rec

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "SqlEvent":
        return cls(
            session_id=rec["session_id"],
            script_id=rec["script_id"],
            ts_ms=int(rec["ts_ms"]),
            kind=EventKind(rec["kind"]),
            sql_text=rec["sql"],
            error_message=rec.get("error", ""),
        )


UNCLASSIFIED_LABEL = "unclassified"


@dataclass(frozen=True, slots=True)
class CategoryPath:
    """A 3-level bug-category path; the reserved all-"unclassified" path marks
    pairs no taxonomy rule claimed."""

    level1: str
    level2: str
    level3: str

    def __post_init__(self) -> None:
        if not (self.level1 and self.level2 and self.level3):
            raise InvariantError("all three category levels must be non-empty")

    @property
    def is_unclassified(self) -> bool:
        return self == UNCLASSIFIED

    def as_tuple(self) -> tuple[str, str, str]:
        return (self.level1, self.level2, self.level3)

    def __str__(self) -> str:
        return f"{self.level1}/{self.level2}/{self.level3}"

    def to_record(self) -> dict[str, str]:
        return {"level1": self.level1, "level2": self.level2, "level3": self.level3}

    @classmethod
    def from_record(cls, rec: Mapping[str, str]) -> "CategoryPath":
        return cls(rec["level1"], rec["level2"], rec["level3"])


UNCLASSIFIED = CategoryPath(UNCLASSIFIED_LABEL, UNCLASSIFIED_LABEL, UNCLASSIFIED_LABEL)


@dataclass(frozen=True, slots=True)
class BugFixPair:
    """(schema DDL, bug SQL, error message, correct SQL) plus provenance."""

    schema_ddl: tuple[str, ...]
    bug_sql: str
    error_message: str
    correct_sql: str
    source: PairSource
    category: Optional[CategoryPath] = None
    provenance: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if normalize_sql(self.bug_sql) == normalize_sql(self.correct_sql):
            raise InvariantError("bug_sql equals correct_sql after trailing-whitespace normalization")
        if self.source is PairSource.ORIENTED_GENERATED and "target_sql" not in self.provenance:
            raise InvariantError("oriented-generated pairs must record provenance['target_sql']")
        object.__setattr__(self, "schema_ddl", tuple(self.schema_ddl))

    def to_record(self) -> dict[str, Any]:
        return {
            "schema_ddl": list(self.schema_ddl),
            "bug_sql": self.bug_sql,
            "error_message": self.error_message,
            "correct_sql": self.correct_sql,
            "source": self.source.value,
            "category": self.category.to_record() if self.category else None,
            "provenance": dict(self.provenance),
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "BugFixPair":
        cat = rec.get("category")
        return cls(
            schema_ddl=tuple(rec.get("schema_ddl", ())),
            bug_sql=rec["bug_sql"],
            error_message=rec.get("error_message", ""),
            correct_sql=rec["correct_sql"],
            source=PairSource(rec["source"]),
            category=CategoryPath.from_record(cat) if cat else None,
            provenance=dict(rec.get("provenance", {})),
        )

    def with_category(self, category: CategoryPath) -> "BugFixPair":
        return BugFixPair(
            schema_ddl=self.schema_ddl,
            bug_sql=self.bug_sql,
            error_message=self.error_message,
            correct_sql=self.correct_sql,
            source=self.source,
            category=category,
            provenance=self.provenance,
        )


@dataclass(frozen=True, slots=True)
class LineEntry:
    index: int
    text: str
    cls: LineClass


@dataclass(frozen=True, slots=True)
class LineDiff:
    """Per-line classification of the correct SQL: lines carried over from the
    bug SQL are consistent, modified or inserted lines are diff."""

    correct_lines: tuple[LineEntry, ...]
    bug_line_count: int
    diff_line_count: int

    def __post_init__(self) -> None:
        for pos, entry in enumerate(self.correct_lines):
            if entry.index != pos:
                raise InvariantError(f"line index {entry.index} at position {pos}: must be dense and ordered")
        actual = sum(1 for e in self.correct_lines if e.cls is LineClass.DIFF)
        if actual != self.diff_line_count:
            raise InvariantError(f"diff_line_count={self.diff_line_count} but {actual} diff lines present")
        if self.bug_line_count < 0:
            raise InvariantError("bug_line_count must be >= 0")

    @property
    def line_count(self) -> int:
        return len(self.correct_lines)

    @property
    def consistent_count(self) -> int:
        return self.line_count - self.diff_line_count

    def target_text(self) -> str:
        return "\n".join(e.text for e in self.correct_lines)

    def to_record(self) -> dict[str, Any]:
        return {
            "correct_lines": [[e.index, e.text, e.cls.value] for e in self.correct_lines],
            "bug_line_count": self.bug_line_count,
            "diff_line_count": self.diff_line_count,
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "LineDiff":
        return cls(
            correct_lines=tuple(
                LineEntry(int(i), t, LineClass(c)) for i, t, c in rec["correct_lines"]
            ),
            bug_line_count=int(rec["bug_line_count"]),
            diff_line_count=int(rec["diff_line_count"]),
        )


@dataclass(frozen=True, slots=True)
class MaskPlan:
    """One sampled mask realization: per-line weights, and per-token weights
    once the plan has been aligned to a tokenizer."""

    p: float
    seed: int
    line_mask: tuple[tuple[int, int], ...]
    token_weights: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.p <= 1.0:
            raise InvariantError(f"p={self.p} outside [0, 1]")
        if not 0 <= self.seed <= _U64_MAX:
            raise InvariantError("seed must fit in 64 unsigned bits")
        for pos, (idx, w) in enumerate(self.line_mask):
            if idx != pos:
                raise InvariantError("line_mask indices must be dense and ordered")
            if w not in (0, 1):
                raise InvariantError(f"line weight {w!r} not in {{0, 1}}")
        if self.token_weights is not None and any(w not in (0, 1) for w in self.token_weights):
            raise InvariantError("token weights must be 0 or 1")

    def line_weight(self, index: int) -> int:
        return self.line_mask[index][1]

    def to_record(self) -> dict[str, Any]:
        return {
            "p": self.p,
            "seed": self.seed,
            "line_mask": [list(pair) for pair in self.line_mask],
            "token_weights": list(self.token_weights) if self.token_weights is not None else None,
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "MaskPlan":
        tw = rec.get("token_weights")
        return cls(
            p=float(rec["p"]),
            seed=int(rec["seed"]),
            line_mask=tuple((int(i), int(w)) for i, w in rec["line_mask"]),
            token_weights=tuple(int(w) for w in tw) if tw is not None else None,
        )


@dataclass(frozen=True, slots=True)
class TrainingSample:
    """Rendered fix-request prompt plus target SQL and the line-span metadata
    a trainer needs to re-sample masks dynamically."""

    input_text: str
    target_text: str
    line_spans: tuple[tuple[int, int, LineClass], ...]
    baked_token_weights: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        total = len(self.target_text.encode("utf-8"))
        pos = 0
        for start, end, _cls in self.line_spans:
            if start != pos or end <= start:
                raise InvariantError("line_spans must partition target_text: ordered, no gaps, no overlaps")
            pos = end
        if pos != total:
            raise InvariantError(f"line_spans cover {pos} bytes of a {total}-byte target_text")

    def to_record(self) -> dict[str, Any]:
        return {
            "input_text": self.input_text,
            "target_text": self.target_text,
            "line_spans": [[s, e, c.value] for s, e, c in self.line_spans],
            "baked_token_weights": list(self.baked_token_weights)
            if self.baked_token_weights is not None
            else None,
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "TrainingSample":
        baked = rec.get("baked_token_weights")
        return cls(
            input_text=rec["input_text"],
            target_text=rec["target_text"],
            line_spans=tuple((int(s), int(e), LineClass(c)) for s, e, c in rec["line_spans"]),
            baked_token_weights=tuple(int(w) for w in baked) if baked is not None else None,
        )


@dataclass(frozen=True, slots=True)
class LossBreakdown:
    """Masked consistent-line loss, diff-line loss, and their sum."""

    l1: float
    l2: float
    total: float
    unmasked_token_count: int
    per_token: float

    def __post_init__(self) -> None:
        if self.l1 < 0 or self.l2 < 0 or self.total < 0:
            raise InvariantError("loss components must be non-negative")
        if self.unmasked_token_count <= 0:
            raise InvariantError("unmasked_token_count must be positive")
        if not math.isclose(self.total, self.l1 + self.l2, rel_tol=1e-9, abs_tol=1e-12):
            raise InvariantError("total must equal l1 + l2 up to summation rounding")
        if not math.isclose(self.per_token, self.total / self.unmasked_token_count, rel_tol=1e-9, abs_tol=1e-12):
            raise InvariantError("per_token must equal total / unmasked_token_count")

    def to_record(self) -> dict[str, Any]:
        return {
            "l1": self.l1,
            "l2": self.l2,
            "total": self.total,
            "unmasked_token_count": self.unmasked_token_count,
            "per_token": self.per_token,
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "LossBreakdown":
        return cls(
            l1=float(rec["l1"]),
            l2=float(rec["l2"]),
            total=float(rec["total"]),
            unmasked_token_count=int(rec["unmasked_token_count"]),
            per_token=float(rec["per_token"]),
        )


@dataclass(frozen=True, slots=True)
class EvalCase:
    """One evaluation entry: buggy script, its error, and every acceptable fix."""

    schema_ddl: tuple[str, ...]
    bug_sql: str
    error_message: str
    ground_truths: tuple[str, ...]
    category: CategoryPath

    def __post_init__(self) -> None:
        if not self.ground_truths:
            raise InvariantError("an eval case needs at least one ground truth")
        object.__setattr__(self, "schema_ddl", tuple(self.schema_ddl))
        object.__setattr__(self, "ground_truths", tuple(self.ground_truths))

    def to_record(self) -> dict[str, Any]:
        return {
            "schema_ddl": list(self.schema_ddl),
            "bug_sql": self.bug_sql,
            "error_message": self.error_message,
            "ground_truths": list(self.ground_truths),
            "category": self.category.to_record(),
        }

    @classmethod
    def from_record(cls, rec: Mapping[str, Any]) -> "EvalCase":
        return cls(
            schema_ddl=tuple(rec.get("schema_ddl", ())),
            bug_sql=rec["bug_sql"],
            error_message=rec.get("error_message", ""),
            ground_truths=tuple(rec["ground_truths"]),
            category=CategoryPath.from_record(rec["category"]),
        )


def correct_lines_of(pair: BugFixPair) -> list[str]:
    return split_lines(pair.correct_sql)


__all__ = [
    "InvariantError",
    "EventKind",
    "PairSource",
    "LineClass",
    "SqlEvent",
    "CategoryPath",
    "UNCLASSIFIED",
    "UNCLASSIFIED_LABEL",
    "BugFixPair",
    "LineEntry",
    "LineDiff",
    "MaskPlan",
    "TrainingSample",
    "LossBreakdown",
    "EvalCase",
    "correct_lines_of",
]
