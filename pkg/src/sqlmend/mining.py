"""Mining (bug SQL, correct SQL) pairs from platform event logs.

Within each (session_id, script_id) group, split further at silence gaps
longer than session_gap_ms. For every execution error in a window, the
correction is (rule A) the first later successful execution inside
max_pair_window_ms, else (rule B) the last save inside the window that no
execution of any kind follows — users who fix code against the editor's syntax
hints often save without re-running. A chain of errors before one fix pairs
every error with that fix; pairs whose bug equals their correction are
dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import BugFixPair, EventKind, PairSource, SqlEvent
from .textlines import normalize_sql


class UnsortedEventsError(ValueError):
    """The event stream is not sorted by (session_id, script_id, ts_ms)."""


@dataclass(frozen=True, slots=True)
class MiningConfig:
    session_gap_ms: int = 30 * 60 * 1000
    max_pair_window_ms: int = 2 * 60 * 60 * 1000

    def __post_init__(self) -> None:
        if self.session_gap_ms <= 0 or self.max_pair_window_ms <= 0:
            raise ValueError("mining windows must be strictly positive")


@dataclass(slots=True)
class MiningStats:
    events_seen: int = 0
    errors_seen: int = 0
    pairs_emitted: int = 0
    degenerate_dropped: int = 0
    rule_a_pairs: int = 0
    rule_b_pairs: int = 0
    groups: int = 0


def mine_pairs(
    events: Iterable[SqlEvent],
    cfg: MiningConfig,
    stats: Optional[MiningStats] = None,
) -> list[BugFixPair]:
    """Extract candidate pairs from a stream sorted by (session, script, ts).

    Unsorted input rejects the whole stream; duplicates survive here and are
    collapsed by the pair filter. Output order is canonical: groups by first
    event timestamp (session/script as tie-break), pairs by error timestamp.
    """
    if stats is None:
        stats = MiningStats()
    groups = _split_groups(events, stats)
    groups.sort(key=lambda g: (g[0].ts_ms, g[0].session_id, g[0].script_id))
    pairs: list[BugFixPair] = []
    for group in groups:
        stats.groups += 1
        for window in _split_windows(group, cfg.session_gap_ms):
            pairs.extend(_mine_window(window, cfg, stats))
    stats.pairs_emitted = len(pairs)
    return pairs


def _split_groups(events: Iterable[SqlEvent], stats: MiningStats) -> list[list[SqlEvent]]:
    groups: list[list[SqlEvent]] = []
    prev_key: Optional[tuple[str, str, int]] = None
    current: list[SqlEvent] = []
    for n, event in enumerate(events):
        stats.events_seen += 1
        key = (event.session_id, event.script_id, event.ts_ms)
        if prev_key is not None and key < prev_key:
            raise UnsortedEventsError(
                f"event {n} ({event.session_id}/{event.script_id} @ {event.ts_ms}) breaks "
                "(session_id, script_id, ts_ms) ordering; sort the stream and retry"
            )
        if prev_key is not None and key[:2] != prev_key[:2]:
            groups.append(current)
            current = []
        current.append(event)
        prev_key = key
    if current:
        groups.append(current)
    return groups


def _split_windows(group: list[SqlEvent], gap_ms: int) -> list[list[SqlEvent]]:
    windows: list[list[SqlEvent]] = []
    current: list[SqlEvent] = []
    for event in group:
        if current and event.ts_ms - current[-1].ts_ms > gap_ms:
            windows.append(current)
            current = []
        current.append(event)
    if current:
        windows.append(current)
    return windows


def _mine_window(window: list[SqlEvent], cfg: MiningConfig, stats: MiningStats) -> list[BugFixPair]:
    # Precompute, per index, whether any execute event occurs strictly later.
    execute_after = [False] * (len(window) + 1)
    for i in range(len(window) - 1, -1, -1):
        is_exec = window[i].kind in (EventKind.EXECUTE_ERROR, EventKind.EXECUTE_SUCCESS)
        execute_after[i] = execute_after[i + 1] or is_exec

    pairs: list[BugFixPair] = []
    for i, event in enumerate(window):
        if event.kind is not EventKind.EXECUTE_ERROR:
            continue
        stats.errors_seen += 1
        correction = _rule_a(window, i, event, cfg)
        rule = "execute_success"
        if correction is None:
            correction = _rule_b(window, i, event, cfg, execute_after)
            rule = "save_code"
        if correction is None:
            continue
        if normalize_sql(event.sql_text) == normalize_sql(correction.sql_text):
            stats.degenerate_dropped += 1
            continue
        if rule == "execute_success":
            stats.rule_a_pairs += 1
        else:
            stats.rule_b_pairs += 1
        pairs.append(
            BugFixPair(
                schema_ddl=(),
                bug_sql=event.sql_text,
                error_message=event.error_message,
                correct_sql=correction.sql_text,
                source=PairSource.DIVERSE_COLLECTED,
                category=None,
                provenance={
                    "session_id": event.session_id,
                    "script_id": event.script_id,
                    "error_ts_ms": event.ts_ms,
                    "fix_ts_ms": correction.ts_ms,
                    "rule": rule,
                },
            )
        )
    return pairs


def _rule_a(window: list[SqlEvent], i: int, error: SqlEvent, cfg: MiningConfig) -> Optional[SqlEvent]:
    for later in window[i + 1 :]:
        if later.ts_ms - error.ts_ms > cfg.max_pair_window_ms:
            break
        if later.kind is EventKind.EXECUTE_SUCCESS:
            return later
    return None


def _rule_b(
    window: list[SqlEvent],
    i: int,
    error: SqlEvent,
    cfg: MiningConfig,
    execute_after: list[bool],
) -> Optional[SqlEvent]:
    last_save: Optional[SqlEvent] = None
    for j in range(i + 1, len(window)):
        later = window[j]
        if later.ts_ms - error.ts_ms > cfg.max_pair_window_ms:
            break
        if later.kind is EventKind.SAVE_CODE and not execute_after[j + 1]:
            last_save = later
    return last_save
