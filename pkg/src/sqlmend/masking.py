"""Line diff classification, dynamic mask sampling, token alignment, the
mask-weighted loss, and training-sample emission.

Masking is strictly line-level: a diff line always keeps weight 1, a
consistent line is zeroed with probability p, and every token inherits the
weight of the line its first byte sits on. Token-level masking is deliberately
not offered.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional, Sequence

from . import kernels
from .model import (
    BugFixPair,
    InvariantError,
    LineClass,
    LineDiff,
    LineEntry,
    LossBreakdown,
    MaskPlan,
    TrainingSample,
)
from .prompts import render_fix_prompt
from .textlines import line_byte_spans, split_lines, strip_trailing_ws
from .tokenizers import TokenizerAdapter, TokenTriple, validate_spans

logger = logging.getLogger(__name__)


class AlignmentError(ValueError):
    """Tokenizer spans violate the adapter contract or miss the target text."""


class MaskedLossError(ValueError):
    """masked_loss received inconsistent inputs."""


def line_match_pairs(bug_sql: str, correct_sql: str) -> list[tuple[int, int]]:
    """LCS-matched (bug line index, correct line index) pairs; lines compare
    equal after per-line trailing-whitespace stripping."""
    bug = [strip_trailing_ws(l) for l in split_lines(bug_sql)]
    cor = [strip_trailing_ws(l) for l in split_lines(correct_sql)]
    return kernels.lcs_match_pairs(bug, cor)


def compute_line_diff(bug_sql: str, correct_sql: str) -> LineDiff:
    """Classify each line of correct_sql as consistent (in the line-level LCS
    against bug_sql) or diff (modified or inserted). Deleted bug lines leave no
    trace: no target tokens exist for them."""
    correct_raw = split_lines(correct_sql)
    matched = {j for _i, j in line_match_pairs(bug_sql, correct_sql)}
    entries = tuple(
        LineEntry(j, text, LineClass.CONSISTENT if j in matched else LineClass.DIFF)
        for j, text in enumerate(correct_raw)
    )
    return LineDiff(
        correct_lines=entries,
        bug_line_count=len(split_lines(bug_sql)),
        diff_line_count=sum(1 for e in entries if e.cls is LineClass.DIFF),
    )


def sample_mask(diff: LineDiff, p: float, seed: int) -> MaskPlan:
    """Draw one mask realization: consistent line i gets weight 0 with
    probability p via the counter PRNG keyed (seed, i); diff lines always 1.

    Identical (p, seed, diff) inputs yield identical plans, independent of
    evaluation order."""
    if not 0.0 <= p <= 1.0:
        raise InvariantError(f"mask ratio p={p} outside [0, 1]")
    flags = [e.cls is LineClass.CONSISTENT for e in diff.correct_lines]
    weights = kernels.line_mask_weights(seed, p, flags)
    return MaskPlan(
        p=p,
        seed=seed,
        line_mask=tuple((i, w) for i, w in enumerate(weights)),
        token_weights=None,
    )


def align_tokens(
    diff: LineDiff,
    plan: MaskPlan,
    target_text: str,
    tokenizer: TokenizerAdapter,
) -> MaskPlan:
    """Attach per-token weights to ``plan``: each token gets the weight of the
    line containing its byte_start (a token straddling a newline belongs to its
    starting line)."""
    lines = [e.text for e in diff.correct_lines]
    if "\n".join(lines) != target_text:
        raise AlignmentError("target_text is not the newline-join of the diff's lines")
    if len(plan.line_mask) != len(lines):
        raise AlignmentError(f"plan covers {len(plan.line_mask)} lines, diff has {len(lines)}")

    byte_len = len(target_text.encode("utf-8"))
    tokens = tokenizer.tokenize(target_text)
    try:
        validate_spans(tokens, byte_len)
    except Exception as exc:
        raise AlignmentError(str(exc)) from exc

    starts = [s for s, _e in line_byte_spans(lines)]
    weights = []
    for _tid, tok_start, _tok_end in tokens:
        line_idx = bisect.bisect_right(starts, tok_start) - 1
        weights.append(plan.line_weight(line_idx))
    return MaskPlan(
        p=plan.p,
        seed=plan.seed,
        line_mask=plan.line_mask,
        token_weights=tuple(weights),
    )


def masked_loss(
    token_logprobs: Sequence[float],
    token_weights: Sequence[int],
    token_line_class: Sequence[LineClass],
) -> LossBreakdown:
    """Combine per-token log-probabilities into the masked loss.

    l1 sums weighted consistent-token NLL, l2 sums diff-token NLL (diff tokens
    must carry weight 1), total sums every weighted term in token order; all
    three use exact (correctly rounded) summation. per_token divides total by
    the number of weight-1 tokens."""
    n = len(token_logprobs)
    if len(token_weights) != n or len(token_line_class) != n:
        raise MaskedLossError(
            f"length mismatch: {n} logprobs, {len(token_weights)} weights, {len(token_line_class)} classes"
        )
    l1_terms: list[float] = []
    l2_terms: list[float] = []
    all_terms: list[float] = []
    unmasked = 0
    for k in range(n):
        lp = token_logprobs[k]
        w = token_weights[k]
        cls = token_line_class[k]
        if lp > 0.0:
            raise MaskedLossError(f"token {k}: log-probability {lp} is positive")
        if w not in (0, 1):
            raise MaskedLossError(f"token {k}: weight {w!r} not in {{0, 1}}")
        if cls is LineClass.DIFF:
            if w != 1:
                raise MaskedLossError(f"token {k}: diff tokens are never masked, got weight {w}")
            l2_terms.append(-lp)
            all_terms.append(-lp)
        else:
            term = -(lp * w)
            l1_terms.append(term)
            all_terms.append(term)
        unmasked += w
    if unmasked == 0:
        raise MaskedLossError(
            "internal error: no unmasked tokens (a valid MaskPlan keeps every diff line at weight 1)"
        )
    l1 = math.fsum(l1_terms)
    l2 = math.fsum(l2_terms)
    total = math.fsum(all_terms)
    return LossBreakdown(
        l1=l1,
        l2=l2,
        total=total,
        unmasked_token_count=unmasked,
        per_token=total / unmasked,
    )


BuildMode = Literal["span", "baked"]


def build_samples(
    pairs: Sequence[BugFixPair],
    mode: BuildMode = "span",
    p: float = 0.0,
    seed: int = 0,
    tokenizer: Optional[TokenizerAdapter] = None,
    on_skip: Optional[Callable[[int, str], None]] = None,
) -> list[TrainingSample]:
    """Render each pair into a TrainingSample.

    "span" mode emits line-span metadata only, leaving the trainer to
    re-sample masks each epoch; "baked" mode additionally freezes one mask
    realization into per-token weights (per-sample seeds derived from ``seed``
    by counter, so output is independent of worker scheduling). Pairs whose
    diff cannot be built are skipped with a diagnostic."""
    if mode == "baked" and tokenizer is None:
        raise ValueError("baked mode needs a tokenizer")
    samples: list[TrainingSample] = []
    for idx, pair in enumerate(pairs):
        try:
            diff = compute_line_diff(pair.bug_sql, pair.correct_sql)
            target_text = diff.target_text()
            spans = line_byte_spans([e.text for e in diff.correct_lines])
            line_spans = tuple(
                (start, end, entry.cls)
                for (start, end), entry in zip(spans, diff.correct_lines)
            )
            baked = None
            if mode == "baked":
                sample_seed = kernels.splitmix64(seed, idx)
                plan = sample_mask(diff, p, sample_seed)
                plan = align_tokens(diff, plan, target_text, tokenizer)
                baked = plan.token_weights
            samples.append(
                TrainingSample(
                    input_text=render_fix_prompt(pair.schema_ddl, pair.bug_sql, pair.error_message),
                    target_text=target_text,
                    line_spans=line_spans,
                    baked_token_weights=baked,
                )
            )
        except (InvariantError, AlignmentError) as exc:
            message = f"pair {idx}: skipped ({exc})"
            logger.warning(message)
            if on_skip is not None:
                on_skip(idx, str(exc))
    return samples


@dataclass(frozen=True, slots=True)
class DiffLineStats:
    """Histogram of diff-line counts over a pair corpus."""

    histogram: dict[int, int] = field(default_factory=dict)
    total: int = 0

    def cumulative_fraction(self, k: int) -> float:
        """Share of pairs with diff_line_count <= k."""
        if self.total == 0:
            return 0.0
        return sum(c for d, c in self.histogram.items() if d <= k) / self.total

    def fraction_below(self, k: int) -> float:
        """Share of pairs with diff_line_count < k."""
        if self.total == 0:
            return 0.0
        return sum(c for d, c in self.histogram.items() if d < k) / self.total

    def rows(self) -> list[tuple[int, int, float]]:
        """(diff_line_count, count, cumulative fraction) rows, ascending."""
        rows = []
        running = 0
        for d in sorted(self.histogram):
            running += self.histogram[d]
            rows.append((d, self.histogram[d], running / self.total if self.total else 0.0))
        return rows


def diff_distribution_report(pairs: Sequence[BugFixPair]) -> DiffLineStats:
    """Count diff lines per pair; counts sum to len(pairs)."""
    histogram: dict[int, int] = {}
    for pair in pairs:
        d = compute_line_diff(pair.bug_sql, pair.correct_sql).diff_line_count
        histogram[d] = histogram.get(d, 0) + 1
    return DiffLineStats(histogram=histogram, total=len(pairs))
