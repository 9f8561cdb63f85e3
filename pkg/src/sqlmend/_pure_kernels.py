"""Pure-Python reference kernels: LCS line matching and the mask PRNG.

`sqlmend._speedups` (Cython) implements the same two functions with identical
outputs; `sqlmend.kernels` picks one at import time. Keep the semantics here
and in the .pyx file in lockstep — the parity test suite enforces it.

PRNG: SplitMix64 finalizer used in counter mode. The draw for line ``i`` under
``seed`` is ``finalize(seed + (i + 1) * GAMMA)`` mapped to [0, 1) via the top
53 bits, so draws are independent of evaluation order and of each other.
"""

from __future__ import annotations

from typing import Sequence

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(seed: int, counter: int) -> int:
    """The counter-th 64-bit draw of the SplitMix64 stream keyed by seed."""
    z = (seed + (counter + 1) * _GAMMA) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


def unit_uniform(seed: int, counter: int) -> float:
    """Uniform double in [0, 1) from the (seed, counter) draw. Exact: the top
    53 bits scaled by 2**-53, both steps free of rounding."""
    return (splitmix64(seed, counter) >> 11) * 2.0**-53


def line_mask_weights(seed: int, p: float, consistent_flags: Sequence[bool]) -> list[int]:
    """Per-line loss weights: a consistent line i gets 0 with probability p
    (draw keyed by (seed, i)), every other line gets 1."""
    return [
        0 if (flag and unit_uniform(seed, i) < p) else 1
        for i, flag in enumerate(consistent_flags)
    ]


def lcs_match_pairs(a_ids: Sequence[int], b_ids: Sequence[int]) -> list[tuple[int, int]]:
    """Matched index pairs (i, j) of one longest common subsequence of the two
    id sequences, in increasing order.

    Deterministic tie-breaking: equal heads always match; otherwise the a-side
    advances when doing so loses nothing. Memory is O(n*m).
    """
    n, m = len(a_ids), len(b_ids)
    if n == 0 or m == 0:
        return []
    # dp[i*(m+1)+j] = LCS length of a[i:], b[j:]
    width = m + 1
    dp = [0] * ((n + 1) * width)
    for i in range(n - 1, -1, -1):
        ai = a_ids[i]
        row = i * width
        below = row + width
        for j in range(m - 1, -1, -1):
            if ai == b_ids[j]:
                dp[row + j] = dp[below + j + 1] + 1
            else:
                down = dp[below + j]
                right = dp[row + j + 1]
                dp[row + j] = down if down >= right else right
    pairs: list[tuple[int, int]] = []
    i = j = 0
    while i < n and j < m:
        if a_ids[i] == b_ids[j]:
            pairs.append((i, j))
            i += 1
            j += 1
        elif dp[(i + 1) * width + j] >= dp[i * width + j + 1]:
            i += 1
        else:
            j += 1
    return pairs
