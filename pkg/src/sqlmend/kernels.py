"""Kernel backend selection: compiled `_speedups` if importable, else the
pure-Python reference. Set SQLMEND_PURE_KERNELS=1 to force the fallback."""

from __future__ import annotations

import os
from typing import Sequence

from . import _pure_kernels

if os.environ.get("SQLMEND_PURE_KERNELS") == "1":
    _impl = _pure_kernels
else:
    try:
        from . import _speedups as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _pure_kernels

splitmix64 = _impl.splitmix64
unit_uniform = _impl.unit_uniform
line_mask_weights = _impl.line_mask_weights


def backend_name() -> str:
    return "compiled" if _impl.__name__.endswith("_speedups") else "pure"


def lcs_match_pairs_ids(a_ids: Sequence[int], b_ids: Sequence[int]) -> list[tuple[int, int]]:
    return _impl.lcs_match_pairs(a_ids, b_ids)


def lcs_match_pairs(a: Sequence[str], b: Sequence[str]) -> list[tuple[int, int]]:
    """LCS matching over string sequences; strings are interned to ints before
    hitting the backend so the DP inner loop compares machine integers."""
    ids: dict[str, int] = {}
    a_ids = [ids.setdefault(s, len(ids)) for s in a]
    b_ids = [ids.setdefault(s, len(ids)) for s in b]
    return _impl.lcs_match_pairs(a_ids, b_ids)
