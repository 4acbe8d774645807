"""Two elementary inequalities for descending chains of nonnegative reals.

Both bound the l2 norm of a tail block of a sorted chain by a weighted
l1-type average of the whole chain.  They are exposed as evaluators that
return the two sides so tests can assert lhs <= rhs directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TIGHT_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class DescendingChain:
    """A nonincreasing chain of nonnegative reals in blocks of ``block_w``.

    A chain of length 2w feeds :func:`half_tail_bound`; length 3w feeds
    :func:`third_tail_bound`.  Inputs are validated sorted rather than
    auto-sorted so the evaluators double as guards; use
    :func:`sort_descending` first if needed.
    """

    values: np.ndarray
    block_w: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        w = self.block_w
        if w < 1:
            raise ValueError("block_w must be a positive integer")
        if v.ndim != 1 or v.size not in (2 * w, 3 * w):
            raise ValueError(
                f"chain length {v.size} is neither 2*{w} nor 3*{w}"
            )
        if np.any(v < 0):
            raise ValueError("chain entries must be nonnegative")
        if np.any(np.diff(v) > 0):
            raise ValueError("chain must be sorted nonincreasing")


def sort_descending(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.sort(v)[::-1].copy()


def half_tail_bound(chain: DescendingChain) -> tuple[float, float]:
    """For a chain of length 2w: l2 norm of the second half vs the
    full-sum bound sum(a) / (2 sqrt(w)).  Contract: lhs <= rhs."""
    w = chain.block_w
    v = chain.values
    if v.size != 2 * w:
        raise ValueError(f"need length 2*{w}, got {v.size}")
    lhs = float(np.sqrt(np.sum(v[w:] ** 2)))
    rhs = float(np.sum(v) / (2.0 * math.sqrt(w)))
    return lhs, rhs


def third_tail_bound(chain: DescendingChain) -> tuple[float, float]:
    """For a chain of length 3w: l2 norm of the last two blocks vs the
    middle-weighted bound (S1 + 2*S2 + S3) / (2 sqrt(2w))."""
    w = chain.block_w
    v = chain.values
    if v.size != 3 * w:
        raise ValueError(f"need length 3*{w}, got {v.size}")
    lhs = float(np.sqrt(np.sum(v[w:] ** 2)))
    s1 = float(np.sum(v[:w]))
    s2 = float(np.sum(v[w : 2 * w]))
    s3 = float(np.sum(v[2 * w :]))
    rhs = (s1 + 2.0 * s2 + s3) / (2.0 * math.sqrt(2.0 * w))
    return lhs, rhs


def is_tight(lhs: float, rhs: float) -> bool:
    """True when the two sides agree to within 1e-12 relative slack."""
    return abs(lhs - rhs) <= TIGHT_RTOL * max(1.0, rhs)
