"""Sets of admissible durations over discrete time.

A duration set is a nonempty subset of the naturals stored as disjoint,
ascending integer intervals; an interval's upper bound may be None,
meaning unbounded. Qualitative relations render onto this carrier:
"before" is [1, inf), "equal" is {0}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

import numpy as np

Interval = tuple[int, Optional[int]]


def _normalize(intervals: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort, validate, and merge touching intervals into canonical form."""
    items: list[Interval] = []
    for lo, hi in intervals:
        if not isinstance(lo, int) or isinstance(lo, bool):
            raise ValueError(f"interval lower bound must be an int, got {lo!r}")
        if hi is not None and (not isinstance(hi, int) or isinstance(hi, bool)):
            raise ValueError(f"interval upper bound must be an int or None, got {hi!r}")
        if lo < 0:
            raise ValueError(f"durations are natural numbers, got lower bound {lo}")
        if hi is not None and hi < lo:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        items.append((lo, hi))
    if not items:
        raise ValueError("a duration set must be nonempty")
    items.sort(key=lambda iv: (iv[0], -1 if iv[1] is None else iv[1]))
    merged: list[Interval] = [items[0]]
    for lo, hi in items[1:]:
        plo, phi = merged[-1]
        if phi is None or lo <= phi + 1:
            # overlapping or adjacent: coalesce
            if phi is None or hi is None:
                merged[-1] = (plo, None)
            else:
                merged[-1] = (plo, max(phi, hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class DurationSet:
    """Immutable set of natural-number durations as disjoint intervals."""

    intervals: tuple[Interval, ...]

    def __post_init__(self):
        normalized = _normalize(self.intervals)
        object.__setattr__(self, "intervals", normalized)

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero() -> "DurationSet":
        return DurationSet(((0, 0),))

    @staticmethod
    def single(n: int) -> "DurationSet":
        return DurationSet(((n, n),))

    @staticmethod
    def between(lo: int, hi: int) -> "DurationSet":
        return DurationSet(((lo, hi),))

    @staticmethod
    def at_least(lo: int) -> "DurationSet":
        return DurationSet(((lo, None),))

    @staticmethod
    def from_values(values: Iterable[int]) -> "DurationSet":
        return DurationSet(tuple((v, v) for v in values))

    # -- predicates ------------------------------------------------------

    def contains(self, n: int) -> bool:
        if n < 0:
            return False
        for lo, hi in self.intervals:
            if n < lo:
                return False
            if hi is None or n <= hi:
                return True
        return False

    @property
    def is_singleton_zero(self) -> bool:
        return self.intervals == ((0, 0),)

    @property
    def is_contiguous(self) -> bool:
        return len(self.intervals) == 1

    @property
    def is_finite(self) -> bool:
        return self.intervals[-1][1] is not None

    @property
    def sort_key(self) -> tuple:
        """Intervals with unbounded uppers mapped to +inf; totally ordered,
        unlike raw interval tuples whose None uppers refuse comparison."""
        return tuple((lo, float("inf") if hi is None else hi) for lo, hi in self.intervals)

    # -- bounds and iteration ---------------------------------------------

    @property
    def min_value(self) -> int:
        return self.intervals[0][0]

    @property
    def max_value(self) -> Optional[int]:
        """Largest member, or None when unbounded."""
        return self.intervals[-1][1]

    def values(self) -> Iterator[int]:
        """All members ascending; only defined for finite sets."""
        if not self.is_finite:
            raise ValueError("cannot iterate an unbounded duration set")
        for lo, hi in self.intervals:
            yield from range(lo, hi + 1)

    def mask(self, horizon: int) -> np.ndarray:
        """uint8 indicator over [0, horizon]: mask[d] == 1 iff d is a member."""
        out = np.zeros(horizon + 1, dtype=np.uint8)
        for lo, hi in self.intervals:
            if lo > horizon:
                break
            top = horizon if hi is None else min(hi, horizon)
            out[lo : top + 1] = 1
        return out

    # -- serialization -----------------------------------------------------

    def as_json(self) -> list[list]:
        return [[lo, hi] for lo, hi in self.intervals]

    @staticmethod
    def from_json(data) -> "DurationSet":
        if not isinstance(data, list) or not data:
            raise ValueError("duration set must be a nonempty list of [lo, hi] pairs")
        pairs = []
        for item in data:
            if not isinstance(item, list) or len(item) != 2:
                raise ValueError(f"expected [lo, hi] pair, got {item!r}")
            pairs.append((item[0], item[1]))
        return DurationSet(tuple(pairs))

    def __str__(self) -> str:
        parts = []
        for lo, hi in self.intervals:
            if hi is None:
                parts.append(f"[{lo},inf)")
            elif lo == hi:
                parts.append(f"{{{lo}}}")
            else:
                parts.append(f"[{lo},{hi}]")
        return "+".join(parts)


# Common carriers for the qualitative relations, fixed once.
ZERO = DurationSet.zero()
BEFORE = DurationSet.at_least(1)  # strict "<" over discrete time
ANY_DELAY = DurationSet.at_least(0)  # containment / weak precedence
