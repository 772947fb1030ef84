"""Labelled open intervals on the squared-frequency axis and set operations on them."""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence


class IntervalKind(str, Enum):
    PASS_BAND = "pass_band"
    BAND_GAP = "band_gap"
    ELEMENT_GAP = "element_gap"
    HIERARCHICAL_GAP = "hierarchical_gap"


@dataclass(frozen=True)
class SpectralInterval:
    """Open interval ``(lo, hi)`` of squared frequency.

    ``lo_refined``/``hi_refined`` say whether an endpoint is a genuine band
    edge (solved analytically or by bisection) as opposed to a cut at the
    edge of the requested range.
    """

    lo: float
    hi: float
    kind: IntervalKind
    lo_refined: bool = True
    hi_refined: bool = True

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty interval ({self.lo}, {self.hi})")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, lam: float) -> bool:
        return self.lo < lam < self.hi


def check_range(rng: Sequence[float]) -> tuple[float, float]:
    lo, hi = (float(x) for x in rng)
    if not (0 <= lo < hi) or hi == float("inf"):
        raise ValueError(f"range must satisfy 0 <= lo < hi < inf, got ({lo}, {hi})")
    return lo, hi


def clip(iv: SpectralInterval, lo: float, hi: float) -> SpectralInterval | None:
    a, b = max(iv.lo, lo), min(iv.hi, hi)
    if not a < b:
        return None
    return replace(
        iv,
        lo=a,
        hi=b,
        lo_refined=iv.lo_refined and a == iv.lo,
        hi_refined=iv.hi_refined and b == iv.hi,
    )


def intersect(
    a: Sequence[SpectralInterval],
    b: Sequence[SpectralInterval],
    kind: IntervalKind | None = None,
) -> list[SpectralInterval]:
    """Intersection of two sorted, disjoint lists of open intervals."""
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        x, y = a[i], b[j]
        lo, hi = max(x.lo, y.lo), min(x.hi, y.hi)
        if lo < hi:
            lo_ref = x.lo_refined if x.lo >= y.lo else y.lo_refined
            hi_ref = x.hi_refined if x.hi <= y.hi else y.hi_refined
            out.append(SpectralInterval(lo, hi, kind or x.kind, lo_ref, hi_ref))
        if x.hi < y.hi:
            i += 1
        else:
            j += 1
    return out


def intersect_all(
    sets: Iterable[Sequence[SpectralInterval]], kind: IntervalKind
) -> list[SpectralInterval]:
    sets = list(sets)
    if not sets:
        raise ValueError("need at least one interval set")
    acc = [replace(iv, kind=kind) for iv in sets[0]]
    for s in sets[1:]:
        acc = intersect(acc, s, kind)
    return acc
