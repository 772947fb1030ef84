"""
Floquet-Bloch spectra of periodic cells and hierarchical gap prediction.

For a cell of ``n`` sites the unit-cell propagator is ``(-1)^n T(t_n) ... T(t_1)``
(recurrence convention of :func:`hiergap.models.recurrence_coefficient`), and
a squared frequency ``lam`` lies in a pass band iff

    2 cos(n k) = (-1)^n tr(T(t_n) ... T(t_1))

has a real solution ``k``, i.e. iff the right-hand side is in ``[-2, 2]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .intervals import (
    IntervalKind,
    SpectralInterval,
    check_range,
    intersect_all,
)
from .models import (
    POLE_GUARD,
    ElementModel,
    UnitCell,
    element_gap_set,
    recurrence_coefficient,
)

LOG2 = math.log(2.0)
EDGE_EPS = 1e-9
DEFAULT_GRID = 4096
DEFAULT_TOL = 1e-9
_RESCALE_EVERY = 8


class Classification(str, Enum):
    PASS_BAND = "pass_band"
    BAND_GAP = "band_gap"
    EDGE = "edge"


class OutOfBandError(ValueError):
    pass


# --- vectorized propagation -------------------------------------------------


def _scaled_rhs(cell: UnitCell, lams: np.ndarray, guard: float = POLE_GUARD):
    """Dispersion right-hand side as ``mantissa * exp(log_scale)``.

    Products are renormalised every few sites so that long cells deep inside
    a gap do not overflow.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    coeffs = {e: recurrence_coefficient(e, lams, guard) for e in cell.distinct()}
    a11 = np.ones_like(lams)
    a12 = np.zeros_like(lams)
    a21 = np.zeros_like(lams)
    a22 = np.ones_like(lams)
    log_scale = np.zeros_like(lams)
    for i, e in enumerate(cell.elements, 1):
        t = coeffs[e]
        a11, a12, a21, a22 = -a21, -a22, a11 + t * a21, a12 + t * a22
        if i % _RESCALE_EVERY == 0:
            s = np.maximum.reduce([np.abs(a11), np.abs(a12), np.abs(a21), np.abs(a22)])
            a11, a12, a21, a22 = a11 / s, a12 / s, a21 / s, a22 / s
            log_scale += np.log(s)
    mantissa = a11 + a22
    if len(cell) % 2:
        mantissa = -mantissa
    return mantissa, log_scale


def log_margin(cell: UnitCell, lams, guard: float = POLE_GUARD) -> np.ndarray:
    """``log|RHS| - log 2``: positive exactly in band gaps."""
    mantissa, log_scale = _scaled_rhs(cell, lams, guard)
    with np.errstate(divide="ignore"):
        return np.log(np.abs(mantissa)) + log_scale - LOG2


def rhs_array(cell: UnitCell, lams, guard: float = POLE_GUARD) -> np.ndarray:
    mantissa, log_scale = _scaled_rhs(cell, lams, guard)
    with np.errstate(over="ignore"):
        return mantissa * np.exp(log_scale)


def _is_gap(cell: UnitCell, lams) -> np.ndarray:
    return log_margin(cell, lams) > 0


# --- pointwise operations ---------------------------------------------------


def dispersion_rhs(cell: UnitCell, lam: float) -> float:
    """``(-1)^n tr`` of the unit-cell transfer matrix at ``lam``.

    May be ``inf`` for very long cells deep in a gap; use :func:`log_margin`
    when magnitude matters there.
    """
    return float(rhs_array(cell, lam)[0])


def classify_rhs(rhs: float, eps: float = EDGE_EPS) -> Classification:
    if eps < 0:
        raise ValueError("eps must be non-negative")
    a = abs(rhs)
    if a < 2 - eps:
        return Classification.PASS_BAND
    if a > 2 + eps:
        return Classification.BAND_GAP
    return Classification.EDGE


def classify(cell: UnitCell, lam: float, eps: float = EDGE_EPS) -> Classification:
    return classify_rhs(dispersion_rhs(cell, lam), eps)


def wavenumber_from_rhs(rhs: float, n: int, eps: float = EDGE_EPS) -> float:
    if classify_rhs(rhs, eps) is Classification.BAND_GAP:
        raise OutOfBandError(f"|RHS| = {abs(rhs):.6g} > 2: no real Bloch wavenumber")
    return math.acos(min(1.0, max(-1.0, rhs / 2))) / n


def bloch_wavenumber(cell: UnitCell, lam: float, eps: float = EDGE_EPS) -> float:
    """Bloch wavenumber ``k`` in ``[0, pi/n]`` at a pass-band (or edge) point."""
    return wavenumber_from_rhs(dispersion_rhs(cell, lam), len(cell), eps)


def attenuation_from_rhs(rhs: float, n: int, eps: float = EDGE_EPS) -> float:
    if classify_rhs(rhs, eps) is not Classification.BAND_GAP:
        raise OutOfBandError(f"|RHS| = {abs(rhs):.6g} is not inside a band gap")
    return math.acosh(abs(rhs) / 2) / n


def attenuation_rate(cell: UnitCell, lam: float, eps: float = EDGE_EPS) -> float:
    """Per-site decay exponent ``arccosh(|RHS|/2) / n`` inside a gap."""
    rhs = dispersion_rhs(cell, lam)
    if math.isinf(rhs):
        # arccosh(x) -> log(2x) for huge x
        return float(log_margin(cell, lam)[0] + LOG2) / len(cell)
    return attenuation_from_rhs(rhs, len(cell), eps)


# --- scanning ---------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumResult:
    cell_name: str
    range: tuple[float, float]
    intervals: tuple[SpectralInterval, ...]
    grid: int
    tol: float

    @property
    def gaps(self) -> list[SpectralInterval]:
        return [iv for iv in self.intervals if iv.kind is IntervalKind.BAND_GAP]

    @property
    def bands(self) -> list[SpectralInterval]:
        return [iv for iv in self.intervals if iv.kind is IntervalKind.PASS_BAND]

    def kind_at(self, lam: float) -> IntervalKind | None:
        for iv in self.intervals:
            if iv.lo < lam < iv.hi:
                return iv.kind
        return None


def _segments(lo: float, hi: float, poles: Sequence[float], guard: float):
    """Pole-free closed sub-ranges ``[a, b]`` covering ``[lo, hi]``."""
    inner = [p for p in poles if lo + guard < p < hi - guard]
    cuts = [lo] + [x for p in inner for x in (p - guard, p + guard)] + [hi]
    return list(zip(cuts[::2], cuts[1::2])), inner


def edge_count(cell: UnitCell, lams, guard: float = POLE_GUARD) -> np.ndarray:
    """Number of band-edge crossings below each ``lam``, up to a per-window offset.

    In recurrence sign every site coefficient increases with ``lam`` between
    poles, so the eigenvalues of the Bloch-periodic and antiperiodic matrices
    ``J_s - diag(t(lam))`` (``J_s`` cyclic with unit couplings, corner ``s``)
    decrease monotonically. Their negative-eigenvalue counts, read off the
    pivots of a symmetric elimination, therefore jump by one at each
    ``|RHS| = 2`` point. Differences are meaningful only inside one pole-free
    window.
    """
    lams = np.atleast_1d(np.asarray(lams, dtype=float))
    coeffs = {e: recurrence_coefficient(e, lams, guard) for e in cell.distinct()}
    d = [-coeffs[e] for e in cell.elements]
    n = len(d)
    total = np.zeros(lams.shape, dtype=np.int64)
    for s in (1.0, -1.0):
        if n == 1:
            total += d[0] + 2 * s < 0
            continue
        q = _nonzero(d[0])
        w = np.full(lams.shape, s + (n == 2))
        r = d[-1].copy()
        neg = (q < 0).astype(np.int64)
        for i in range(1, n - 1):
            r = r - w * w / q
            w = (i == n - 2) - w / q
            q = _nonzero(d[i] - 1.0 / q)
            neg += q < 0
        r = r - w * w / q
        total += neg + (r < 0)
    return total


def _nonzero(q: np.ndarray) -> np.ndarray:
    # an exact zero pivot is perturbed to the positive side
    return np.where(q == 0, 1e-150, q)


def _brackets(cell: UnitCell, pts: np.ndarray, tol: float):
    """Sign-change brackets of the gap indicator over rows of ``pts``.

    Steps whose edge count exceeds what the indicator shows hide a thin band
    or gap; they are subdivided until the hidden edges separate or the step
    is narrower than ``tol``.
    """
    lefts, rights = [], []
    while pts.size:
        flat = pts.ravel()
        g = _is_gap(cell, flat).reshape(pts.shape)
        e = edge_count(cell, flat).reshape(pts.shape)
        change = g[:, :-1] != g[:, 1:]
        de = np.diff(e, axis=1)
        a, b = pts[:, :-1], pts[:, 1:]
        refine = (de > change) & (b - a > tol)
        take = change & ~refine
        lefts.append(a[take])
        rights.append(b[take])
        pts = np.linspace(a[refine], b[refine], 9, axis=1)
    return np.concatenate(lefts), np.concatenate(rights)


def _bisect(cell: UnitCell, left: np.ndarray, right: np.ndarray, tol: float) -> np.ndarray:
    """Shrink every bracket to width < ``tol`` then finish with one secant step."""
    if left.size == 0:
        return left
    a, b = left.copy(), right.copy()
    ga = _is_gap(cell, a)
    while np.max(b - a) >= tol:
        m = 0.5 * (a + b)
        gm = _is_gap(cell, m)
        same = gm == ga
        a = np.where(same, m, a)
        b = np.where(same, b, m)
    fa = log_margin(cell, a)
    fb = log_margin(cell, b)
    denom = fb - fa
    with np.errstate(invalid="ignore", divide="ignore"):
        x = a - fa * (b - a) / denom
    ok = np.isfinite(x) & (x >= a) & (x <= b)
    return np.where(ok, x, 0.5 * (a + b))


def _pieces_to_intervals(cell, cuts, lo, hi):
    c = np.asarray(cuts)
    gap = _is_gap(cell, 0.5 * (c[:-1] + c[1:]))
    kinds = [IntervalKind.BAND_GAP if g else IntervalKind.PASS_BAND for g in gap]
    merged: list[list] = []
    for (a, b), k in zip(zip(cuts[:-1], cuts[1:]), kinds):
        if merged and merged[-1][2] is k:
            merged[-1][1] = b
        else:
            merged.append([a, b, k])
    return tuple(
        SpectralInterval(a, b, k, lo_refined=a != lo, hi_refined=b != hi) for a, b, k in merged
    )


def scan_spectrum(
    cell: UnitCell,
    rng: Sequence[float],
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> SpectrumResult:
    """Pass bands and gaps of ``cell`` over ``rng``.

    ``|RHS| - 2`` is sampled on a uniform grid split at resonator poles. A
    grid step whose edge count (see :func:`edge_count`) disagrees with the
    sampled signs is subdivided, so bands and gaps thinner than the grid are
    still found; only features narrower than ``tol`` can be missed. Each sign
    change is bisected to width below ``tol``. The returned intervals tile
    ``rng``.
    """
    lo, hi = check_range(rng)
    if grid < 2:
        raise ValueError(f"grid must be >= 2, got {grid}")
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol}")
    base = np.linspace(lo, hi, grid)
    segs, poles = _segments(lo, hi, cell.poles(), 2 * POLE_GUARD)
    lefts, rights = [], []
    for a, b in segs:
        pts = np.concatenate(([a], base[(base > a) & (base < b)], [b]))
        l, r = _brackets(cell, pts[None, :], tol)
        lefts.append(l)
        rights.append(r)
    edges = _bisect(cell, np.concatenate(lefts), np.concatenate(rights), tol)
    keep = set(poles) | {lo, hi}
    cuts = _dedupe(sorted(set(edges.tolist()) | keep), tol, keep=keep)
    return SpectrumResult(cell.name, (lo, hi), _pieces_to_intervals(cell, cuts, lo, hi), grid, tol)


def _dedupe(points: list[float], tol: float, keep: set) -> list[float]:
    out: list[float] = []
    for p in points:
        if out and p - out[-1] < tol:
            if p in keep and out[-1] not in keep:
                out[-1] = p
            continue
        out.append(p)
    return out


# --- hierarchical gaps ------------------------------------------------------


def hierarchical_gaps(
    elements: Iterable[ElementModel], rng: Sequence[float]
) -> list[SpectralInterval]:
    """Squared frequencies lying in a gap of every element, as open intervals."""
    elements = list(dict.fromkeys(elements))
    if not elements:
        raise ValueError("need at least one element")
    return intersect_all(
        (element_gap_set(e, rng) for e in elements), IntervalKind.HIERARCHICAL_GAP
    )


@dataclass(frozen=True)
class HierarchicalReport:
    cell_name: str
    range: tuple[float, float]
    predicted: tuple[SpectralInterval, ...]
    combined_gaps: tuple[SpectralInterval, ...]
    containment_verified: bool
    samples_checked: int
    violations: tuple[float, ...] = field(default=())

    def summary(self) -> str:
        lines = [
            f"cell: {self.cell_name}",
            f"range: {self.range[0]:.12g} {self.range[1]:.12g}",
            f"predicted_intervals: {len(self.predicted)}",
        ]
        lines += [f"  hierarchical_gap {iv.lo:.12g} {iv.hi:.12g}" for iv in self.predicted]
        lines.append(f"combined_gaps: {len(self.combined_gaps)}")
        lines += [f"  band_gap {iv.lo:.12g} {iv.hi:.12g}" for iv in self.combined_gaps]
        lines.append(f"samples_checked: {self.samples_checked}")
        lines.append(f"containment_verified: {str(self.containment_verified).lower()}")
        if self.violations:
            lines.append("violations: " + " ".join(f"{x:.12g}" for x in self.violations[:20]))
        return "\n".join(lines) + "\n"


def sample_points(iv: SpectralInterval, samples: int, poles: Sequence[float] = ()) -> np.ndarray:
    """``samples`` evenly spaced interior points of ``iv``, minus any near a pole."""
    k = np.arange(1, samples + 1)
    pts = iv.lo + (iv.hi - iv.lo) * k / (samples + 1)
    for p in poles:
        pts = pts[np.abs(pts - p) > 2 * POLE_GUARD]
    return pts


def verify_containment(
    cell: UnitCell,
    rng: Sequence[float],
    samples: int = 256,
    constituents: Iterable[ElementModel] | None = None,
    grid: int = DEFAULT_GRID,
    tol: float = DEFAULT_TOL,
) -> HierarchicalReport:
    """Check that every predicted hierarchical gap is a gap of the whole cell.

    The prediction uses the cell's distinct elements unless ``constituents``
    is given (for example the two tiles of a Fibonacci word, which may not
    all appear in the shortest words). A failed check means a numerical
    fault, never a legitimate outcome.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    constituents = list(constituents) if constituents is not None else cell.distinct()
    predicted = hierarchical_gaps(constituents, rng)
    poles = cell.poles()
    checked = 0
    bad: list[float] = []
    for iv in predicted:
        pts = sample_points(iv, samples, poles)
        checked += pts.size
        if pts.size:
            m = log_margin(cell, pts)
            bad.extend(pts[~(m > 0)].tolist())
    combined = scan_spectrum(cell, rng, grid, tol).gaps
    return HierarchicalReport(
        cell.name,
        check_range(rng),
        tuple(predicted),
        tuple(combined),
        not bad,
        checked,
        tuple(bad),
    )
