"""
Physical lattice elements and the site coefficient each one contributes.

Every element maps a squared frequency ``lam = omega**2`` to a real
coefficient ``t(lam)``; the element is in a band gap exactly when
``|t(lam)| > 2``. Coefficients follow the sign each model is usually written
with:

* mass-spring chain:  ``t = lam * m / kappa - 2``
* pendulum on a mass: ``t = 2 - (lam - lam_res) * m / kappa``
* local resonator:    ``t = 2 - M_eff(lam) * lam / kappa`` with
  ``M_eff(lam) = M + m_inner * lam_res / (lam_res - lam)``

Pendulum and resonator chains are naturally written as ``u_{i+1} = t u_i -
u_{i-1}``, while the mass-spring chain is written as ``u_{i+1} = -t u_i -
u_{i-1}``. :func:`recurrence_coefficient` maps all three onto the second
form so that cells mixing kinds are propagated consistently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .intervals import IntervalKind, SpectralInterval, check_range

POLE_GUARD = 1e-9


class ElementKind(str, Enum):
    MASS_SPRING = "mass_spring"
    PENDULUM = "pendulum"
    RESONANT = "resonant"


class PoleProximityError(ValueError):
    def __init__(self, pole: float, lam: float, guard: float):
        self.pole = pole
        self.lam = lam
        super().__init__(f"lambda={lam!r} lies within {guard:g} of the resonance pole at {pole!r}")


class DegenerateElementWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ElementModel:
    kind: ElementKind
    mass: float
    kappa: float
    resonance: float = 0.0
    outer_mass: float = 0.0
    inner_mass: float = 0.0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", ElementKind(self.kind))
        for name in ("mass", "kappa", "resonance", "outer_mass", "inner_mass"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if self.kappa <= 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.resonance < 0:
            raise ValueError(f"resonance must be non-negative, got {self.resonance}")
        if self.kind is ElementKind.PENDULUM:
            if self.mass < 0:
                raise ValueError(f"pendulum mass must be >= 0, got {self.mass}")
        elif self.kind is ElementKind.MASS_SPRING:
            if self.mass <= 0:
                raise ValueError(f"mass must be positive, got {self.mass}")
            object.__setattr__(self, "resonance", 0.0)
        else:
            if self.outer_mass <= 0 or self.inner_mass <= 0:
                raise ValueError("resonant elements need positive outer_mass and inner_mass")
            if self.resonance <= 0:
                raise ValueError("resonant elements need a positive resonance")

    @property
    def degenerate(self) -> bool:
        """A massless pendulum: ``t`` is identically 2, a permanent band edge."""
        return self.kind is ElementKind.PENDULUM and self.mass == 0

    @property
    def poles(self) -> tuple[float, ...]:
        return (self.resonance,) if self.kind is ElementKind.RESONANT else ()

    @property
    def name(self) -> str:
        return self.label or f"{self.kind.value}(m={self.mass:g})"


def mass_spring(m: float, kappa: float, label: str = "") -> ElementModel:
    return ElementModel(ElementKind.MASS_SPRING, m, kappa, label=label)


def pendulum(m: float, kappa: float, resonance: float, label: str = "") -> ElementModel:
    return ElementModel(ElementKind.PENDULUM, m, kappa, resonance, label=label)


def resonant(
    outer_mass: float, inner_mass: float, resonance: float, kappa: float, label: str = ""
) -> ElementModel:
    return ElementModel(
        ElementKind.RESONANT,
        outer_mass,
        kappa,
        resonance,
        outer_mass=outer_mass,
        inner_mass=inner_mass,
        label=label,
    )


def effective_mass(e: ElementModel, lam):
    return e.outer_mass + e.inner_mass * e.resonance / (e.resonance - lam)


def coefficient(e: ElementModel, lam, guard: float = POLE_GUARD):
    """Site coefficient ``t(lam)``; accepts a scalar or an array of ``lam``.

    Raises
    ------
    PoleProximityError
        For a resonator evaluated within ``guard`` of its resonance.
    """
    arr = np.asarray(lam, dtype=float)
    if np.any(arr < 0):
        raise ValueError("squared frequency must be non-negative")
    if e.kind is ElementKind.MASS_SPRING:
        t = arr * e.mass / e.kappa - 2.0
    elif e.kind is ElementKind.PENDULUM:
        t = 2.0 - (arr - e.resonance) * e.mass / e.kappa
    else:
        close = np.abs(arr - e.resonance) <= guard
        if np.any(close):
            bad = float(arr[close].flat[0]) if arr.ndim else float(arr)
            raise PoleProximityError(e.resonance, bad, guard)
        t = 2.0 - effective_mass(e, arr) * arr / e.kappa
    return float(t) if np.ndim(t) == 0 else t


def recurrence_coefficient(e: ElementModel, lam, guard: float = POLE_GUARD):
    """Coefficient in the ``g(i+1) + g(i-1) + t g(i) = 0`` convention."""
    t = coefficient(e, lam, guard)
    return t if e.kind is ElementKind.MASS_SPRING else -t


def _critical_points(e: ElementModel) -> tuple[list[float], list[float]]:
    """Points where ``|t| = 2`` and pole locations, both sorted."""
    k, m = e.kappa, e.mass
    if e.kind is ElementKind.MASS_SPRING:
        return [0.0, 4 * k / m], []
    if e.kind is ElementKind.PENDULUM:
        return [e.resonance, e.resonance + 4 * k / m], []
    r, big, small = e.resonance, e.outer_mass, e.inner_mass
    pts = [0.0, r * (big + small) / big]
    # t = -2 after clearing (r - lam):  M lam^2 - (M r + m r + 4k) lam + 4 k r = 0
    b = big * r + small * r + 4 * k
    disc = b * b - 16 * big * k * r
    sq = math.sqrt(disc)
    # stable pair: r1 * r2 = 4 k r / M
    hi_root = (b + sq) / (2 * big)
    lo_root = 4 * k * r / (big * hi_root)
    pts += [lo_root, hi_root]
    return sorted(pts), [r]


def element_gap_set(e: ElementModel, rng: Sequence[float]) -> list[SpectralInterval]:
    """Open intervals of ``rng`` where ``|t(lam)| > 2``, found in closed form.

    Candidate endpoints are the roots of ``t = +-2`` (for resonators these are
    quadratics once the pole denominator is cleared) and the pole itself; each
    piece between them is classified by the sign of ``|t| - 2`` at its midpoint.
    A massless pendulum yields no gaps and emits :class:`DegenerateElementWarning`.
    """
    lo, hi = check_range(rng)
    if e.degenerate:
        warnings.warn(
            f"{e.name}: massless pendulum has t == 2 everywhere; no strict gaps",
            DegenerateElementWarning,
            stacklevel=2,
        )
        return []
    crit, poles = _critical_points(e)
    edges = sorted({p for p in crit + poles if lo < p < hi})
    cuts = [lo] + edges + [hi]
    out = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (a + b)
        if abs(coefficient(e, mid, guard=0.0)) > 2:
            out.append(
                SpectralInterval(
                    a, b, IntervalKind.ELEMENT_GAP, lo_refined=a != lo, hi_refined=b != hi
                )
            )
    return out


@dataclass(frozen=True)
class UnitCell:
    elements: tuple[ElementModel, ...]
    name: str = "cell"

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if not self.elements:
            raise ValueError("a unit cell needs at least one element")

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def distinct(self) -> list[ElementModel]:
        return list(dict.fromkeys(self.elements))

    def poles(self) -> list[float]:
        return sorted({p for e in self.elements for p in e.poles})

    def reversed(self) -> "UnitCell":
        return UnitCell(self.elements[::-1], f"{self.name} (reversed)")


def fibonacci_word(depth: int) -> str:
    """Word over ``{"a", "b"}``: ``W1 = a``, ``W2 = b``, ``Wn = W(n-1) + W(n-2)``."""
    if isinstance(depth, bool) or not isinstance(depth, (int, np.integer)):
        raise TypeError("depth must be an integer")
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    if depth == 1:
        return "a"
    prev, cur = "a", "b"
    for _ in range(depth - 2):
        prev, cur = cur, cur + prev
    return cur


def fibonacci_cell(a: ElementModel, b: ElementModel, depth: int) -> UnitCell:
    word = fibonacci_word(depth)
    return UnitCell(tuple(a if c == "a" else b for c in word), f"F{depth}")


def pendulum_thresholds(elements: Sequence[ElementModel]) -> tuple[float, float, float, float]:
    """Extremes of the pendulum gap edges over a set of elements.

    Returns ``(min lam_res, min(lam_res + 4 kappa/m), max lam_res,
    max(lam_res + 4 kappa/m))``. Note that the second value is only a lower
    bound for the start of a mid-frequency common gap; the exact common gaps
    come from :func:`hiergap.spectrum.hierarchical_gaps`.
    """
    els = [e for e in elements if e.kind is ElementKind.PENDULUM and not e.degenerate]
    if not els or len(els) != len(elements):
        raise ValueError("thresholds need non-degenerate pendulum elements only")
    res = [e.resonance for e in els]
    upper = [e.resonance + 4 * e.kappa / e.mass for e in els]
    return min(res), min(upper), max(res), max(upper)
