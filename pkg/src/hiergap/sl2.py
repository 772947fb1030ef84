"""
Transfer-matrix algebra for three-term recurrences.

A site with coefficient ``t`` carries the companion matrix

    T(t) = [[0, -1],
            [1,  t]]

which has determinant 1 for every ``t``. Entries are kept as whatever numeric
type the caller supplies, so integer and :class:`fractions.Fraction` inputs
stay exact while floats give ordinary double-precision results.

Product convention: for coefficients ``t_1, ..., t_n`` listed in site order,
:func:`product` returns ``T(t_n) @ ... @ T(t_1)``. Site 1 acts first on the
state vector ``(g(i-1), g(i))``. Traces do not depend on this choice: the
reversed product is ``D @ P.T @ D`` with ``D = diag(1, -1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "TransferMatrix",
    "TraceVerdict",
    "IDENTITY",
    "t_matrix",
    "pendulum_matrix",
    "product",
    "power_t2",
    "power_tm2",
    "trace_verdict",
    "lemma_entry_check",
    "theorem_margin",
    "non_closure_counterexample",
    "batch_products",
    "random_coefficient_batch",
]


@dataclass(frozen=True)
class TransferMatrix:
    a11: Real
    a12: Real
    a21: Real
    a22: Real

    def __matmul__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.a11 * other.a11 + self.a12 * other.a21,
            self.a11 * other.a12 + self.a12 * other.a22,
            self.a21 * other.a11 + self.a22 * other.a21,
            self.a21 * other.a12 + self.a22 * other.a22,
        )

    def __add__(self, other: "TransferMatrix") -> "TransferMatrix":
        return TransferMatrix(
            self.a11 + other.a11,
            self.a12 + other.a12,
            self.a21 + other.a21,
            self.a22 + other.a22,
        )

    def scale(self, c) -> "TransferMatrix":
        return TransferMatrix(c * self.a11, c * self.a12, c * self.a21, c * self.a22)

    @property
    def trace(self):
        return self.a11 + self.a22

    @property
    def det(self):
        return self.a11 * self.a22 - self.a12 * self.a21

    @property
    def rows(self) -> tuple[tuple, tuple]:
        return (self.a11, self.a12), (self.a21, self.a22)

    def transpose(self) -> "TransferMatrix":
        return TransferMatrix(self.a11, self.a21, self.a12, self.a22)

    def to_array(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


@dataclass(frozen=True)
class TraceVerdict:
    """Trace of a unimodular matrix and whether it lies outside [-2, 2]."""

    trace: float
    in_M: bool
    margin: float


IDENTITY = TransferMatrix(1, 0, 0, 1)
# [[-1, -1], [1, 1]] and [[-1, 1], [-1, 1]]: the nilpotent parts of T(2)^n, T(-2)^n
_N_PLUS = TransferMatrix(-1, -1, 1, 1)
_N_MINUS = TransferMatrix(-1, 1, -1, 1)


def _check_finite(t) -> None:
    if isinstance(t, bool) or not isinstance(t, (Real, np.floating, np.integer)):
        raise TypeError(f"coefficient must be a real number, got {type(t).__name__}")
    if not isinstance(t, (int, Fraction, np.integer)) and not math.isfinite(t):
        raise ValueError(f"coefficient must be finite, got {t!r}")


def t_matrix(t) -> TransferMatrix:
    """Companion matrix ``[[0, -1], [1, t]]`` of a single site."""
    _check_finite(t)
    return TransferMatrix(0, -1, 1, t)


def pendulum_matrix(t) -> TransferMatrix:
    """Site matrix ``[[0, 1], [-1, t]]`` as written for pendulum chains.

    It equals ``D @ T(t) @ D`` with ``D = diag(1, -1)``, so products of these
    share their trace with the matching product of :func:`t_matrix` values.
    """
    _check_finite(t)
    return TransferMatrix(0, 1, -1, t)


def product(seq: Iterable[TransferMatrix]) -> TransferMatrix:
    """Ordered product of site matrices; the first element acts first."""
    out = IDENTITY
    for m in seq:
        out = m @ out
    return out


def _check_power(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise TypeError("power must be an integer")
    if n < 1:
        raise ValueError(f"power must be >= 1, got {n} (use product([]) for the identity)")


def power_t2(n: int) -> TransferMatrix:
    """Closed form ``T(2)^n = T(2) + (n - 1) [[-1, -1], [1, 1]]``; trace 2."""
    _check_power(n)
    return t_matrix(2) + _N_PLUS.scale(n - 1)


def power_tm2(n: int) -> TransferMatrix:
    """Closed form ``T(-2)^n = (-1)^n ((n - 1) [[-1, 1], [-1, 1]] - T(-2))``.

    The trace is ``2`` for even ``n`` and ``-2`` for odd ``n``.
    """
    _check_power(n)
    sign = -1 if n % 2 else 1
    return (_N_MINUS.scale(n - 1) + t_matrix(-2).scale(-1)).scale(sign)


def trace_verdict(m: TransferMatrix) -> TraceVerdict:
    tr = m.trace
    margin = abs(tr) - 2
    return TraceVerdict(trace=tr, in_M=bool(margin > 0), margin=margin)


def _coefficients(ts: Sequence) -> list:
    ts = list(ts)
    if not ts:
        raise ValueError("coefficient sequence must be non-empty")
    for t in ts:
        _check_finite(t)
    return ts


def lemma_entry_check(ts: Sequence) -> bool:
    """Check the two entry inequalities that drive the trace bound.

    For ``P = product(T(t) for t in ts)`` this returns whether both
    ``|P[1,1]| > |P[0,1]| + 1`` and ``|P[1,1]| > |P[1,0]| + 1`` hold
    (zero-based indices).

    Raises
    ------
    ValueError
        If ``ts`` is empty or any ``|t| <= 2``. The inequalities are strict,
        so the boundary ``|t| = 2`` is excluded (they fail there already
        for a single site).
    """
    ts = _coefficients(ts)
    bad = [t for t in ts if not abs(t) > 2]
    if bad:
        raise ValueError(f"every coefficient needs |t| > 2, got {bad[0]!r}")
    p = product(t_matrix(t) for t in ts)
    d = abs(p.a22)
    return bool(d > abs(p.a12) + 1 and d > abs(p.a21) + 1)


def theorem_margin(ts: Sequence) -> TraceVerdict:
    """Trace verdict of the ordered product of ``T(t)`` over ``ts``.

    If all ``|t| > 2`` the verdict is always ``in_M``; anything else there
    means the arithmetic is broken.
    """
    ts = _coefficients(ts)
    return trace_verdict(product(t_matrix(t) for t in ts))


def non_closure_counterexample() -> tuple[TransferMatrix, TransferMatrix, TraceVerdict]:
    """Two matrices with ``|trace| > 2`` whose product has trace 1.

    ``A = diag(3, 1/3)`` and ``B = T(3)``; entries are exact fractions.
    """
    a = TransferMatrix(Fraction(3), Fraction(0), Fraction(0), Fraction(1, 3))
    b = t_matrix(Fraction(3))
    return a, b, trace_verdict(a @ b)


# --- vectorized helpers -----------------------------------------------------


def batch_products(ts: np.ndarray, lengths: np.ndarray | None = None) -> np.ndarray:
    """Products of ``T(t)`` for many coefficient rows at once.

    Parameters
    ----------
    ts : ndarray, shape (trials, n)
        Coefficients in site order.
    lengths : ndarray of int, optional
        Number of leading entries of each row to use. Padding past the length
        is ignored.

    Returns
    -------
    ndarray, shape (trials, 2, 2)
    """
    ts = np.asarray(ts, dtype=float)
    trials, n = ts.shape
    if lengths is None:
        lengths = np.full(trials, n)
    a11 = np.ones(trials)
    a12 = np.zeros(trials)
    a21 = np.zeros(trials)
    a22 = np.ones(trials)
    for j in range(n):
        active = j < lengths
        t = ts[:, j]
        # T(t) @ P: row1 <- -row2, row2 <- row1 + t*row2
        n11 = -a21
        n12 = -a22
        n21 = a11 + t * a21
        n22 = a12 + t * a22
        a11 = np.where(active, n11, a11)
        a12 = np.where(active, n12, a12)
        a21 = np.where(active, n21, a21)
        a22 = np.where(active, n22, a22)
    return np.stack([np.stack([a11, a12], -1), np.stack([a21, a22], -1)], -2)


def random_coefficient_batch(
    rng: np.random.Generator,
    trials: int,
    max_len: int = 50,
    lo: float = 2 + 1e-6,
    hi: float = 1e3,
) -> tuple[np.ndarray, np.ndarray]:
    """Random coefficient rows with ``|t|`` uniform in ``[lo, hi]`` and random signs."""
    lengths = rng.integers(1, max_len + 1, size=trials)
    mags = rng.uniform(lo, hi, size=(trials, max_len))
    signs = rng.choice([-1.0, 1.0], size=(trials, max_len))
    return mags * signs, lengths
