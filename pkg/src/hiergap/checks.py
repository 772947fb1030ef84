"""Randomised and exact self-checks of the transfer-matrix algebra.

These back the ``verify`` command. Each check returns a :class:`CheckResult`;
a failure indicates an arithmetic or implementation fault.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sl2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    trials: int
    failures: int
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.trials - self.failures}/{self.trials} {self.detail}".rstrip()


def _pendulum_stack(t: np.ndarray) -> np.ndarray:
    m = np.zeros(t.shape + (2, 2))
    m[..., 0, 1] = 1.0
    m[..., 1, 0] = -1.0
    m[..., 1, 1] = t
    return m


def _reverse_rows(ts: np.ndarray, lengths: np.ndarray) -> np.ndarray:
    n = ts.shape[1]
    j = np.arange(n)
    idx = np.where(j < lengths[:, None], lengths[:, None] - 1 - j, j)
    return np.take_along_axis(ts, idx, axis=1)


def theorem_trials(rng: np.random.Generator, trials: int, max_len: int = 50) -> CheckResult:
    ts, lengths = sl2.random_coefficient_batch(rng, trials, max_len)
    p = sl2.batch_products(ts, lengths)
    tr = p[:, 0, 0] + p[:, 1, 1]
    bad = int(np.count_nonzero(~(np.abs(tr) > 2)))
    margin = float(np.min(np.abs(tr) - 2))
    return CheckResult("trace_closure", bad == 0, trials, bad, f"min margin {margin:.3e}")


def lemma_trials(rng: np.random.Generator, trials: int, max_len: int = 50) -> CheckResult:
    ts, lengths = sl2.random_coefficient_batch(rng, trials, max_len)
    p = sl2.batch_products(ts, lengths)
    d = np.abs(p[:, 1, 1])
    ok = (d > np.abs(p[:, 0, 1]) + 1) & (d > np.abs(p[:, 1, 0]) + 1)
    bad = int(np.count_nonzero(~ok))
    return CheckResult("entry_inequalities", bad == 0, trials, bad)


def closed_form_powers(n_max: int = 64) -> CheckResult:
    bad = 0
    for t, closed in ((2, sl2.power_t2), (-2, sl2.power_tm2)):
        acc = sl2.IDENTITY
        for n in range(1, n_max + 1):
            acc = sl2.t_matrix(t) @ acc
            expected_tr = 2 if t == 2 or n % 2 == 0 else -2
            c = closed(n)
            if c != acc or c.trace != expected_tr or c.det != 1:
                bad += 1
    return CheckResult("closed_form_powers", bad == 0, 2 * n_max, bad)


def non_closure() -> CheckResult:
    a, b, v = sl2.non_closure_counterexample()
    ok = (
        abs(a.trace) > 2
        and abs(b.trace) > 2
        and a.det == 1
        and b.det == 1
        and (a @ b).det == 1
        and v.trace == 1
        and not v.in_M
    )
    return CheckResult("non_closure", ok, 1, 0 if ok else 1)


def reversal_trials(
    rng: np.random.Generator, trials: int, max_len: int = 50, rtol: float = 1e-9
) -> CheckResult:
    lengths = rng.integers(1, max_len + 1, size=trials)
    ts = rng.uniform(-4, 4, size=(trials, max_len))
    fwd = sl2.batch_products(ts, lengths)
    rev = sl2.batch_products(_reverse_rows(ts, lengths), lengths)
    a = fwd[:, 0, 0] + fwd[:, 1, 1]
    b = rev[:, 0, 0] + rev[:, 1, 1]
    scale = np.maximum(1.0, np.abs(a))
    bad = int(np.count_nonzero(np.abs(a - b) > rtol * scale))
    return CheckResult("reversal_invariance", bad == 0, trials, bad)


def conjugation_trials(
    rng: np.random.Generator, trials: int, max_len: int = 50, rtol: float = 1e-9
) -> CheckResult:
    """Products of ``[[0, 1], [-1, t]]`` via generic matmul versus ``T(t)`` products."""
    lengths = rng.integers(1, max_len + 1, size=trials)
    ts = rng.uniform(-4, 4, size=(trials, max_len))
    ref = sl2.batch_products(ts, lengths)
    acc = np.broadcast_to(np.eye(2), (trials, 2, 2)).copy()
    mats = _pendulum_stack(ts)
    for j in range(max_len):
        active = (j < lengths)[:, None, None]
        acc = np.where(active, mats[:, j] @ acc, acc)
    a = ref[:, 0, 0] + ref[:, 1, 1]
    b = acc[:, 0, 0] + acc[:, 1, 1]
    scale = np.maximum(1.0, np.abs(a))
    bad = int(np.count_nonzero(np.abs(a - b) > rtol * scale))
    return CheckResult("conjugation_invariance", bad == 0, trials, bad)


def determinant_trials(
    rng: np.random.Generator, trials: int, max_len: int = 64, rtol: float = 1e-12
) -> CheckResult:
    lengths = rng.integers(1, max_len + 1, size=trials)
    ts = rng.uniform(-2.5, 2.5, size=(trials, max_len))
    p = sl2.batch_products(ts, lengths)
    det = p[:, 0, 0] * p[:, 1, 1] - p[:, 0, 1] * p[:, 1, 0]
    # cancellation in det scales with the size of the entries
    scale = np.maximum(1.0, np.max(np.abs(p).reshape(trials, -1), axis=1) ** 2)
    bad = int(np.count_nonzero(np.abs(det - 1) > rtol * scale))
    return CheckResult("determinant", bad == 0, trials, bad)


def property_suite(seed: int, trials: int = 2000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        theorem_trials(rng, trials),
        lemma_trials(rng, trials),
        closed_form_powers(),
        non_closure(),
        reversal_trials(rng, trials),
        conjugation_trials(rng, trials),
        determinant_trials(rng, trials),
    ]
