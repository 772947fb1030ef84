"""CSV tables and atomic file output."""

from __future__ import annotations

import contextlib
import csv
import io
import os
import tempfile
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .intervals import IntervalKind, SpectralInterval
from .models import POLE_GUARD, UnitCell
from .spectrum import EDGE_EPS, LOG2, Classification, log_margin, rhs_array

BANDS_HEADER = ["lambda", "omega", "rhs", "classification", "k", "attenuation"]
INTERVAL_HEADER = ["kind", "lo", "hi", "lo_refined", "hi_refined"]


def fmt(x: float) -> str:
    return f"{x:.12g}"


@contextlib.contextmanager
def atomic_path(path: str | Path) -> Iterator[Path]:
    """Yield a temporary sibling of ``path``; rename it over ``path`` on success."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    os.close(fd)
    try:
        yield Path(tmp)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def write_text(path: str | Path, text: str) -> Path:
    with atomic_path(path) as tmp:
        tmp.write_text(text, newline="")
    return Path(path)


def _csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def interval_rows(intervals: Sequence[SpectralInterval]):
    for iv in intervals:
        yield [
            iv.kind.value,
            fmt(iv.lo),
            fmt(iv.hi),
            str(iv.lo_refined).lower(),
            str(iv.hi_refined).lower(),
        ]


def write_intervals(path: str | Path, intervals: Sequence[SpectralInterval]) -> Path:
    return write_text(path, _csv_text(INTERVAL_HEADER, interval_rows(intervals)))


def read_intervals(path: str | Path) -> list[SpectralInterval]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != INTERVAL_HEADER:
            raise ValueError(f"{path}: unexpected header {reader.fieldnames}")
        return [
            SpectralInterval(
                float(r["lo"]),
                float(r["hi"]),
                IntervalKind(r["kind"]),
                r["lo_refined"] == "true",
                r["hi_refined"] == "true",
            )
            for r in reader
        ]


def band_rows(cell: UnitCell, lams: np.ndarray, eps: float = EDGE_EPS):
    """One row per grid point; ``k`` only where a real wavenumber exists,
    ``attenuation`` only inside gaps. Points on a resonator pole are
    labelled ``pole`` with empty numeric fields."""
    lams = np.asarray(lams, dtype=float)
    n = len(cell)
    near = np.zeros(lams.shape, bool)
    for p in cell.poles():
        near |= np.abs(lams - p) <= POLE_GUARD
    ok = ~near
    rhs = np.full(lams.shape, np.nan)
    margin = np.full(lams.shape, np.nan)
    if ok.any():
        rhs[ok] = rhs_array(cell, lams[ok])
        margin[ok] = log_margin(cell, lams[ok])
    for lam, r, m, pole in zip(lams, rhs, margin, near):
        row = [fmt(lam), fmt(np.sqrt(lam))]
        if pole:
            yield row + ["", "pole", "", ""]
            continue
        a = abs(r)
        if a < 2 - eps:
            cls = Classification.PASS_BAND
        elif a > 2 + eps:
            cls = Classification.BAND_GAP
        else:
            cls = Classification.EDGE
        k = att = ""
        if cls is Classification.BAND_GAP:
            # arccosh(|RHS|/2) -> log|RHS| once |RHS| overflows
            att = fmt(np.arccosh(a / 2) / n if np.isfinite(a) else (m + LOG2) / n)
        else:
            k = fmt(np.arccos(np.clip(r / 2, -1, 1)) / n)
        yield row + [fmt(r), cls.value, k, att]


def write_bands(path: str | Path, cell: UnitCell, lams: np.ndarray) -> Path:
    return write_text(path, _csv_text(BANDS_HEADER, band_rows(cell, lams)))
