"""Band diagrams rendered with matplotlib.

Figures are built on :class:`matplotlib.figure.Figure` directly so no GUI
backend is touched. Every track of a stacked diagram is a single collection
with gid ``track-<i>``, which the SVG writer emits as ``<g id="track-<i>">``;
hierarchical gaps are drawn hatched under gid ``hierarchical``.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib
import numpy as np
from matplotlib.figure import Figure
from matplotlib.ticker import MaxNLocator

from .intervals import IntervalKind, SpectralInterval

STYLE = {
    "font.family": "serif",
    "font.size": 9,
    "axes.labelsize": 10,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "legend.fontsize": 8,
    "hatch.linewidth": 0.8,
    "svg.hashsalt": "hiergap",
    "svg.fonttype": "path",
}
BAND_COLOR = "#2b5d8a"
GAP_COLOR = "#f2f2f2"
HATCH_COLOR = "#c0392b"


def _omega_axis(ax) -> None:
    sec = ax.secondary_xaxis(
        "top",
        functions=(lambda x: np.sqrt(np.clip(x, 0, None)), lambda w: np.square(w)),
    )
    # omega ticks bunch up near zero on a lambda axis; keep them sparse
    sec.xaxis.set_major_locator(MaxNLocator(5))
    sec.set_xlabel(r"$\omega$")


def _save(fig: Figure, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})


def pass_bands(gaps: Sequence[SpectralInterval], rng: tuple[float, float]) -> list[tuple[float, float]]:
    """Complement of ``gaps`` inside ``rng``."""
    out, cur = [], rng[0]
    for g in gaps:
        if g.lo > cur:
            out.append((cur, g.lo))
        cur = max(cur, g.hi)
    if cur < rng[1]:
        out.append((cur, rng[1]))
    return out


def band_diagram(
    tracks: Sequence[tuple[str, Sequence[SpectralInterval]]],
    hierarchical: Sequence[SpectralInterval],
    rng: tuple[float, float],
    path: str | Path,
    title: str = "",
) -> Path:
    """Stacked pass/stop-band bars, one row per track, first track on top.

    ``tracks`` holds ``(label, gaps)`` pairs; pass bands are the complement of
    the gaps within ``rng``.
    """
    path = Path(path)
    n = len(tracks)
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(6.0, 0.45 * n + 1.3))
        ax = fig.add_subplot()
        for i, (label, gaps) in enumerate(tracks):
            y = n - 1 - i
            spans, colors = [], []
            for lo, hi in pass_bands(gaps, rng):
                spans.append((lo, hi - lo))
                colors.append(BAND_COLOR)
            for g in gaps:
                spans.append((g.lo, g.hi - g.lo))
                colors.append(GAP_COLOR)
            coll = ax.broken_barh(spans, (y + 0.15, 0.7), facecolors=colors, edgecolor="none")
            coll.set_gid(f"track-{i}")
        if hierarchical:
            hc = ax.broken_barh(
                [(iv.lo, iv.hi - iv.lo) for iv in hierarchical],
                (0, n),
                facecolors="none",
                edgecolor=HATCH_COLOR,
                hatch="///",
                linewidth=0,
            )
            hc.set_gid("hierarchical")
        ax.set_yticks([n - 1 - i + 0.5 for i in range(n)])
        ax.set_yticklabels([label for label, _ in tracks])
        ax.set_ylim(0, n)
        ax.set_xlim(*rng)
        ax.set_xlabel(r"$\lambda = \omega^2$")
        _omega_axis(ax)
        if title:
            ax.set_title(title, fontsize=9, pad=22)
        fig.tight_layout()
        _save(fig, path)
    return path


def dispersion_figure(
    lams: np.ndarray,
    rhs: np.ndarray,
    intervals: Sequence[SpectralInterval],
    path: str | Path,
    title: str = "",
) -> Path:
    """Right-hand side of the dispersion relation against ``lambda`` with gaps shaded."""
    path = Path(path)
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=(6.0, 3.2))
        ax = fig.add_subplot()
        for iv in intervals:
            if iv.kind is IntervalKind.BAND_GAP:
                ax.axvspan(iv.lo, iv.hi, color=GAP_COLOR, zorder=0)
        clipped = np.clip(rhs, -6, 6)
        ax.plot(lams, clipped, color=BAND_COLOR, lw=1.0, gid="rhs")
        for y in (-2, 2):
            ax.axhline(y, color="k", ls="--", lw=0.6)
        ax.set_ylim(-6, 6)
        ax.set_xlim(lams[0], lams[-1])
        ax.set_xlabel(r"$\lambda = \omega^2$")
        ax.set_ylabel(r"$(-1)^n\,\mathrm{tr}\,\prod T_i$")
        _omega_axis(ax)
        if title:
            ax.set_title(title, fontsize=9, pad=22)
        fig.tight_layout()
        _save(fig, path)
    return path
