"""Command-line front end.

Exit codes: 0 success, 1 usage/config/I-O error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
import warnings
from pathlib import Path

import numpy as np

from . import checks, figures, tables
from .config import ConfigError, SystemConfig, bundled_configs, load_config, validate_settings
from .models import DegenerateElementWarning, element_gap_set, fibonacci_word
from .spectrum import hierarchical_gaps, rhs_array, scan_spectrum, verify_containment

EXIT_OK, EXIT_ERROR, EXIT_VERIFY = 0, 1, 2


class VerificationFailure(RuntimeError):
    pass


def _load(args) -> SystemConfig:
    cfg = load_config(args.config)
    overrides = {k: getattr(args, k) for k in ("grid", "tol", "seed") if getattr(args, k) is not None}
    if overrides:
        cfg = dataclasses.replace(cfg, **overrides)
        validate_settings(cfg)
    return cfg


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _print_intervals(title: str, intervals) -> None:
    print(title)
    if not intervals:
        print("  (none)")
    for iv in intervals:
        print(f"  {iv.kind.value:17s} {iv.lo:14.9g} {iv.hi:14.9g}")


def cmd_bands(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    cell = cfg.cell
    res = scan_spectrum(cell, cfg.range, cfg.grid, cfg.tol)
    lams = np.linspace(*cfg.range, cfg.grid)
    stem = cfg.name
    tables.write_bands(out / f"{stem}_bands.csv", cell, lams)
    tables.write_intervals(out / f"{stem}_intervals.csv", res.intervals)
    if args.svg:
        keep = np.ones(lams.shape, bool)
        for p in cell.poles():
            keep &= np.abs(lams - p) > 2e-9
        with tables.atomic_path(out / f"{stem}_bands.svg") as tmp:
            figures.dispersion_figure(
                lams[keep], rhs_array(cell, lams[keep]), res.intervals, tmp, title=stem
            )
    _print_intervals(f"{stem}: {len(cell)}-site cell", res.intervals)
    return EXIT_OK


def cmd_gaps(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    res = scan_spectrum(cfg.cell, cfg.range, cfg.grid, cfg.tol)
    tables.write_intervals(out / f"{cfg.name}_intervals.csv", res.intervals)
    _print_intervals(f"{cfg.name}: {len(cfg.cell)}-site cell", res.intervals)
    return EXIT_OK


def cmd_hierarchical(args) -> int:
    cfg = _load(args)
    out = _outdir(args)
    stem = cfg.name
    cell = cfg.cell
    elements = list(cfg.elements)
    tracks = []
    for i, e in enumerate(elements, 1):
        gaps = element_gap_set(e, cfg.range)
        tables.write_intervals(out / f"{stem}_element_{i}_gaps.csv", gaps)
        tracks.append((e.name, gaps))
    report = verify_containment(cell, cfg.range, cfg.samples, elements, cfg.grid, cfg.tol)
    tables.write_intervals(out / f"{stem}_hierarchical.csv", report.predicted)
    tables.write_intervals(
        out / f"{stem}_combined_intervals.csv",
        scan_spectrum(cell, cfg.range, cfg.grid, cfg.tol).intervals,
    )
    tables.write_text(out / f"{stem}_report.txt", report.summary())
    tracks.append((f"combined (n={len(cell)})", list(report.combined_gaps)))
    if args.svg:
        with tables.atomic_path(out / f"{stem}_hierarchical.svg") as tmp:
            figures.band_diagram(tracks, report.predicted, cfg.range, tmp, title=stem)
    _print_intervals(f"{stem}: hierarchical gaps", report.predicted)
    print(f"containment_verified: {str(report.containment_verified).lower()} "
          f"({report.samples_checked} samples)")
    if not report.containment_verified:
        raise VerificationFailure(f"{stem}: predicted gap not a gap of the combined cell")
    return EXIT_OK


def cmd_fibonacci(args) -> int:
    cfg = _load(args)
    if cfg.fibonacci is None:
        raise ConfigError("config has no 'fibonacci' block")
    out = _outdir(args)
    stem = cfg.name
    a, b = cfg.elements[cfg.fibonacci.a], cfg.elements[cfg.fibonacci.b]
    predicted = hierarchical_gaps([a, b], cfg.range)
    tables.write_intervals(out / f"{stem}_hierarchical.csv", predicted)
    tracks, lines, failed = [], [], []
    for depth, cell in enumerate(cfg.fibonacci_cells(), 1):
        rep = verify_containment(cell, cfg.range, cfg.samples, [a, b], cfg.grid, cfg.tol)
        res = scan_spectrum(cell, cfg.range, cfg.grid, cfg.tol)
        tables.write_intervals(out / f"{stem}_F{depth}_intervals.csv", res.intervals)
        tracks.append((f"F{depth} (n={len(cell)})", res.gaps))
        word = fibonacci_word(depth) if len(cell) <= 64 else "..."
        lines.append(
            f"F{depth} n={len(cell)} gaps={len(res.gaps)} word={word} "
            f"containment_verified={str(rep.containment_verified).lower()}"
        )
        if not rep.containment_verified:
            failed.append(depth)
    text = "\n".join(lines) + "\n"
    tables.write_text(out / f"{stem}_report.txt", text)
    if args.svg:
        with tables.atomic_path(out / f"{stem}_fibonacci.svg") as tmp:
            figures.band_diagram(tracks, predicted, cfg.range, tmp, title=stem)
    _print_intervals(f"{stem}: hierarchical gaps from {{A, B}}", predicted)
    print(text, end="")
    if failed:
        raise VerificationFailure(f"containment failed at depths {failed}")
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _load(args)
    lines = []
    ok = True
    cells = [(cfg.cell, None)]
    if cfg.fibonacci is not None:
        pair = [cfg.elements[cfg.fibonacci.a], cfg.elements[cfg.fibonacci.b]]
        cells += [(c, pair) for c in cfg.fibonacci_cells()]
    for cell, constituents in cells:
        rep = verify_containment(cell, cfg.range, cfg.samples, constituents, cfg.grid, cfg.tol)
        ok &= rep.containment_verified
        status = "PASS" if rep.containment_verified else "FAIL"
        lines.append(
            f"{status} containment[{cell.name}]: {rep.samples_checked} samples in "
            f"{len(rep.predicted)} predicted intervals"
        )
    for res in checks.property_suite(cfg.seed, args.trials):
        ok &= res.passed
        lines.append(res.line())
    text = "\n".join(lines) + "\n"
    print(text, end="")
    if args.out is not None:
        tables.write_text(_outdir(args) / f"{cfg.name}_verify.txt", text)
    if not ok:
        raise VerificationFailure("verification failed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        required=True,
        help=f"JSON config path or bundled name ({', '.join(bundled_configs())})",
    )
    common.add_argument("--out", default="results", help="output directory (default: results)")
    common.add_argument("--grid", type=int, help="grid points over the range")
    common.add_argument("--tol", type=float, help="band-edge bisection tolerance in lambda")
    common.add_argument("--seed", type=int, help="seed for randomized verification")
    common.add_argument(
        "--svg", action=argparse.BooleanOptionalAction, default=True, help="write SVG figures"
    )
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="hiergap",
        description="Band gaps of 1D periodic lattices and common gaps of their elements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
        ("bands", cmd_bands, "grid table of the dispersion relation plus the interval table"),
        ("gaps", cmd_gaps, "interval table only"),
        ("hierarchical", cmd_hierarchical, "element gaps, their intersection and a check"),
        ("fibonacci", cmd_fibonacci, "spectra of Fibonacci cells built from two elements"),
        ("verify", cmd_verify, "containment and transfer-matrix property checks"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        if name == "verify":
            p.set_defaults(out=None)
            p.add_argument("--trials", type=int, default=2000, help="random trials per property")
    return parser


def _log_warnings(caught) -> None:
    # the same element can warn from several code paths; report it once
    seen = set()
    for w in caught:
        key = (w.category, str(w.message))
        if key not in seen:
            seen.add(key)
            logging.getLogger("hiergap").warning("%s: %s", w.category.__name__, w.message)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateElementWarning)
            try:
                return args.func(args)
            finally:
                _log_warnings(caught)
    except VerificationFailure as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def run() -> None:
    sys.exit(main())
