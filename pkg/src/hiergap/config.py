"""
JSON system descriptions.

A config names a list of elements through parallel parameter lists (scalars
broadcast to every element) plus the analysis settings::

    {
      "name": "modulated_pendulums",
      "kind": "pendulum",
      "masses": [1.2, 2, 1, 2.2, 1.2],
      "kappa": 0.5,
      "resonances": [2, 0.5, 2, 0.5, 2],
      "range": [0, 6],
      "grid": 4096,
      "tol": 1e-9,
      "samples": 256,
      "seed": 20240229,
      "fibonacci": {"a": 0, "b": 1, "depth": 10}
    }

``kind`` is ``mass_spring``, ``pendulum`` or ``resonant`` (or a list of
them). Resonators take ``outer_mass`` and ``inner_mass`` and ignore
``masses``. An optional ``cell`` list of element indices builds the unit cell
(repeats allowed); by default the cell is the element list in order.
Any ``notes`` entry is carried through untouched.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .intervals import check_range
from .models import ElementKind, ElementModel, UnitCell, fibonacci_cell
from .spectrum import DEFAULT_GRID, DEFAULT_TOL

DEFAULT_SEED = 20240229
MAX_FIBONACCI_DEPTH = 20

_LIST_KEYS = {
    "kind": "kind",
    "masses": "mass",
    "kappa": "kappa",
    "resonances": "resonance",
    "outer_mass": "outer_mass",
    "inner_mass": "inner_mass",
    "labels": "label",
}
_KNOWN = set(_LIST_KEYS) | {
    "name", "range", "grid", "tol", "samples", "seed", "fibonacci", "cell", "notes",
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FibonacciSpec:
    a: int
    b: int
    depth: int


@dataclass(frozen=True)
class SystemConfig:
    name: str
    elements: tuple[ElementModel, ...]
    cell_order: tuple[int, ...]
    range: tuple[float, float]
    grid: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL
    samples: int = 256
    seed: int = DEFAULT_SEED
    fibonacci: FibonacciSpec | None = None
    notes: Any = field(default=None, compare=False)

    @property
    def cell(self) -> UnitCell:
        return UnitCell(tuple(self.elements[i] for i in self.cell_order), self.name)

    def fibonacci_cells(self) -> list[UnitCell]:
        if self.fibonacci is None:
            raise ConfigError("config has no 'fibonacci' block")
        a, b = self.elements[self.fibonacci.a], self.elements[self.fibonacci.b]
        return [fibonacci_cell(a, b, d) for d in range(1, self.fibonacci.depth + 1)]


def _broadcast(raw: dict) -> list[dict]:
    lengths = {k: len(v) for k, v in raw.items() if k in _LIST_KEYS and isinstance(v, list)}
    if not lengths:
        raise ConfigError("no per-element parameter lists (e.g. 'masses' or 'resonances')")
    sizes = set(lengths.values())
    if len(sizes) != 1:
        detail = ", ".join(f"{k}={n}" for k, n in sorted(lengths.items()))
        raise ConfigError(f"parameter list lengths disagree: {detail}")
    n = sizes.pop()
    if n == 0:
        raise ConfigError("parameter lists are empty")
    rows = [dict() for _ in range(n)]
    for key, attr in _LIST_KEYS.items():
        if key not in raw:
            continue
        vals = raw[key] if isinstance(raw[key], list) else [raw[key]] * n
        for row, v in zip(rows, vals):
            row[attr] = v
    return rows


def _element(i: int, row: dict) -> ElementModel:
    try:
        kind = ElementKind(row.get("kind", ""))
    except ValueError:
        raise ConfigError(f"element {i}: unknown kind {row.get('kind')!r}") from None
    need = {
        ElementKind.MASS_SPRING: ("mass", "kappa"),
        ElementKind.PENDULUM: ("mass", "kappa", "resonance"),
        ElementKind.RESONANT: ("outer_mass", "inner_mass", "resonance", "kappa"),
    }[kind]
    missing = [k for k in need if row.get(k) is None]
    if missing:
        raise ConfigError(f"element {i} ({kind.value}): missing {', '.join(missing)}")
    label = str(row.get("label") or f"{kind.value}_{i + 1}")
    try:
        if kind is ElementKind.RESONANT:
            return ElementModel(
                kind,
                row["outer_mass"],
                row["kappa"],
                row["resonance"],
                outer_mass=row["outer_mass"],
                inner_mass=row["inner_mass"],
                label=label,
            )
        return ElementModel(
            kind, row["mass"], row["kappa"], row.get("resonance", 0.0), label=label
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"element {i}: {exc}") from None


def parse_config(raw: dict, name: str = "system") -> SystemConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(raw) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "range" not in raw:
        raise ConfigError("missing 'range'")
    elements = tuple(_element(i, row) for i, row in enumerate(_broadcast(raw)))
    try:
        rng = check_range(raw["range"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad range: {exc}") from None

    order = raw.get("cell", list(range(len(elements))))
    if not order or any(not isinstance(i, int) or not 0 <= i < len(elements) for i in order):
        raise ConfigError("'cell' must be a non-empty list of element indices")

    fib = None
    if raw.get("fibonacci") is not None:
        f = raw["fibonacci"]
        try:
            fib = FibonacciSpec(int(f.get("a", 0)), int(f.get("b", 1)), int(f["depth"]))
        except (KeyError, TypeError, ValueError, AttributeError):
            raise ConfigError("'fibonacci' needs integer 'a', 'b' and 'depth'") from None
        if not (0 <= fib.a < len(elements) and 0 <= fib.b < len(elements)):
            raise ConfigError("fibonacci 'a'/'b' must index elements")
        _check_depth(fib.depth)

    try:
        cfg = SystemConfig(
            name=str(raw.get("name", name)),
            elements=elements,
            cell_order=tuple(order),
            range=rng,
            grid=int(raw.get("grid", DEFAULT_GRID)),
            tol=float(raw.get("tol", DEFAULT_TOL)),
            samples=int(raw.get("samples", 256)),
            seed=int(raw.get("seed", DEFAULT_SEED)),
            fibonacci=fib,
            notes=raw.get("notes"),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    validate_settings(cfg)
    return cfg


def _check_depth(depth: int) -> None:
    if not 1 <= depth <= MAX_FIBONACCI_DEPTH:
        raise ConfigError(f"fibonacci depth must be in 1..{MAX_FIBONACCI_DEPTH}, got {depth}")


def validate_settings(cfg: SystemConfig) -> None:
    if cfg.grid < 2:
        raise ConfigError(f"grid must be >= 2, got {cfg.grid}")
    if not cfg.tol > 0:
        raise ConfigError(f"tol must be positive, got {cfg.tol}")
    if cfg.samples < 1:
        raise ConfigError(f"samples must be >= 1, got {cfg.samples}")
    if cfg.fibonacci is not None:
        _check_depth(cfg.fibonacci.depth)


def bundled_configs() -> list[str]:
    root = resources.files("hiergap") / "configs"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_config(path_or_name: str | Path) -> SystemConfig:
    """Load a config file, or a bundled config by name (e.g. ``mass_spring``)."""
    path = Path(path_or_name)
    if path.exists():
        text = path.read_text()
        stem = path.stem
    else:
        res = resources.files("hiergap") / "configs" / f"{path_or_name}.json"
        if not res.is_file():
            raise ConfigError(
                f"no such config file or bundled config: {path_or_name} "
                f"(bundled: {', '.join(bundled_configs())})"
            )
        text = res.read_text()
        stem = str(path_or_name)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path_or_name}: invalid JSON ({exc})") from None
    return parse_config(raw, stem)
