"""Band gaps of one-dimensional periodic lattices via 2x2 transfer matrices,
and the gaps a complex unit cell inherits from its constituent elements."""

from .intervals import IntervalKind, SpectralInterval
from .models import (
    DegenerateElementWarning,
    ElementKind,
    ElementModel,
    PoleProximityError,
    UnitCell,
    coefficient,
    element_gap_set,
    fibonacci_cell,
    fibonacci_word,
    mass_spring,
    pendulum,
    pendulum_thresholds,
    resonant,
)
from .sl2 import (
    TraceVerdict,
    TransferMatrix,
    lemma_entry_check,
    non_closure_counterexample,
    pendulum_matrix,
    power_t2,
    power_tm2,
    product,
    t_matrix,
    theorem_margin,
)
from .spectrum import (
    Classification,
    HierarchicalReport,
    OutOfBandError,
    SpectrumResult,
    attenuation_rate,
    bloch_wavenumber,
    classify,
    dispersion_rhs,
    edge_count,
    hierarchical_gaps,
    scan_spectrum,
    verify_containment,
)

__version__ = "0.1.0"

__all__ = [
    "IntervalKind",
    "SpectralInterval",
    "Classification",
    "DegenerateElementWarning",
    "ElementKind",
    "ElementModel",
    "HierarchicalReport",
    "OutOfBandError",
    "PoleProximityError",
    "SpectrumResult",
    "TraceVerdict",
    "TransferMatrix",
    "UnitCell",
    "attenuation_rate",
    "bloch_wavenumber",
    "classify",
    "coefficient",
    "dispersion_rhs",
    "edge_count",
    "element_gap_set",
    "fibonacci_cell",
    "fibonacci_word",
    "hierarchical_gaps",
    "lemma_entry_check",
    "mass_spring",
    "non_closure_counterexample",
    "pendulum",
    "pendulum_matrix",
    "pendulum_thresholds",
    "power_t2",
    "power_tm2",
    "product",
    "resonant",
    "scan_spectrum",
    "t_matrix",
    "theorem_margin",
    "verify_containment",
]
