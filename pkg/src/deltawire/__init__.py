"""Two-electron scattering off a double delta barrier in a two-channel wire.

The library builds flux-normalized scattering matrices for pairs of delta
scatterers (with optional channel mixing), post-selects the two-sided
coincidence amplitudes, and reports the resulting concurrence, reduced
density matrix, and the resonance structure that controls where the
entanglement vanishes.  Internally d = 1 and wavenumbers are plain inverse
lengths; every user-facing surface (CLI, resonance tables) speaks 2*pi/d
units instead.
"""

__version__ = "0.1.0"

from .chanmath import ChannelSetup, from_cycles, to_cycles
from .entangle import (
    EntanglementReport,
    GammaState,
    concurrence_closed,
    concurrence_det,
    concurrence_from_w,
    entanglement_report,
    gamma_of,
    postselect_probability,
    probability_budget,
    reduced_density,
    w_full,
    w_postselected,
)
from .oracle import (
    OracleConfig,
    OracleNotConverged,
    fd_scatter,
    fd_scatter_extrapolated,
)
from .resonance import (
    ResonanceEntry,
    ResonanceTable,
    ZeroAlignmentReport,
    ZeroMatch,
    find_resonances,
    golden_section_min,
    scan_transmission,
    transmission,
    zero_alignment,
)
from .scattering import (
    DeltaChain,
    ScattererS,
    compose,
    delta_amplitudes,
    delta_smatrix,
    double_delta_closed_form,
    double_delta_smatrix,
    free_segment,
    unitarity_defect,
)

__all__ = [
    "__version__",
    "ChannelSetup",
    "from_cycles",
    "to_cycles",
    "DeltaChain",
    "ScattererS",
    "delta_amplitudes",
    "delta_smatrix",
    "free_segment",
    "compose",
    "double_delta_closed_form",
    "double_delta_smatrix",
    "unitarity_defect",
    "GammaState",
    "gamma_of",
    "postselect_probability",
    "probability_budget",
    "concurrence_closed",
    "concurrence_det",
    "concurrence_from_w",
    "w_postselected",
    "w_full",
    "reduced_density",
    "EntanglementReport",
    "entanglement_report",
    "transmission",
    "scan_transmission",
    "golden_section_min",
    "find_resonances",
    "ResonanceEntry",
    "ResonanceTable",
    "zero_alignment",
    "ZeroMatch",
    "ZeroAlignmentReport",
    "OracleConfig",
    "OracleNotConverged",
    "fd_scatter",
    "fd_scatter_extrapolated",
]
