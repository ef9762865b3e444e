"""Two-step entanglement purification of doubly entangled photon states."""
from .qstate import (
    DensityOperator,
    DepsClass,
    PureState,
    Sector,
    SectorError,
    bell_state,
    fidelity,
    make_basis_state,
    mix,
    werner_state,
)
from .protocol import (
    compare_schemes,
    fidelity_recursion,
    iterate,
    sector_recursion,
    step1_correct,
    step2_purify,
    xiao_step1_baseline,
)

__version__ = "0.1.0"

__all__ = [
    "DensityOperator",
    "DepsClass",
    "PureState",
    "Sector",
    "SectorError",
    "bell_state",
    "compare_schemes",
    "fidelity",
    "fidelity_recursion",
    "iterate",
    "make_basis_state",
    "mix",
    "sector_recursion",
    "step1_correct",
    "step2_purify",
    "werner_state",
    "xiao_step1_baseline",
]
