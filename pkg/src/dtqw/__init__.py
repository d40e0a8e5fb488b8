"""
Discrete-time quantum walks on a line: evolution, band structure, topology
(Dirac points, winding numbers, Zak phases), simulated SLM state
preparation, two-photon non-local coins and multiplexing resource estimates.
"""

from .core import (
    H,
    V,
    WalkerCoinState,
    apply_coin,
    fidelity,
    hadamard_coin,
    probability_distribution,
    rotation_axis,
    rotation_x,
    rotation_y,
    translate,
)
from .errors import (
    AliasingError,
    ChiralSymmetryError,
    ConvergenceError,
    DivisionDomainError,
    DomainError,
    DTQWError,
    EmptySuperpositionError,
    GaplessPointError,
    InvalidArgumentError,
    NumericalDomainError,
    ResolutionExceededError,
    ScheduleIncompleteError,
)
from .walk import (
    HADAMARD,
    CoinSequence,
    InitialCondition,
    NonCommuting,
    SplitStep,
    Standard,
    evolve,
    one_step_equivalence,
    prepare_step_state,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "H", "V", "WalkerCoinState", "apply_coin", "fidelity", "hadamard_coin",
    "probability_distribution", "rotation_axis", "rotation_x", "rotation_y", "translate",
    "AliasingError", "ChiralSymmetryError", "ConvergenceError", "DivisionDomainError",
    "DomainError", "DTQWError", "EmptySuperpositionError", "GaplessPointError",
    "InvalidArgumentError", "NumericalDomainError", "ResolutionExceededError",
    "ScheduleIncompleteError",
    "HADAMARD", "CoinSequence", "InitialCondition", "NonCommuting", "SplitStep", "Standard",
    "evolve", "one_step_equivalence", "prepare_step_state", "step",
]
