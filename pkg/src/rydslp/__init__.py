"""Stationary Rydberg polaritons in a dual-V level scheme.

Eigenanalysis of the effective non-Hermitian Hamiltonian (dark state,
dispersion, composition) and steady-state probe scattering through a slab
containing a Rydberg impurity.
"""

from .errors import SimulationError
from .params import RB87, ModelParams, canonical, load_params, to_dimensionless, validate
from .scattering import (
    Impurity,
    InteractionModel,
    MediumSpec,
    ScatterResult,
    scan_quantum_number,
    scan_ratio,
    scatter,
)
from .spectrum import (
    analytic_dispersion,
    build_heff,
    dark_state,
    dispersion_scan,
    dressed_dark_state,
    eigensystem,
    intermediate_population,
)

__version__ = "0.1.0"

__all__ = [
    "RB87", "Impurity", "InteractionModel", "MediumSpec", "ModelParams", "ScatterResult",
    "SimulationError", "analytic_dispersion", "build_heff", "canonical", "dark_state",
    "dispersion_scan", "dressed_dark_state", "eigensystem", "intermediate_population",
    "load_params", "scan_quantum_number", "scan_ratio", "scatter", "to_dimensionless", "validate",
]
