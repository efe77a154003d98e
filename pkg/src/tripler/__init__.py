"""Period-tripled Floquet states of a driven quantum Duffing oscillator."""
from .errors import ConfigError, ConvergenceError, ModelValidityError, TriplerError
from .params import (LabParams, ScaledParams, from_scaled, lab_for_detuning_ratio,
                     lab_from_dimensionless, load_params, to_scaled)
from .rwa import find_crossings, lowest_triplet, scan_f, symmetry_blocks
from .wkb import crossing_locations, geometry, tunnel_quantities
from .floquet import build_lab_hamiltonian, monodromy_vs_rwa, propagate_period
from .dissipation import (DensityMatrix, evolve, hopping_model, steady_state,
                          three_state_kinetics, well_states)
from .observables import expect_q, period3_score, sideband_frequencies, spectrum

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "ConvergenceError", "ModelValidityError", "TriplerError",
    "LabParams", "ScaledParams", "from_scaled", "lab_for_detuning_ratio",
    "lab_from_dimensionless", "load_params", "to_scaled",
    "find_crossings", "lowest_triplet", "scan_f", "symmetry_blocks",
    "crossing_locations", "geometry", "tunnel_quantities",
    "build_lab_hamiltonian", "monodromy_vs_rwa", "propagate_period",
    "DensityMatrix", "evolve", "hopping_model", "steady_state", "three_state_kinetics",
    "well_states", "expect_q", "period3_score", "sideband_frequencies", "spectrum",
]
