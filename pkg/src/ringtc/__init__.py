"""Measurement-induced time-crystal dynamics of attractive bosons on a ring.

Exact many-body eigenstates in momentum-sector Fock bases, projective
position measurements, Krylov/eigenbasis time propagation, and mean-field /
central-limit cross-checks, with a CLI (`ringtc`) for reproducible runs.
"""

__version__ = "0.1.0"

from .fock import (
    FockOccupation,
    ModeWindow,
    SectorBasis,
    enumerate_sector,
    sector_dimension,
    sector_span_after_annihilation,
)
from .meanfield import (
    CltPrediction,
    GpeProfile,
    circular_variance,
    clt_deformation_time,
    gpe_ground,
)
from .measurement import (
    MeasurementNodeError,
    MeasurementRecord,
    collapse_once,
    correlation_evolution,
    sample_position,
    sequential_measure,
)
from .observables import (
    ContrastTrack,
    CorrelationSeries,
    DeformationResult,
    PeakTrack,
    cm_width_proxy,
    condensate_fraction,
    contrast,
    contrast_track,
    deformation_track,
    lifetime,
    peak_track,
)
from .operators import (
    BudgetExceededError,
    EmptyStateError,
    ManyBodyState,
    ModelParams,
    OneBodyDensityMatrix,
    apply_boost,
    apply_field_annihilation,
    apply_hamiltonian,
    assemble_sparse,
    density_from_obdm,
    energy_expectation,
    obdm,
)
from .spectral import (
    EigenResult,
    PropagatorConfig,
    evolve,
    evolve_trajectory,
    ground_of_sector,
    spectrum_of_sector,
)

__all__ = [
    "__version__",
    "FockOccupation", "ModeWindow", "SectorBasis", "enumerate_sector",
    "sector_dimension", "sector_span_after_annihilation",
    "CltPrediction", "GpeProfile", "circular_variance",
    "clt_deformation_time", "gpe_ground",
    "MeasurementNodeError", "MeasurementRecord", "collapse_once",
    "correlation_evolution", "sample_position", "sequential_measure",
    "ContrastTrack", "CorrelationSeries", "DeformationResult", "PeakTrack",
    "cm_width_proxy", "condensate_fraction", "contrast", "contrast_track",
    "deformation_track", "lifetime", "peak_track",
    "BudgetExceededError", "EmptyStateError", "ManyBodyState", "ModelParams",
    "OneBodyDensityMatrix", "apply_boost", "apply_field_annihilation",
    "apply_hamiltonian", "assemble_sparse", "density_from_obdm",
    "energy_expectation", "obdm",
    "EigenResult", "PropagatorConfig", "evolve", "evolve_trajectory",
    "ground_of_sector", "spectrum_of_sector",
]
