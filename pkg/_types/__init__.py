# Types package for the Maslov index toolkit

# Configuration types
from .config_types import PotentialConfig, NumericsConfig, RunConfig

# Data models
from .data_models import (
    SymplecticSpace, LagrangianFrame, IntersectionBasis,
    Potential, RealifiedSystem, Monodromy, Segment, PathSpec,
    STANDARD, DOUBLED, LAMBDA, THETA, SCALE, BOUNDARY_ROLE, SOLUTION_ROLE
)

# Result types
from .result_types import (
    FormResult, CrossingRecord, MaslovResult, SpectrumResult,
    EigencurvePoint, CheckReport,
    INTERIOR, START, END, CROSSING_FORM, SPECTRAL_FLOW,
    FINITE_DIFFERENCE, MONODROMY_ROOTS
)

# Errors
from .errors import (
    MaslovError, SymplecticError, NonLagrangianError, BorderlineRankError,
    PotentialError, PropagationError, PathError, CrossingError,
    BackendMismatchError, OracleError, GuardBandError, BranchError,
    ScenarioRejected
)

__all__ = [
    # Configuration types
    "PotentialConfig", "NumericsConfig", "RunConfig",

    # Data models
    "SymplecticSpace", "LagrangianFrame", "IntersectionBasis",
    "Potential", "RealifiedSystem", "Monodromy", "Segment", "PathSpec",
    "STANDARD", "DOUBLED", "LAMBDA", "THETA", "SCALE", "BOUNDARY_ROLE", "SOLUTION_ROLE",

    # Result types
    "FormResult", "CrossingRecord", "MaslovResult", "SpectrumResult",
    "EigencurvePoint", "CheckReport",
    "INTERIOR", "START", "END", "CROSSING_FORM", "SPECTRAL_FLOW",
    "FINITE_DIFFERENCE", "MONODROMY_ROOTS",

    # Errors
    "MaslovError", "SymplecticError", "NonLagrangianError", "BorderlineRankError",
    "PotentialError", "PropagationError", "PathError", "CrossingError",
    "BackendMismatchError", "OracleError", "GuardBandError", "BranchError",
    "ScenarioRejected"
]
