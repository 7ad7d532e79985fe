import math
import os
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator


PresetName = Literal["free", "constant", "diagonal_cosine", "mathieu", "grid"]


def _check_symmetric(matrix: Optional[List[List[float]]], n: int, name: str):
    if matrix is None:
        return
    if len(matrix) != n or any(len(row) != n for row in matrix):
        raise ValueError(f"{name} must be {n}x{n}")
    for i in range(n):
        for j in range(i + 1, n):
            if abs(matrix[i][j] - matrix[j][i]) > 1e-12:
                raise ValueError(f"{name} must be symmetric")


class PotentialConfig(BaseModel):
    """Potential preset configuration"""
    preset: PresetName = Field(default="free", description="Potential preset name")
    n: int = Field(default=1, ge=1, description="Number of channels")
    interval: Tuple[float, float] = Field(default=(0.0, 2.0 * math.pi), description="Interval [a, b]")
    matrix: Optional[List[List[float]]] = Field(default=None, description="Constant potential matrix")
    amplitudes: Optional[List[float]] = Field(default=None, description="Cosine amplitudes, one per channel")
    frequencies: Optional[List[float]] = Field(default=None, description="Cosine frequencies, one per channel")
    offset: Optional[List[List[float]]] = Field(default=None, description="Constant symmetric offset added to cosine presets")
    coupling: Optional[List[List[float]]] = Field(default=None, description="Symmetric coupling matrix multiplying cos(coupling_frequency x)")
    coupling_frequency: float = Field(default=1.0, description="Frequency of the coupling term")
    amplitude: float = Field(default=2.0, description="Mathieu amplitude, V = amplitude cos(x) I_n")
    grid_path: Optional[str] = Field(default=None, description="CSV file with columns x, v_11, v_12, ..., v_nn")

    @field_validator("interval")
    @classmethod
    def _interval_nondegenerate(cls, value):
        a, b = value
        if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
            raise ValueError("interval must satisfy a < b with finite endpoints")
        return value

    @model_validator(mode="after")
    def _preset_complete(self):
        if self.preset == "constant":
            if self.matrix is None:
                raise ValueError("constant preset requires 'matrix'")
            _check_symmetric(self.matrix, self.n, "matrix")
        elif self.preset == "diagonal_cosine":
            if self.amplitudes is None or self.frequencies is None:
                raise ValueError("diagonal_cosine preset requires 'amplitudes' and 'frequencies'")
            if len(self.amplitudes) != self.n or len(self.frequencies) != self.n:
                raise ValueError("amplitudes and frequencies need one entry per channel")
            _check_symmetric(self.offset, self.n, "offset")
            _check_symmetric(self.coupling, self.n, "coupling")
        elif self.preset == "grid":
            if not self.grid_path:
                raise ValueError("grid preset requires 'grid_path'")
        return self


class NumericsConfig(BaseModel):
    """Tolerances and resolutions"""
    integrator_tol: float = Field(default=1e-10, gt=0, lt=1e-2, description="Propagator tolerance")
    rank_tol: float = Field(default=1e-9, gt=0, description="Relative nullity threshold for plane intersections")
    crossing_rank_tol: float = Field(default=1e-6, gt=0, description="Relative nullity threshold at localized crossings")
    form_agreement_tol: float = Field(default=1e-6, gt=0, description="Allowed relative gap between the boundary and integral t-forms")
    fd_grid: int = Field(default=2000, ge=64, description="Finite-difference grid size K")
    scan_cells: int = Field(default=200, ge=4, description="Initial cells per segment for the crossing scan")
    localize_tol: float = Field(default=1e-10, gt=0, description="Parameter accuracy of crossing localization")
    guard_band: float = Field(default=1e-7, gt=0, description="Counting levels closer than this to an eigenvalue are rejected")
    floquet_scan_step: float = Field(default=0.01, gt=0, description="Lambda step of the monodromy root scan")
    phase_tol: float = Field(default=1e-7, gt=0, description="Eigenphases this close to pi count as sitting on -1")
    spectral_flow_cells: int = Field(default=32, ge=2, description="Initial partition of the spectral-flow backend")
    max_refinements: int = Field(default=8, ge=0, description="Refinement cap for scans and partitions")


class RunConfig(BaseModel):
    """Main run configuration"""
    potential: PotentialConfig = Field(default_factory=PotentialConfig, description="Potential configuration")
    numerics: NumericsConfig = Field(default_factory=NumericsConfig, description="Numerical configuration")
    seed: int = Field(default=0, description="Seed for randomized scenarios")
    threads: int = Field(
        default_factory=lambda: int(os.getenv("MASLOV_THREADS", "1")),
        ge=1,
        description="Worker cap for parallel scans",
    )
