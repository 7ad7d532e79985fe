from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .data_models import IntersectionBasis


INTERIOR = "interior"
START = "start"
END = "end"

CROSSING_FORM = "crossing_form"
SPECTRAL_FLOW = "spectral_flow"

FINITE_DIFFERENCE = "finite_difference"
MONODROMY_ROOTS = "monodromy_roots"


@dataclass
class FormResult:
    """Crossing form on an intersection basis"""
    matrix: np.ndarray
    signature: Tuple[int, int, int]
    boundary_matrix: Optional[np.ndarray] = None

    @property
    def boundary_mismatch(self) -> Optional[float]:
        if self.boundary_matrix is None:
            return None
        scale = max(1.0, float(np.max(np.abs(self.matrix))))
        return float(np.max(np.abs(self.matrix - self.boundary_matrix)) / scale)


@dataclass
class CrossingRecord:
    """Represents a located conjugate point on a path segment"""
    s_star: float
    segment_id: int
    point: Dict[str, float]
    dim_real: int
    basis: IntersectionBasis
    position: str = INTERIOR
    form_matrix: Optional[np.ndarray] = None
    signature: Optional[Tuple[int, int, int]] = None
    contribution: Optional[int] = None
    boundary_form_mismatch: Optional[float] = None

    @property
    def dim_complex(self) -> int:
        return self.dim_real // 2

    @property
    def regular(self) -> bool:
        return self.signature is not None and self.signature[1] == 0


@dataclass
class MaslovResult:
    """Maslov index of a segment or path.

    ``index`` is the index of the moving plane relative to the fixed one;
    ``doubled_index`` is the two-path index in omega (+) (-omega) against the
    diagonal, which is what adds up to zero around a closed rectangle.
    """
    index: int
    doubled_index: int
    method: str
    crossings: List[CrossingRecord] = field(default_factory=list)
    diagnostics: Dict[str, Any] = field(default_factory=dict)


@dataclass
class SpectrumResult:
    """Eigenvalues of H_theta(t) below a cutoff with complex multiplicities"""
    theta: float
    t: float
    eigenvalues: List[Tuple[float, int]]
    cutoff: float
    method: str

    @property
    def values(self) -> np.ndarray:
        """Eigenvalues repeated according to multiplicity"""
        out = [lam for lam, mult in self.eigenvalues for _ in range(mult)]
        return np.asarray(out, dtype=float)

    def count_below(self, level: float) -> int:
        return int(sum(mult for lam, mult in self.eigenvalues if lam < level))

    def nearest(self, level: float) -> Optional[float]:
        if not self.eigenvalues:
            return None
        lams = np.array([lam for lam, _ in self.eigenvalues])
        return float(lams[np.argmin(np.abs(lams - level))])


@dataclass
class EigencurvePoint:
    """A point on an eigenvalue branch with L2-normalized boundary data"""
    theta: float
    lambda_k: float
    u_a: np.ndarray
    du_a: np.ndarray
    simple: bool = True
    residual: float = 0.0
    t: float = 1.0
    branch: int = 0


@dataclass
class CheckReport:
    """Outcome of one verification scenario"""
    claim_id: str
    inputs: Dict[str, Any]
    lhs: float
    rhs: float
    passed: bool
    details: Dict[str, Any] = field(default_factory=dict)
    tolerance: Optional[float] = None
    rejected: bool = False
