from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np


STANDARD = "standard"
DOUBLED = "doubled"


@dataclass(frozen=True, eq=False)
class SymplecticSpace:
    """Represents (R^{2m}, omega) with omega(p, q) = p^T Omega q"""
    half_dim: int
    omega_matrix: np.ndarray
    kind: str = STANDARD

    @property
    def dim(self) -> int:
        return 2 * self.half_dim


@dataclass(frozen=True, eq=False)
class LagrangianFrame:
    """Represents a Lagrangian plane by an orthonormal 2m x m frame"""
    space: SymplecticSpace
    columns: np.ndarray

    @property
    def projection(self) -> np.ndarray:
        return self.columns @ self.columns.T


@dataclass(frozen=True, eq=False)
class IntersectionBasis:
    """Represents an orthonormal basis of the intersection of two planes"""
    vectors: np.ndarray
    dim_real: int
    singular_values: Optional[np.ndarray] = None


@dataclass(frozen=True, eq=False)
class Potential:
    """Represents a symmetric matrix potential V on [a, b].

    ``values`` maps an array of points (k,) to an array of matrices (k, n, n);
    ``derivative`` does the same for V' when the preset provides it.
    """
    n: int
    interval: Tuple[float, float]
    kind: str
    values: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    v_max: float = 0.0
    params: Dict[str, object] = field(default_factory=dict)

    @property
    def differentiable(self) -> bool:
        return self.derivative is not None

    @property
    def floor(self) -> float:
        """Lower bound for every spectrum built from this potential"""
        return -self.v_max

    @property
    def is_symmetric_interval(self) -> bool:
        a, b = self.interval
        return abs(a + b) <= 1e-12 * max(1.0, abs(b))

    def __call__(self, x) -> np.ndarray:
        return self.values(np.atleast_1d(np.asarray(x, dtype=float)))


@dataclass(frozen=True, eq=False)
class RealifiedSystem:
    """Represents z' = A(x) z for z = (y, y') with y real of length 2n.

    A(x) = [[0, I], [t^2 (V(t x) (x) I_2) - t^2 lambda I, 0]] on the
    rescaled interval; t = 1 is the unscaled problem on [a, b].
    """
    potential: Potential
    lam: float
    t: float = 1.0

    @property
    def interval(self) -> Tuple[float, float]:
        return self.potential.interval

    def coefficient(self, x: np.ndarray) -> np.ndarray:
        """Lower-left block W(x) of A(x), shape (k, 2n, 2n)"""
        t = self.t
        v = self.potential(t * np.atleast_1d(x))
        eye = np.eye(self.potential.n)
        w = t * t * (v - self.lam * eye)
        return np.kron(w, np.eye(2))


@dataclass(frozen=True, eq=False)
class Monodromy:
    """Represents the complex propagator T(lambda) of (u, u') over the interval"""
    lam: float
    matrix: np.ndarray
    t: float = 1.0

    @property
    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix))

    def kernel_dimension(self, theta: float, tol: float = 1e-6) -> int:
        """dim ker(T - e^{i theta} I) with a relative singular-value threshold"""
        shifted = self.matrix - np.exp(1j * theta) * np.eye(self.matrix.shape[0])
        s = np.linalg.svd(shifted, compute_uv=False)
        return int(np.sum(s <= tol * max(1.0, s[0])))


LAMBDA = "lambda"
THETA = "theta"
SCALE = "t"

BOUNDARY_ROLE = "boundary"
SOLUTION_ROLE = "solution"


@dataclass(frozen=True)
class Segment:
    """Represents one side of a parameter rectangle.

    The varying parameter runs from ``start`` to ``end``; ``frozen`` holds the
    other two of (lambda, theta, t).
    """
    label: str
    variable: str
    start: float
    end: float
    frozen: Dict[str, float]
    plane_role: str
    floor: bool = False

    @property
    def orientation(self) -> int:
        return 1 if self.end >= self.start else -1

    @property
    def length(self) -> float:
        return abs(self.end - self.start)

    def point(self, value: float) -> Dict[str, float]:
        params = dict(self.frozen)
        params[self.variable] = float(value)
        return params

    def values(self, cells: int) -> np.ndarray:
        return np.linspace(self.start, self.end, cells + 1)


@dataclass(frozen=True)
class PathSpec:
    """Represents a piecewise path in (lambda, theta, t) space"""
    segments: List[Segment]
    closed: bool = True

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)
