"""
Schrodinger propagation

Fundamental solutions of -u'' + t^2 V(t x) u = t^2 lambda u on [a, b], the
realified 4n-dimensional system, monodromy matrices and the two Lagrangian
plane families: the theta-periodic boundary plane and the trace plane of
solutions.

The integrator is the commutator-free fourth-order Magnus method with two
Gauss nodes per step. Each factor has the form exp([[0, (h/2) I], [h M, 0]])
with M symmetric, so it is evaluated in closed form from the eigenpairs of M.
Since the potential acts channel-wise on real and imaginary parts, every
propagation runs on the real n-channel system and is realified afterwards.
"""

import logging
import math
import threading
from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import linalg as la

from _types.config_types import NumericsConfig
from _types.data_models import LagrangianFrame, Monodromy, Potential, RealifiedSystem
from _types.errors import PotentialError, PropagationError
from .symplectic import make_frame, make_standard_space

logger = logging.getLogger(__name__)

SQRT3 = math.sqrt(3.0)
NODES = (0.5 - SQRT3 / 6.0, 0.5 + SQRT3 / 6.0)
ALPHA1 = 0.25 - SQRT3 / 6.0
ALPHA2 = 0.25 + SQRT3 / 6.0

RENORM_EVERY = 16
MAX_STEPS = 2 ** 17
BUCKETS_PER_OCTAVE = 4


def _ceil_to(value: int, multiple: int) -> int:
    return int(multiple * math.ceil(value / multiple))


def _cosh_sqrt(kappa: np.ndarray) -> np.ndarray:
    """cosh(sqrt(kappa)), continued to cos(sqrt(-kappa)) for kappa < 0"""
    pos = np.sqrt(np.maximum(kappa, 0.0))
    neg = np.sqrt(np.maximum(-kappa, 0.0))
    return np.where(kappa >= 0.0, np.cosh(pos), np.cos(neg))


def _sinhc_sqrt(kappa: np.ndarray) -> np.ndarray:
    """sinh(sqrt(kappa)) / sqrt(kappa), continued to sin(r)/r with r = sqrt(-kappa)"""
    pos = np.sqrt(np.maximum(kappa, 0.0))
    neg = np.sqrt(np.maximum(-kappa, 0.0))
    safe = np.where(pos > 1e-8, pos, 1.0)
    sinhc = np.where(pos > 1e-8, np.sinh(safe) / safe, 1.0 + kappa / 6.0)
    return np.where(kappa >= 0.0, sinhc, np.sinc(neg / np.pi))


def tree_product(mats: np.ndarray) -> np.ndarray:
    """
    Ordered product M_{k-1} ... M_1 M_0 over axis -3.

    mats has shape (..., k, d, d); the reduction pairs neighbours so the work
    is batched across the leading axes.
    """
    while mats.shape[-3] > 1:
        k = mats.shape[-3]
        paired = mats[..., 1:k - k % 2:2, :, :] @ mats[..., 0:k - k % 2:2, :, :]
        if k % 2:
            paired = np.concatenate([paired, mats[..., k - 1:k, :, :]], axis=-3)
        mats = paired
    return mats[..., 0, :, :]


def realify_matrix(matrix: np.ndarray, n: int) -> np.ndarray:
    """
    Expand a real 2n x 2n channel-system matrix (acting on (u, u')) to the
    4n x 4n matrix acting on (y, y') with y = (Re u_1, Im u_1, ..., Re u_n, Im u_n).
    """
    blocks = matrix.reshape(2, n, 2, n)
    out = np.einsum("akbl,cd->akcbld", blocks, np.eye(2))
    return out.reshape(4 * n, 4 * n)


def to_channels(z: np.ndarray, n: int) -> np.ndarray:
    """Realified data (4n, k) to channel data (2n, 2k); column 2j is Re, 2j+1 is Im of column j."""
    k = z.shape[1]
    return z.reshape(2, n, 2, k).transpose(0, 1, 3, 2).reshape(2 * n, 2 * k)


def from_channels(w: np.ndarray, n: int) -> np.ndarray:
    """Inverse of to_channels for arrays (..., 2n, 2k)."""
    lead = w.shape[:-2]
    k = w.shape[-1] // 2
    out = w.reshape(*lead, 2, n, k, 2)
    out = np.swapaxes(out, -1, -2)
    return out.reshape(*lead, 4 * n, k)


class SchrodingerPropagator:
    """
    Propagator for the channel system (u, u')' = [[0, I], [t^2 (V(t x) - lambda), 0]] (u, u').

    Provides:
    - Adaptive step counts by step doubling, cached per spectral scale
    - Fundamental matrices, renormalized graph frames and dense trajectories
    """

    def __init__(self, potential: Potential, tol: float = 1e-10,
                 renorm_every: int = RENORM_EVERY, max_steps: int = MAX_STEPS):
        """
        Initialize the propagator.

        Args:
            potential: symmetric matrix potential on [a, b]
            tol: relative accuracy target for fundamental matrices
            renorm_every: steps between QR renormalizations of graph frames
            max_steps: step count at which refinement gives up
        """
        if not 1e-14 < tol < 1e-2:
            raise PropagationError(f"integrator tolerance must lie in (1e-14, 1e-2), got {tol}")
        self.potential = potential
        self.tol = tol
        self.renorm_every = renorm_every
        self.max_steps = max_steps
        self._eig_cache: Dict[Tuple[float, int], Tuple[np.ndarray, np.ndarray]] = {}
        self._steps_cache: Dict[Tuple[float, int], int] = {}
        self._lock = threading.Lock()

    @property
    def n(self) -> int:
        return self.potential.n

    @property
    def length(self) -> float:
        a, b = self.potential.interval
        return b - a

    def _spectral_scale(self, lam: float, t: float) -> float:
        return t * math.sqrt(self.potential.v_max + abs(lam) + 1.0)

    def _bucket(self, lam: float, t: float) -> Tuple[float, int]:
        level = math.log2(1.0 + abs(lam) + self.potential.v_max)
        return (round(t, 12), int(math.ceil(BUCKETS_PER_OCTAVE * level)))

    def _eigen_nodes(self, t: float, steps: int) -> Tuple[np.ndarray, np.ndarray]:
        """Eigenpairs of the two averaged node potentials of every step, lambda excluded."""
        key = (round(t, 12), steps)
        with self._lock:
            cached = self._eig_cache.get(key)
        if cached is not None:
            return cached

        a, _ = self.potential.interval
        h = self.length / steps
        left = a + h * np.arange(steps)
        v1 = self.potential(t * (left + NODES[0] * h))
        v2 = self.potential(t * (left + NODES[1] * h))
        if not (np.all(np.isfinite(v1)) and np.all(np.isfinite(v2))):
            raise PropagationError("potential returned non-finite values on the integration grid")
        # factor 0 is applied first and weights the early node more
        averaged = np.stack([ALPHA2 * v1 + ALPHA1 * v2, ALPHA1 * v1 + ALPHA2 * v2], axis=1)
        mu, q = np.linalg.eigh(t * t * averaged)
        with self._lock:
            if len(self._eig_cache) > 64:
                self._eig_cache.clear()
            self._eig_cache[key] = (mu, q)
        return mu, q

    def step_matrices(self, lam: float, t: float, steps: int) -> np.ndarray:
        """One-step propagators, shape (steps, 2n, 2n), in order of application."""
        mu, q = self._eigen_nodes(t, steps)
        h = self.length / steps
        shifted = mu - 0.5 * t * t * lam
        kappa = 0.5 * h * h * shifted
        c = _cosh_sqrt(kappa)
        s = _sinhc_sqrt(kappa)
        n = self.n

        cos_block = np.einsum("...ij,...j,...kj->...ik", q, c, q)
        sin_block = np.einsum("...ij,...j,...kj->...ik", q, s, q)
        msin_block = np.einsum("...ij,...j,...kj->...ik", q, shifted * s, q)

        factors = np.empty(mu.shape[:2] + (2 * n, 2 * n))
        factors[..., :n, :n] = cos_block
        factors[..., :n, n:] = 0.5 * h * sin_block
        factors[..., n:, :n] = h * msin_block
        factors[..., n:, n:] = cos_block
        return factors[:, 1] @ factors[:, 0]

    def fundamental_fixed(self, lam: float, t: float, steps: int) -> np.ndarray:
        return tree_product(self.step_matrices(lam, t, steps))

    def steps_for(self, lam: float, t: float = 1.0) -> int:
        """
        Step count reaching the tolerance for this lambda, by step doubling.

        Counts are cached per quarter octave of 1 + |lambda| + v_max.
        """
        key = self._bucket(lam, t)
        with self._lock:
            cached = self._steps_cache.get(key)
        if cached is not None:
            return cached

        omega = self._spectral_scale(lam, t)
        steps = max(2 * self.renorm_every, _ceil_to(int(math.ceil(2.0 * omega * self.length)), self.renorm_every))
        coarse = self.fundamental_fixed(lam, t, steps)
        while True:
            fine_steps = 2 * steps
            if fine_steps > self.max_steps:
                raise PropagationError(
                    f"step count exceeded {self.max_steps} at lambda={lam:.6g}, t={t:.6g} "
                    f"(tolerance {self.tol:.1e})"
                )
            fine = self.fundamental_fixed(lam, t, fine_steps)
            if not np.all(np.isfinite(fine)):
                raise PropagationError(f"non-finite propagator at lambda={lam:.6g}, t={t:.6g}")
            scale = max(1.0, float(np.max(np.abs(fine))))
            err = float(np.max(np.abs(fine - coarse))) / scale / 15.0
            if err <= self.tol:
                break
            steps, coarse = fine_steps, fine

        logger.debug(f"Step count {fine_steps} for lambda={lam:.6g}, t={t:.6g} (error estimate {err:.2e})")
        with self._lock:
            self._steps_cache[key] = fine_steps
        return fine_steps

    def fundamental(self, lam: float, t: float = 1.0, steps: Optional[int] = None) -> np.ndarray:
        """Real 2n x 2n propagator of (u, u') from a to b."""
        steps = steps or self.steps_for(lam, t)
        return self.fundamental_fixed(lam, t, steps)

    def sweep(self, lams: np.ndarray, t: float = 1.0, steps: Optional[int] = None) -> np.ndarray:
        """Fundamental matrices for many lambdas, shape (k, 2n, 2n); a fixed step count is shared."""
        lams = np.asarray(lams, dtype=float)
        if lams.size == 0:
            return np.zeros((0, 2 * self.n, 2 * self.n))
        if steps is None:
            extreme = float(lams[np.argmax(np.abs(lams))])
            steps = self.steps_for(extreme, t)
        return np.stack([self.fundamental_fixed(float(lam), t, steps) for lam in lams])

    def graph_frame(self, lam: float, t: float = 1.0,
                    steps: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Orthonormal frame [Z_a; Y] of the graph {(z(a), z(b))} of the propagator.

        The stacked frame is QR-renormalized every renorm_every steps, so it
        stays well conditioned far below the potential floor.

        Returns:
            (initial data Z_a, final data Y, accumulated R) with Phi = Y R
        """
        steps = steps or self.steps_for(lam, t)
        steps = _ceil_to(steps, self.renorm_every)
        d = 2 * self.n
        mats = self.step_matrices(lam, t, steps)
        chunks = tree_product(mats.reshape(steps // self.renorm_every, self.renorm_every, d, d))

        z_a = np.eye(d)
        y = np.eye(d)
        r_acc = np.eye(d)
        for chunk in chunks:
            y = chunk @ y
            q, r = la.qr(np.vstack([z_a, y]), mode="economic")
            z_a, y = q[:d], q[d:]
            r_acc = r @ r_acc
        return z_a, y, r_acc

    def trajectory(self, lam: float, t: float, init: np.ndarray,
                   steps: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Dense solution values on the integration grid.

        Args:
            init: initial data (2n, k) for (u(a), u'(a))

        Returns:
            (grid points (steps + 1,), states (steps + 1, 2n, k))
        """
        steps = steps or self.steps_for(lam, t)
        mats = self.step_matrices(lam, t, steps)
        states = np.empty((steps + 1,) + init.shape)
        states[0] = init
        for k in range(steps):
            states[k + 1] = mats[k] @ states[k]
        a, b = self.potential.interval
        return np.linspace(a, b, steps + 1), states


@lru_cache(maxsize=32)
def propagator_for(potential: Potential, tol: float) -> SchrodingerPropagator:
    return SchrodingerPropagator(potential, tol=tol)


def rescaled_system(potential: Potential, lam: float, t: float = 1.0) -> RealifiedSystem:
    """The realified system with coefficient t^2 (V(t x) - lambda) on the symmetric interval [-L, L]."""
    if not 0.0 < t <= 1.0:
        raise PotentialError(f"scaling t must lie in (0, 1], got {t}")
    if t != 1.0 and not potential.is_symmetric_interval:
        raise PotentialError(f"rescaling needs a symmetric interval [-L, L], got {potential.interval}")
    return RealifiedSystem(potential=potential, lam=float(lam), t=float(t))


def boundary_plane(theta: float, n: int) -> LagrangianFrame:
    """
    The theta-periodic boundary plane {(p, M p, -q, M q)} in R^{8n}, M = I_n (x) M_theta.
    """
    m_theta = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    big_m = np.kron(np.eye(n), m_theta)
    d = 2 * n
    zero = np.zeros((d, d))
    eye = np.eye(d)
    cols = np.vstack([
        np.hstack([eye, zero]),
        np.hstack([big_m, zero]),
        np.hstack([zero, -eye]),
        np.hstack([zero, big_m]),
    ])
    return make_frame(make_standard_space(4 * n), cols)


def propagate_fundamental(sys: RealifiedSystem, tol: float = 1e-10) -> np.ndarray:
    """4n x 4n real propagator mapping (y(a), y'(a)) to (y(b), y'(b))."""
    prop = propagator_for(sys.potential, tol)
    return realify_matrix(prop.fundamental(sys.lam, sys.t), sys.potential.n)


def trace_frame_columns(z_a: np.ndarray, y_end: np.ndarray, n: int) -> np.ndarray:
    """Trace vectors (y(a), y(b), -y'(a), y'(b)) of realified solutions given as columns."""
    d = 2 * n
    return np.vstack([z_a[:d], y_end[:d], -z_a[d:], y_end[d:]])


def trace_plane(sys: RealifiedSystem, tol: float = 1e-10) -> LagrangianFrame:
    """Plane of traces of all solutions of the realified system, as an 8n x 4n frame."""
    n = sys.potential.n
    prop = propagator_for(sys.potential, tol)
    z_a, y, _ = prop.graph_frame(sys.lam, sys.t)
    cols = trace_frame_columns(realify_matrix(z_a, n), realify_matrix(y, n), n)
    return make_frame(make_standard_space(4 * n), cols)


def monodromy(potential: Potential, lam: float, t: float = 1.0, tol: float = 1e-10) -> Monodromy:
    """
    Complex 2n x 2n propagator of (u, u') over the (rescaled) interval.

    Assumes real symmetric V: the real propagator then acts on real and imaginary
    parts separately, so casting it to complex gives the complex propagator.
    """
    sys = rescaled_system(potential, lam, t)
    prop = propagator_for(potential, tol)
    matrix = prop.fundamental(sys.lam, sys.t).astype(complex)
    return Monodromy(lam=float(lam), matrix=matrix, t=sys.t)


def initial_data(trace_vectors: np.ndarray, n: int) -> np.ndarray:
    """(y(a), y'(a)) of realified solutions from their trace vectors."""
    d = 2 * n
    return np.vstack([trace_vectors[:d], -trace_vectors[2 * d:3 * d]])


class LagrangianPlanes:
    """
    Plane families of one potential: boundary planes by theta and trace
    planes of the (rescaled) solution space by (lambda, t).
    """

    def __init__(self, potential: Potential, numerics: Optional[NumericsConfig] = None):
        self.potential = potential
        self.numerics = numerics or NumericsConfig()
        self.propagator = propagator_for(potential, self.numerics.integrator_tol)
        self.space = make_standard_space(4 * potential.n)

    @property
    def n(self) -> int:
        return self.potential.n

    def boundary(self, theta: float) -> LagrangianFrame:
        return boundary_plane(theta, self.n)

    def solution(self, lam: float, t: float = 1.0) -> LagrangianFrame:
        sys = rescaled_system(self.potential, lam, t)
        z_a, y, _ = self.propagator.graph_frame(sys.lam, sys.t)
        n = self.n
        cols = trace_frame_columns(realify_matrix(z_a, n), realify_matrix(y, n), n)
        return make_frame(self.space, cols)

    def plane(self, params: Dict[str, float], role: str) -> LagrangianFrame:
        if role == "boundary":
            return self.boundary(params["theta"])
        return self.solution(params["lambda"], params.get("t", 1.0))

    def solutions(self, lam: float, t: float, trace_vectors: np.ndarray,
                  steps: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Realified solutions through the given trace vectors on the integration grid.

        Returns:
            (grid, y values (k+1, 2n, m), y' values (k+1, 2n, m))
        """
        n = self.n
        init = to_channels(initial_data(trace_vectors, n), n)
        xs, states = self.propagator.trajectory(lam, t, init, steps)
        realified = from_channels(states, n)
        return xs, realified[:, :2 * n], realified[:, 2 * n:]
