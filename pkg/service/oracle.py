"""
Spectral oracle

Eigenvalues of the theta-periodic operator H_theta(t) by two independent
routes: a twisted finite-difference discretization and the roots of
lambda -> det(T(lambda) - e^{i theta} I) for the monodromy T. On top of these:
counting functions, Morse indices, eigenvalue branches lambda_k(theta), the
derivative d lambda / d theta by three evaluations, and band edges.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np
from scipy import linalg as la
from scipy import sparse
from scipy.integrate import simpson
from scipy.optimize import brentq, minimize_scalar
from scipy.sparse.linalg import eigsh

from _types.config_types import NumericsConfig
from _types.data_models import Potential
from _types.errors import BranchError, GuardBandError, OracleError
from _types.result_types import (
    FINITE_DIFFERENCE, MONODROMY_ROOTS, EigencurvePoint, SpectrumResult
)
from .maslov import theta_form_matrix
from .propagation import propagator_for, rescaled_system

logger = logging.getLogger(__name__)

DENSE_LIMIT = 1200
ROOT_MERGE = 1e-8
DOUBLE_ROOT_TOL = 1e-6
CLUSTER_SIGMA = 1e-3
FD_DERIVATIVE_STEP = 1e-4
BRANCH_GAP_TOL = 1e-4
ESTIMATE_GRID = 256


def lambda_floor(potential: Potential) -> float:
    """A level strictly below every spectrum of the potential, for all theta and t: -v_max - 1"""
    return -potential.v_max - 1.0


def _scaled_interval(potential: Potential, t: float) -> Tuple[float, float]:
    a, b = potential.interval
    return (t * a, t * b)


def _group(values: np.ndarray, rel_tol: float = 1e-9) -> List[Tuple[float, int]]:
    """Group sorted eigenvalues into (value, multiplicity)"""
    out: List[Tuple[float, int]] = []
    for v in np.sort(values):
        if out and abs(v - out[-1][0]) <= rel_tol * max(1.0, abs(v)):
            lam, mult = out[-1]
            out[-1] = ((lam * mult + v) / (mult + 1), mult + 1)
        else:
            out.append((float(v), 1))
    return out


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def fd_hamiltonian(potential: Potential, theta: float, t: float, grid: int) -> sparse.csr_matrix:
    """
    Three-point Laplacian on a uniform periodic grid of the scaled interval with
    wrap entries -e^{+-i theta}/h^2, plus V sampled on the grid.
    """
    a, b = _scaled_interval(potential, t)
    n = potential.n
    h = (b - a) / grid
    xs = a + h * np.arange(grid)

    off = -np.ones(grid - 1) / h ** 2
    lap = sparse.diags([off, 2.0 * np.ones(grid) / h ** 2, off], [-1, 0, 1],
                       shape=(grid, grid), format="lil", dtype=complex)
    lap[grid - 1, 0] += -np.exp(1j * theta) / h ** 2
    lap[0, grid - 1] += -np.exp(-1j * theta) / h ** 2

    ham = sparse.kron(lap.tocsr(), sparse.identity(n), format="csr")
    ham = ham + sparse.block_diag(list(potential(xs)), format="csr")
    return ham.tocsr()


def fd_spectrum(potential: Potential, theta: float, t: float = 1.0, grid: int = 2000,
                cutoff: float = 0.0) -> SpectrumResult:
    """
    Finite-difference eigenvalues of H_theta(t) below the cutoff.

    The discretization is second order in 1/K.

    Raises:
        OracleError: the grid cannot resolve eigenvalues up to the cutoff
    """
    if grid < 64:
        raise OracleError(f"finite-difference grid must have at least 64 points, got {grid}")
    a, b = _scaled_interval(potential, t)
    resolvable = (grid / 10.0) ** 2 * (math.pi / (b - a)) ** 2
    if cutoff > resolvable:
        raise OracleError(
            f"grid K={grid} resolves eigenvalues up to {resolvable:.6g}, cutoff {cutoff:.6g} requested"
        )

    ham = fd_hamiltonian(potential, theta, t, grid)
    size = ham.shape[0]
    floor = lambda_floor(potential)
    if size <= DENSE_LIMIT:
        values = la.eigh(ham.toarray(), eigvals_only=True, subset_by_value=(floor, cutoff))
    else:
        # Weyl estimate of the count below the cutoff, grown until the cutoff is passed
        n = potential.n
        k = int(n * ((b - a) * math.sqrt(max(cutoff - floor, 0.0)) / math.pi + 4))
        while True:
            k = min(k, size - 2)
            values = eigsh(ham, k=k, sigma=floor, which="LM", return_eigenvectors=False)
            values = np.sort(values.real)
            if values[-1] >= cutoff or k >= size - 2:
                break
            k = 2 * k
        values = values[values < cutoff]

    logger.debug(f"FD spectrum theta={theta:.6g}, t={t:.6g}, K={grid}: {len(values)} eigenvalues below {cutoff:.6g}")
    return SpectrumResult(theta=float(theta), t=float(t), eigenvalues=_group(values, 1e-7),
                          cutoff=float(cutoff), method=FINITE_DIFFERENCE)


def _estimate_level(potential: Potential, theta: float, t: float, index: int) -> float:
    """Coarse estimate of the index-th eigenvalue (0-based, with multiplicity)"""
    ham = fd_hamiltonian(potential, theta, t, max(ESTIMATE_GRID, 8 * (index + 2))).toarray()
    values = la.eigh(ham, eigvals_only=True)
    return float(values[min(index, len(values) - 1)])


# ---------------------------------------------------------------------------
# Monodromy roots
# ---------------------------------------------------------------------------

class _FloquetFunction:
    """g(lambda) = Re(e^{-i n theta} det(T - e^{i theta} I)) and the smallest singular value of T - e^{i theta} I"""

    def __init__(self, potential: Potential, theta: float, t: float, tol: float, steps: int):
        self.potential = potential
        self.theta = theta
        self.t = t
        self.steps = steps
        self.propagator = propagator_for(potential, tol)
        self.shift = np.exp(1j * theta)
        self.phase = np.exp(-1j * potential.n * theta)
        self.eye = np.eye(2 * potential.n)

    def matrix(self, lam: float) -> np.ndarray:
        return self.propagator.fundamental_fixed(lam, self.t, self.steps)

    def g(self, lam: float) -> float:
        return float((self.phase * np.linalg.det(self.matrix(lam) - self.shift * self.eye)).real)

    def sigma(self, lam: float) -> float:
        mat = self.matrix(lam)
        s = np.linalg.svd(mat - self.shift * self.eye, compute_uv=False)
        return float(s[-1] / max(1.0, s[0]))

    def scan(self, lams: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        mats = self.propagator.sweep(lams, self.t, self.steps) - self.shift * self.eye
        g = (self.phase * np.linalg.det(mats)).real
        s = np.linalg.svd(mats, compute_uv=False)
        return g, s[:, -1] / np.maximum(1.0, s[:, 0])

    def second_sigma(self, lam: float) -> float:
        s = np.linalg.svd(self.matrix(lam) - self.shift * self.eye, compute_uv=False)
        return float(s[-2] / max(1.0, s[0]))

    def multiplicity(self, lam: float) -> int:
        mat = self.matrix(lam) - self.shift * self.eye
        s = np.linalg.svd(mat, compute_uv=False)
        return max(1, int(np.sum(s <= DOUBLE_ROOT_TOL * max(1.0, s[0]))))


def _floquet_roots(func: _FloquetFunction, lo: float, hi: float, step: float,
                   xtol: float) -> List[Tuple[float, int]]:
    cells = max(2, int(math.ceil((hi - lo) / step)))
    lams = np.linspace(lo, hi, cells + 1)
    g, sig = func.scan(lams)

    roots: List[float] = []
    changed = np.zeros(cells + 1, dtype=bool)
    for i in range(cells):
        if g[i] == 0.0:
            roots.append(float(lams[i]))
            changed[i] = True
        elif g[i] * g[i + 1] < 0.0:
            roots.append(float(brentq(func.g, lams[i], lams[i + 1], xtol=xtol, rtol=4.0 * np.finfo(float).eps)))
            changed[i] = changed[i + 1] = True

    # even-order roots: local minima of the singular value without a sign change
    for i in range(1, cells):
        if changed[i] or not (sig[i] <= sig[i - 1] and sig[i] < sig[i + 1]):
            continue
        res = minimize_scalar(func.sigma, bounds=(lams[i - 1], lams[i + 1]), method="bounded",
                              options={"xatol": xtol})
        if res.fun > DOUBLE_ROOT_TOL:
            continue
        lam = float(res.x)
        if all(abs(lam - r) > ROOT_MERGE * max(1.0, abs(lam)) for r in roots):
            roots.append(lam)

    roots.sort()
    clusters: List[List[float]] = []
    for lam in roots:
        if clusters and (abs(lam - clusters[-1][-1]) <= ROOT_MERGE * max(1.0, abs(lam))
                         or (lam - clusters[-1][-1] < step
                             and func.sigma(0.5 * (lam + clusters[-1][-1])) <= DOUBLE_ROOT_TOL)):
            clusters[-1].append(lam)
        else:
            clusters.append([lam])

    out: List[Tuple[float, int]] = []
    for cluster in clusters:
        lam = cluster[0] if len(cluster) == 1 else 0.5 * (cluster[0] + cluster[-1])
        if len(cluster) > 1 or func.second_sigma(lam) <= CLUSTER_SIGMA:
            # sign changes around a multiple root are rounding noise; use the singular value minimum
            width = max(cluster[-1] - cluster[0], 1e-6)
            res = minimize_scalar(func.sigma, bounds=(cluster[0] - width, cluster[-1] + width),
                                  method="bounded", options={"xatol": xtol})
            lam = float(res.x)
        out.append((lam, func.multiplicity(lam)))
    return out


def _check_level(eigs: List[Tuple[float, int]], fd_values: np.ndarray, lo: float, hi: float,
                 band: float) -> Tuple[float, int, int]:
    """A level near the window top, far from all eigenvalues, with both counts below it."""
    merged = np.concatenate([[lam for lam, _ in eigs], fd_values]) if eigs or len(fd_values) else np.zeros(0)
    top = hi - band
    levels = np.linspace(max(lo, hi - 3.0 * band), top, 41)
    if merged.size:
        dist = np.min(np.abs(levels[:, None] - merged[None, :]), axis=1)
        level = float(levels[int(np.argmax(dist))])
    else:
        level = float(top)
    floquet_count = int(sum(m for lam, m in eigs if lam < level))
    fd_count = int(np.sum(fd_values < level))
    return level, floquet_count, fd_count


def floquet_spectrum(potential: Potential, theta: float, t: float = 1.0,
                     window: Optional[Tuple[float, float]] = None,
                     numerics: Optional[NumericsConfig] = None,
                     cross_check: bool = True) -> SpectrumResult:
    """
    Eigenvalues in the window as roots of lambda -> det(T(lambda) - e^{i theta} I).

    Sign changes of the real function e^{-i n theta} det(T - e^{i theta} I)
    are polished with brentq; roots of even order show up as local minima of
    the smallest singular value of T - e^{i theta} I and are polished by
    bounded minimization. Multiplicities are kernel dimensions. A
    finite-difference count below a level near the window top must agree,
    otherwise the scan is refined.

    Raises:
        OracleError: counts still disagree after the refinement cap
    """
    numerics = numerics or NumericsConfig()
    floor = lambda_floor(potential)
    lo, hi = window if window is not None else (floor, floor + 10.0)
    if not lo < hi:
        raise OracleError(f"empty window ({lo}, {hi})")
    rescaled_system(potential, lo, t)

    prop = propagator_for(potential, numerics.integrator_tol)
    steps = prop.steps_for(max(abs(lo), abs(hi)), t)
    func = _FloquetFunction(potential, theta, t, numerics.integrator_tol, steps)
    xtol = max(numerics.localize_tol * 1e-2, 1e-13)

    step = numerics.floquet_scan_step
    fd_values = None
    for attempt in range(numerics.max_refinements + 1):
        eigs = _floquet_roots(func, lo, hi, step, xtol)
        if not cross_check:
            break
        if fd_values is None:
            a, b = _scaled_interval(potential, t)
            resolvable = (numerics.fd_grid / 10.0) ** 2 * (math.pi / (b - a)) ** 2
            fd_top = min(hi, resolvable)
            fd_values = fd_spectrum(potential, theta, t, numerics.fd_grid, fd_top).values
            h = (b - a) / numerics.fd_grid
            band = 0.01 + (abs(hi) + potential.v_max) ** 2 * h ** 2
            check_hi = fd_top
        level, floquet_count, fd_count = _check_level(eigs, fd_values, lo, check_hi, band)
        if floquet_count == fd_count:
            break
        logger.warning(f"Floquet count {floquet_count} != FD count {fd_count} below {level:.6g} "
                       f"(theta={theta:.6g}, t={t:.6g}); refining scan step to {step / 2:.3g}")
        step /= 2.0
    else:
        logger.error(f"Floquet and FD counts disagree at theta={theta:.6g}, t={t:.6g}")
        raise OracleError(
            f"monodromy roots and finite differences disagree below {level:.6g} "
            f"({floquet_count} vs {fd_count}) at theta={theta:.6g}, t={t:.6g}"
        )

    logger.debug(f"Floquet spectrum theta={theta:.6g}, t={t:.6g} on [{lo:.6g}, {hi:.6g}]: {eigs}")
    return SpectrumResult(theta=float(theta), t=float(t), eigenvalues=eigs,
                          cutoff=float(hi), method=MONODROMY_ROOTS)


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------

def count_below(potential: Potential, theta: float, r: float, t: float = 1.0,
                numerics: Optional[NumericsConfig] = None) -> int:
    """
    N(r, theta): eigenvalues of H_theta(t) strictly below r, with multiplicity.

    Raises:
        GuardBandError: r lies within the guard band of an eigenvalue
    """
    numerics = numerics or NumericsConfig()
    floor = lambda_floor(potential)
    if r <= floor:
        return 0
    pad = max(0.05, 100.0 * numerics.guard_band)
    spectrum = floquet_spectrum(potential, theta, t, (floor, r + pad), numerics)
    nearest = spectrum.nearest(r)
    if nearest is not None and abs(nearest - r) <= numerics.guard_band:
        raise GuardBandError(r, nearest, numerics.guard_band)
    return spectrum.count_below(r)


def count_interval(potential: Potential, theta: float, r1: float, r2: float, t: float = 1.0,
                   numerics: Optional[NumericsConfig] = None) -> int:
    """N([r1, r2), theta) = N(r2, theta) - N(r1, theta)"""
    if not r1 < r2:
        raise OracleError(f"need r1 < r2, got ({r1}, {r2})")
    return (count_below(potential, theta, r2, t, numerics)
            - count_below(potential, theta, r1, t, numerics))


def morse(potential: Potential, theta: float, t: float = 1.0,
          numerics: Optional[NumericsConfig] = None) -> int:
    """Number of negative eigenvalues of H_theta(t)"""
    return count_below(potential, theta, 0.0, t, numerics)


# ---------------------------------------------------------------------------
# Eigenvalue branches
# ---------------------------------------------------------------------------

def _normalized_boundary_data(func: _FloquetFunction, lam: float) -> Tuple[np.ndarray, np.ndarray, float, float]:
    """Null vector (u(a), u'(a)) of T - e^{i theta} I scaled to ||u||_L2 = 1, residual and second singular value"""
    mat = func.matrix(lam) - func.shift * func.eye
    _, s, vh = np.linalg.svd(mat)
    v = vh[-1].conj()
    residual = float(np.linalg.norm(mat @ v))
    second = float(s[-2] / max(1.0, s[0])) if len(s) > 1 else 1.0

    n = func.potential.n
    init = np.stack([v.real, v.imag], axis=1)
    xs, states = func.propagator.trajectory(lam, func.t, init, func.steps)
    u = states[:, :n, 0] + 1j * states[:, :n, 1]
    norm = math.sqrt(float(simpson(np.sum(np.abs(u) ** 2, axis=1), x=xs)))
    v = v / norm
    return v[:n], v[n:], residual, second


def _polish(func: _FloquetFunction, guess: float, width: float, xtol: float) -> float:
    """Root of g near the guess, widening the bracket until g changes sign"""
    for _ in range(12):
        lo, hi = guess - width, guess + width
        g_lo, g_hi = func.g(lo), func.g(hi)
        if g_lo * g_hi < 0.0:
            return float(brentq(func.g, lo, hi, xtol=xtol, rtol=4.0 * np.finfo(float).eps))
        width *= 2.0
    raise BranchError(func.theta, f"no sign change of the Floquet function near lambda={guess:.12g}")


def _branch_point(func: _FloquetFunction, lam: float, branch: int) -> EigencurvePoint:
    u_a, du_a, residual, second = _normalized_boundary_data(func, lam)
    simple = second > BRANCH_GAP_TOL
    if not simple:
        raise BranchError(func.theta, f"branch {branch} collides near lambda={lam:.12g} "
                                      f"(second singular value {second:.2e})")
    return EigencurvePoint(theta=float(func.theta), lambda_k=float(lam), u_a=u_a, du_a=du_a,
                           simple=simple, residual=residual, t=float(func.t), branch=branch)


def eigencurve(potential: Potential, branch: int, theta_range: Tuple[float, float],
               step: float, t: float = 1.0,
               numerics: Optional[NumericsConfig] = None) -> List[EigencurvePoint]:
    """
    Follow the branch-th eigenvalue (0-based, ascending at the first theta) by
    predictor-corrector continuation in theta.

    Raises:
        BranchError: the branch is not simple somewhere on the range
    """
    numerics = numerics or NumericsConfig()
    theta0, theta1 = theta_range
    cells = max(1, int(math.ceil(abs(theta1 - theta0) / step - 1e-9)))
    thetas = np.linspace(theta0, theta1, cells + 1)

    estimate = _estimate_level(potential, theta0, t, branch + 1)
    top = estimate + max(0.5, 0.05 * abs(estimate))
    start = floquet_spectrum(potential, theta0, t, (lambda_floor(potential), top), numerics).values
    if len(start) <= branch:
        raise BranchError(theta0, f"only {len(start)} eigenvalues below {top:.6g}")
    lam = float(start[branch])
    if (branch > 0 and abs(start[branch - 1] - lam) <= BRANCH_GAP_TOL) or \
            (branch + 1 < len(start) and abs(start[branch + 1] - lam) <= BRANCH_GAP_TOL):
        raise BranchError(theta0, f"branch {branch} is degenerate at lambda={lam:.12g}")

    prop = propagator_for(potential, numerics.integrator_tol)
    steps = prop.steps_for(top, t)
    xtol = 1e-13

    points: List[EigencurvePoint] = []
    slope = 0.0
    for i, theta in enumerate(thetas):
        func = _FloquetFunction(potential, float(theta), t, numerics.integrator_tol, steps)
        if i > 0:
            d_theta = theta - thetas[i - 1]
            guess = lam + slope * d_theta
            width = max(1e-6, 0.1 * abs(slope * d_theta), 1e-3 * abs(d_theta))
            lam = _polish(func, guess, width, xtol)
            slope = (lam - points[-1].lambda_k) / d_theta
        points.append(_branch_point(func, lam, branch))
    logger.info(f"Eigencurve branch {branch}: {len(points)} points on [{theta0:.6g}, {theta1:.6g}]")
    return points


def branch_point(potential: Potential, theta: float, guess: float, branch: int = 0,
                 t: float = 1.0, numerics: Optional[NumericsConfig] = None,
                 width: float = 1e-3) -> EigencurvePoint:
    """A single simple branch point polished from a nearby eigenvalue guess."""
    numerics = numerics or NumericsConfig()
    prop = propagator_for(potential, numerics.integrator_tol)
    steps = prop.steps_for(abs(guess) + 1.0, t)
    func = _FloquetFunction(potential, float(theta), t, numerics.integrator_tol, steps)
    return _branch_point(func, _polish(func, guess, width, 1e-13), branch)


def dlambda_dtheta(point: EigencurvePoint, potential: Potential,
                   numerics: Optional[NumericsConfig] = None) -> Tuple[float, float, float]:
    """
    d lambda / d theta at a simple branch point by three evaluations:
    the boundary formula 2 Im(u'(a), u(a)), the negated theta crossing form on
    the realified eigen-trace, and a centered difference of the branch.

    Branch points carry data normalized on the unscaled interval, so for
    t < 1 the two boundary evaluations are divided by t^2.
    """
    numerics = numerics or NumericsConfig()
    if not point.simple:
        raise BranchError(point.theta, "derivative requested on a non-simple branch point")
    n = potential.n
    scale = point.t * point.t
    boundary = 2.0 * float(np.imag(np.vdot(point.u_a, point.du_a))) / scale

    trace = np.zeros(8 * n)
    trace[0:2 * n:2], trace[1:2 * n:2] = point.u_a.real, point.u_a.imag
    trace[4 * n:6 * n:2], trace[4 * n + 1:6 * n:2] = -point.du_a.real, -point.du_a.imag
    form = -float(theta_form_matrix(trace[:, None], n)[0, 0]) / scale

    prop = propagator_for(potential, numerics.integrator_tol)
    steps = prop.steps_for(point.lambda_k + 1.0, point.t)
    width = max(1e-6, 4.0 * abs(boundary) * FD_DERIVATIVE_STEP)
    sides = []
    for sign in (1.0, -1.0):
        func = _FloquetFunction(potential, point.theta + sign * FD_DERIVATIVE_STEP, point.t,
                                numerics.integrator_tol, steps)
        guess = point.lambda_k + sign * boundary * FD_DERIVATIVE_STEP
        sides.append(_polish(func, guess, width, 1e-14))
    centered = (sides[0] - sides[1]) / (2.0 * FD_DERIVATIVE_STEP)
    return boundary, form, centered


def wronskian_check(point: EigencurvePoint, potential: Potential) -> float:
    """
    Im W(u, conj u)(a) for n = 1; W = u conj(u)' - u' conj(u) is purely
    imaginary and equals -i d lambda / d theta.

    Raises:
        OracleError: n != 1, or W vanishes at theta outside {0, pi}
    """
    if potential.n != 1:
        raise OracleError(f"the Wronskian check needs n = 1, got n = {potential.n}")
    u, du = complex(point.u_a[0]), complex(point.du_a[0])
    w = u * np.conj(du) - du * np.conj(u)
    theta = point.theta % (2.0 * math.pi)
    interior = min(abs(theta), abs(theta - math.pi), abs(theta - 2.0 * math.pi)) > 1e-12
    if interior and abs(w) <= 1e-10:
        raise OracleError(f"Wronskian vanishes at theta={point.theta:.12g}")
    return float(w.imag)


def bands(potential: Potential, k_max: int,
          numerics: Optional[NumericsConfig] = None) -> List[Tuple[float, float]]:
    """
    Band intervals [alpha_k, beta_k], k < k_max, from periodic and antiperiodic
    eigenvalues paired in ascending order.
    """
    if k_max < 1:
        raise OracleError(f"k_max must be positive, got {k_max}")
    numerics = numerics or NumericsConfig()
    edges = []
    for theta in (0.0, math.pi):
        estimate = _estimate_level(potential, theta, 1.0, k_max)
        top = estimate + max(0.5, 0.05 * abs(estimate))
        values = floquet_spectrum(potential, theta, 1.0, (lambda_floor(potential), top), numerics).values
        if len(values) < k_max:
            raise OracleError(f"only {len(values)} eigenvalues below {top:.6g} at theta={theta:.6g}")
        edges.append(values[:k_max])
    periodic, antiperiodic = edges
    return [(float(min(p, q)), float(max(p, q))) for p, q in zip(periodic, antiperiodic)]
