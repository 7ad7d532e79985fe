"""
Maslov index engine

Parameter rectangles in (lambda, theta) and (lambda, t), crossing detection
by the smallest singular value of [A(s) | -B(s)], crossing forms for each
parameter, and two independent index backends: a signed sum of crossing-form
signatures and the spectral flow of the Souriau matrix through -1 in the
doubled space.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.integrate import simpson
from scipy.optimize import linear_sum_assignment, minimize_scalar

from _types.config_types import NumericsConfig
from _types.data_models import (
    BOUNDARY_ROLE, LAMBDA, SCALE, SOLUTION_ROLE, THETA,
    LagrangianFrame, PathSpec, Segment
)
from _types.errors import (
    BackendMismatchError, CrossingError, PathError, PotentialError
)
from _types.result_types import (
    CROSSING_FORM, END, INTERIOR, SPECTRAL_FLOW, START,
    CrossingRecord, FormResult, MaslovResult
)
from .propagation import LagrangianPlanes
from .symplectic import (
    diagonal_plane, direct_sum, double_space, eigenphases, intersect,
    plane_gap, smallest_singular_value, souriau_map
)

logger = logging.getLogger(__name__)

BACKENDS = (CROSSING_FORM, SPECTRAL_FLOW, "both")

SUBCELLS = 8
MAX_SUBDIVISION = 2
REFINE_BELOW = 0.15
FORM_ZERO_TOL = 1e-9
MOTION_CAP = math.pi / 4.0
GAP_CAP = math.sin(math.pi / 8.0)
EPSILON_MARGIN = 1e-3
# quadrature grid of the t-form, relative to the integrator grid
FORM_OVERSAMPLE = 4


# ---------------------------------------------------------------------------
# Paths
# ---------------------------------------------------------------------------

def rectangle_theta(theta1: float, theta2: float, r: float, lambda_inf: float,
                    floor: Optional[float] = None) -> PathSpec:
    """
    The (lambda, theta) rectangle traversed Gamma_1 .. Gamma_4.

    Gamma_1 raises lambda from lambda_inf to r at theta1, Gamma_2 moves theta
    from theta1 to theta2 at lambda = r, Gamma_3 lowers lambda back at theta2
    and Gamma_4 closes along the floor lambda = lambda_inf.

    Raises:
        PathError: bad theta range, or lambda_inf not below r and the spectral floor
    """
    if not 0.0 <= theta1 < theta2 < 2.0 * math.pi:
        raise PathError(f"need 0 <= theta1 < theta2 < 2 pi, got ({theta1}, {theta2})")
    if not lambda_inf < r:
        raise PathError(f"lambda_inf={lambda_inf} must lie below r={r}")
    if floor is not None and not lambda_inf < floor:
        raise PathError(f"lambda_inf={lambda_inf} is not below the spectral floor {floor}")
    return PathSpec(segments=[
        Segment("Gamma_1", LAMBDA, lambda_inf, r, {THETA: theta1, SCALE: 1.0}, SOLUTION_ROLE),
        Segment("Gamma_2", THETA, theta1, theta2, {LAMBDA: r, SCALE: 1.0}, BOUNDARY_ROLE),
        Segment("Gamma_3", LAMBDA, r, lambda_inf, {THETA: theta2, SCALE: 1.0}, SOLUTION_ROLE),
        Segment("Gamma_4", THETA, theta2, theta1, {LAMBDA: lambda_inf, SCALE: 1.0}, BOUNDARY_ROLE,
                floor=True),
    ], closed=True)


def rectangle_t(tau: float, r: float, lambda_sup_inf: float, theta: float,
                floor: Optional[float] = None) -> PathSpec:
    """
    The (lambda, t) rectangle Sigma_1 .. Sigma_4 for the rescaled family.

    Sigma_1 raises lambda at t = tau, Sigma_2 moves t from tau to 1 at
    lambda = r, Sigma_3 lowers lambda at t = 1 and Sigma_4 returns along the floor.
    """
    if not 0.0 < tau <= 1.0:
        raise PathError(f"tau must lie in (0, 1], got {tau}")
    if not lambda_sup_inf < r:
        raise PathError(f"lambda_sup_inf={lambda_sup_inf} must lie below r={r}")
    if floor is not None and not lambda_sup_inf < floor:
        raise PathError(f"lambda_sup_inf={lambda_sup_inf} is not below the spectral floor {floor}")
    return PathSpec(segments=[
        Segment("Sigma_1", LAMBDA, lambda_sup_inf, r, {THETA: theta, SCALE: tau}, SOLUTION_ROLE),
        Segment("Sigma_2", SCALE, tau, 1.0, {THETA: theta, LAMBDA: r}, SOLUTION_ROLE),
        Segment("Sigma_3", LAMBDA, r, lambda_sup_inf, {THETA: theta, SCALE: 1.0}, SOLUTION_ROLE),
        Segment("Sigma_4", SCALE, 1.0, tau, {THETA: theta, LAMBDA: lambda_sup_inf}, SOLUTION_ROLE,
                floor=True),
    ], closed=True)


def _segments(path: Union[PathSpec, Segment]) -> List[Segment]:
    return [path] if isinstance(path, Segment) else list(path.segments)


class _SegmentPlanes:
    """Moving and fixed planes of one segment; the fixed plane is built once."""

    def __init__(self, segment: Segment, planes: LagrangianPlanes):
        self.segment = segment
        self.planes = planes
        fixed_role = SOLUTION_ROLE if segment.plane_role == BOUNDARY_ROLE else BOUNDARY_ROLE
        self.fixed = planes.plane(segment.point(segment.start), fixed_role)

    def moving(self, s: float) -> LagrangianFrame:
        return self.planes.plane(self.segment.point(s), self.segment.plane_role)

    def sigma(self, s: float) -> float:
        return smallest_singular_value(self.moving(s), self.fixed)

    def boundary(self, s: float) -> LagrangianFrame:
        if self.segment.plane_role == BOUNDARY_ROLE:
            return self.moving(s)
        return self.fixed

    def solution(self, s: float) -> LagrangianFrame:
        if self.segment.plane_role == SOLUTION_ROLE:
            return self.moving(s)
        return self.fixed


# ---------------------------------------------------------------------------
# Crossing detection
# ---------------------------------------------------------------------------

def _local_minima(values: np.ndarray) -> List[int]:
    idx = []
    last = len(values) - 1
    for i, v in enumerate(values):
        left = values[i - 1] if i > 0 else np.inf
        right = values[i + 1] if i < last else np.inf
        if v <= left and v < right:
            idx.append(i)
    return idx


def _brackets(sigma, grid: np.ndarray, values: np.ndarray, depth: int,
              max_depth: int, min_width: float) -> List[Tuple[float, float, float]]:
    """Brackets (lo, hi, s_min) around local minima, subdividing cells with low minima."""
    out = []
    last = len(grid) - 1
    for i in _local_minima(values):
        lo = grid[max(i - 1, 0)]
        hi = grid[min(i + 1, last)]
        if depth < min(max_depth, MAX_SUBDIVISION) and values[i] < REFINE_BELOW and hi - lo > min_width:
            sub = np.linspace(lo, hi, 2 * SUBCELLS + 1)
            sub_values = np.array([sigma(s) for s in sub])
            out.extend(_brackets(sigma, sub, sub_values, depth + 1, max_depth, min_width))
        else:
            out.append((lo, hi, grid[i]))
    return out


def find_crossings(path: Union[PathSpec, Segment], planes: LagrangianPlanes,
                   numerics: Optional[NumericsConfig] = None,
                   segment_offset: int = 0) -> List[CrossingRecord]:
    """
    Locate every conjugate point of the path, without crossing forms.

    Each segment is scanned on a uniform grid of the smallest singular value
    of [A(s) | -B(s)]; cells around low local minima are subdivided, and every
    candidate is polished by bounded minimization to the localization
    tolerance. The intersection at the polished point is classified with the
    crossing rank tolerance.

    Raises:
        CrossingError: a crossing on a floor segment
        BorderlineRankError: rank still ambiguous at a localized candidate
    """
    numerics = numerics or planes.numerics
    records: List[CrossingRecord] = []
    for offset, segment in enumerate(_segments(path)):
        seg_id = segment_offset + offset
        if segment.length == 0.0:
            continue
        records.extend(_segment_crossings(segment, seg_id, planes, numerics))
    return records


def _segment_crossings(segment: Segment, seg_id: int, planes: LagrangianPlanes,
                       numerics: NumericsConfig) -> List[CrossingRecord]:
    sp = _SegmentPlanes(segment, planes)
    lo, hi = sorted((segment.start, segment.end))
    cells = numerics.scan_cells if not segment.floor else max(8, numerics.scan_cells // 8)
    grid = np.linspace(lo, hi, cells + 1)
    values = np.array([sp.sigma(s) for s in grid])
    threshold = math.sqrt(2.0) * numerics.crossing_rank_tol

    if segment.floor:
        i = int(np.argmin(values))
        res = minimize_scalar(sp.sigma, bounds=(grid[max(i - 1, 0)], grid[min(i + 1, cells)]),
                              method="bounded", options={"xatol": numerics.localize_tol})
        if min(float(res.fun), values[i]) < 10.0 * threshold:
            s_bad = float(res.x) if res.fun < values[i] else float(grid[i])
            raise CrossingError(
                f"{segment.label}: plane intersection on the floor edge at s={s_bad:.12g}; "
                f"the floor is not below the spectrum"
            )
        return []

    min_width = 1e3 * numerics.localize_tol
    brackets = _brackets(sp.sigma, grid, values, 0, numerics.max_refinements, min_width)
    corner = 1e3 * numerics.localize_tol

    found: List[CrossingRecord] = []
    for b_lo, b_hi, s_guess in brackets:
        if b_hi > b_lo:
            res = minimize_scalar(sp.sigma, bounds=(b_lo, b_hi), method="bounded",
                                  options={"xatol": numerics.localize_tol})
            s_star, sig = float(res.x), float(res.fun)
            sig_guess = sp.sigma(s_guess)
            if sig_guess < sig:
                s_star, sig = float(s_guess), sig_guess
        else:
            s_star, sig = float(s_guess), sp.sigma(s_guess)
        if sig >= 10.0 * threshold:
            continue

        if abs(s_star - lo) <= corner:
            s_star = lo
        elif abs(hi - s_star) <= corner:
            s_star = hi
        if any(abs(s_star - rec.s_star) <= corner for rec in found):
            continue

        basis = intersect(sp.moving(s_star), sp.fixed, tol=numerics.crossing_rank_tol,
                          interval=(b_lo, b_hi))
        if basis.dim_real == 0:
            continue
        if s_star == segment.start:
            position = START
        elif s_star == segment.end:
            position = END
        else:
            position = INTERIOR
        found.append(CrossingRecord(
            s_star=s_star, segment_id=seg_id, point=segment.point(s_star),
            dim_real=basis.dim_real, basis=basis, position=position,
        ))
        logger.debug(f"{segment.label}: crossing at s={s_star:.12g}, dim_real={basis.dim_real}, "
                     f"position={position}")

    if segment.orientation < 0:
        found.sort(key=lambda rec: -rec.s_star)
    else:
        found.sort(key=lambda rec: rec.s_star)
    return found


# ---------------------------------------------------------------------------
# Crossing forms
# ---------------------------------------------------------------------------

def signature(matrix: np.ndarray, zero_tol: float = FORM_ZERO_TOL) -> Tuple[int, int, int]:
    """(n_plus, n_zero, n_minus) of a symmetric matrix"""
    if matrix.size == 0:
        return (0, 0, 0)
    eig = np.linalg.eigvalsh(0.5 * (matrix + matrix.T))
    scale = max(1.0, float(np.max(np.abs(eig))))
    plus = int(np.sum(eig > zero_tol * scale))
    minus = int(np.sum(eig < -zero_tol * scale))
    return (plus, len(eig) - plus - minus, minus)


def theta_form_matrix(trace_vectors: np.ndarray, n: int) -> np.ndarray:
    """
    Crossing form of the boundary plane moving in theta:
    B_ij = q_i^T K p_j + q_j^T K p_i with p = y(a), q = y'(a), K = I_n (x) J.
    """
    d = 2 * n
    p = trace_vectors[:d]
    q = -trace_vectors[2 * d:3 * d]
    k = np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))
    half = q.T @ k @ p
    return half + half.T


def gram_matrix(xs: np.ndarray, y: np.ndarray) -> np.ndarray:
    """L2 Gram matrix of realified solutions sampled as (k, 2n, m)"""
    integrand = np.einsum("xci,xcj->xij", y, y)
    gram = simpson(integrand, x=xs, axis=0)
    return 0.5 * (gram + gram.T)


def crossing_form_lambda(record: CrossingRecord, planes: LagrangianPlanes,
                         segment: Optional[Segment] = None) -> FormResult:
    """
    Form of the solution plane moving in lambda: -t^2 times the L2 Gram matrix
    of the solutions through the intersection basis, signed by orientation.
    """
    orientation = segment.orientation if segment is not None else 1
    lam = record.point[LAMBDA]
    t = record.point.get(SCALE, 1.0)
    xs, y, _ = planes.solutions(lam, t, record.basis.vectors)
    matrix = -orientation * t * t * gram_matrix(xs, y)
    return FormResult(matrix=matrix, signature=signature(matrix))


def crossing_form_theta(record: CrossingRecord, planes: LagrangianPlanes,
                        segment: Optional[Segment] = None) -> FormResult:
    """Form of the boundary plane moving in theta, evaluated on the boundary data of the basis."""
    orientation = segment.orientation if segment is not None else 1
    matrix = orientation * theta_form_matrix(record.basis.vectors, planes.n)
    return FormResult(matrix=matrix, signature=signature(matrix))


def crossing_form_t(record: CrossingRecord, planes: LagrangianPlanes,
                    segment: Optional[Segment] = None) -> FormResult:
    """
    Form of the rescaled solution plane moving in t:
    integral of y_i^T [2 t (V(t x) - r) + t^2 x V'(t x)] (x) I_2 y_j over [-L, L],
    with the boundary evaluation (L/t)[y^T (W(L) + W(-L)) y - 2 y'^T y'] at x = -L
    attached for cross-checking.

    Raises:
        PotentialError: the potential has no derivative
    """
    pot = planes.potential
    if not pot.differentiable:
        raise PotentialError(f"{pot.kind} potential has no derivative; the t-form needs V'")
    orientation = segment.orientation if segment is not None else 1
    lam = record.point[LAMBDA]
    t = record.point[SCALE]
    n = pot.n
    steps = FORM_OVERSAMPLE * planes.propagator.steps_for(lam, t)
    xs, y, dy = planes.solutions(lam, t, record.basis.vectors, steps)

    eye = np.eye(n)
    v = pot(t * xs)
    dv = pot.derivative(t * xs)
    weight = 2.0 * t * (v - lam * eye) + t * t * xs[:, None, None] * dv
    weight = np.kron(weight, np.eye(2))
    integrand = np.einsum("xci,xcd,xdj->xij", y, weight, y)
    matrix = simpson(integrand, x=xs, axis=0)
    matrix = orientation * 0.5 * (matrix + matrix.T)

    boundary = None
    if pot.is_symmetric_interval:
        big_l = pot.interval[1]
        w_ends = t * t * (pot(t * np.array([big_l, -big_l])) - lam * eye)
        w_sum = np.kron(w_ends[0] + w_ends[1], np.eye(2))
        y0, dy0 = y[0], dy[0]
        boundary = (big_l / t) * (y0.T @ w_sum @ y0 - 2.0 * dy0.T @ dy0)
        boundary = orientation * 0.5 * (boundary + boundary.T)
    return FormResult(matrix=matrix, signature=signature(matrix), boundary_matrix=boundary)


FORMS = {LAMBDA: crossing_form_lambda, THETA: crossing_form_theta, SCALE: crossing_form_t}


def contribution(sig: Tuple[int, int, int], position: str) -> int:
    """Signed count with endpoint rules: interior n_+ - n_-, start -n_-, end +n_+."""
    plus, _, minus = sig
    if position == START:
        return -minus
    if position == END:
        return plus
    return plus - minus


def _doubled(index: int, segment: Segment) -> int:
    return index if segment.plane_role == BOUNDARY_ROLE else -index


# ---------------------------------------------------------------------------
# Backends
# ---------------------------------------------------------------------------

def _segment_crossing_form(segment: Segment, seg_id: int, planes: LagrangianPlanes,
                           numerics: NumericsConfig) -> MaslovResult:
    if segment.length == 0.0:
        return MaslovResult(index=0, doubled_index=0, method=CROSSING_FORM,
                            diagnostics={"segment": segment.label})
    records = _segment_crossings(segment, seg_id, planes, numerics)
    form = FORMS[segment.variable]
    index = 0
    for rec in records:
        result = form(rec, planes, segment)
        rec.form_matrix = result.matrix
        rec.signature = result.signature
        rec.boundary_form_mismatch = result.boundary_mismatch
        if not rec.regular:
            logger.error(f"{segment.label}: non-regular crossing at s={rec.s_star:.12g}, "
                         f"signature {rec.signature}")
            raise CrossingError(
                f"{segment.label}: crossing at s={rec.s_star:.12g} is not regular "
                f"(signature {rec.signature})", record=rec,
            )
        mismatch = rec.boundary_form_mismatch
        if mismatch is not None and mismatch > numerics.form_agreement_tol:
            logger.error(f"{segment.label}: boundary and integral t-forms differ by "
                         f"{mismatch:.2e} at s={rec.s_star:.12g}")
            raise CrossingError(
                f"{segment.label}: boundary and integral t-forms differ by {mismatch:.2e} "
                f"at s={rec.s_star:.12g} (tolerance {numerics.form_agreement_tol:.1e})", record=rec,
            )
        rec.contribution = contribution(rec.signature, rec.position)
        index += rec.contribution
    logger.debug(f"{segment.label}: crossing-form index {index} from {len(records)} crossings")
    return MaslovResult(index=index, doubled_index=_doubled(index, segment), method=CROSSING_FORM,
                        crossings=records, diagnostics={"segment": segment.label})


class _SpectralFlowTracker:
    """Eigenphases of the doubled Souriau matrix along one segment."""

    def __init__(self, segment: Segment, planes: LagrangianPlanes):
        self.segment = segment
        self.planes = planes
        self.sp = _SegmentPlanes(segment, planes)
        self.delta = diagonal_plane(double_space(planes.space))

    def doubled_plane(self, s: float) -> LagrangianFrame:
        return direct_sum(self.sp.boundary(s), self.sp.solution(s))

    def phases(self, s: float) -> Tuple[np.ndarray, LagrangianFrame]:
        plane = self.doubled_plane(s)
        return eigenphases(souriau_map(self.delta, plane)), plane


def _circular(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.angle(np.exp(1j * (b - a)))


def _match(prev: np.ndarray, curr: np.ndarray) -> Tuple[np.ndarray, float]:
    """Reorder curr to follow prev by minimal circular motion; returns (matched, max motion)."""
    cost = np.abs(_circular(prev[:, None], curr[None, :]))
    _, cols = linear_sum_assignment(cost)
    matched = curr[cols]
    return matched, float(np.max(np.abs(_circular(prev, matched)))) if len(prev) else 0.0


def _choose_epsilon(prev: np.ndarray, matched: np.ndarray) -> Optional[float]:
    """A window edge in (0, pi/2) away from every arc swept inside the cell."""
    steps = _circular(prev, matched)
    candidates = np.linspace(0.02, math.pi / 2.0, 400)
    # offset of each candidate from each arc start, and from each arc end
    offset = _circular(prev[None, :], candidates[:, None])
    lo = np.minimum(0.0, steps)[None, :]
    hi = np.maximum(0.0, steps)[None, :]
    inside = (offset >= lo) & (offset <= hi)
    gap = np.minimum(np.abs(offset), np.abs(offset - steps[None, :]))
    dist = np.where(inside, 0.0, gap).min(axis=1) if len(prev) else np.full(len(candidates), np.inf)
    best = int(np.argmax(dist))
    if dist[best] < EPSILON_MARGIN:
        return None
    return float(candidates[best])


def _window_count(phases: np.ndarray, eps: float, phase_tol: float) -> int:
    return int(np.sum((phases >= -phase_tol) & (phases <= eps)))


def _segment_spectral_flow(segment: Segment, seg_id: int, planes: LagrangianPlanes,
                           numerics: NumericsConfig) -> MaslovResult:
    """
    Doubled index as the sum over partition cells of k(s_j, eps_j) - k(s_{j-1}, eps_j),
    with k counting eigenphases in [0, eps] measured from -1.
    """
    if segment.length == 0.0:
        return MaslovResult(index=0, doubled_index=0, method=SPECTRAL_FLOW,
                            diagnostics={"segment": segment.label, "cells": 0})
    tracker = _SpectralFlowTracker(segment, planes)
    s_values = segment.values(numerics.spectral_flow_cells)
    stack = [(float(s_values[j]), float(s_values[j + 1]), 0) for j in range(len(s_values) - 1)]
    stack.reverse()
    cache: Dict[float, Tuple[np.ndarray, LagrangianFrame]] = {}

    def at(s: float):
        if s not in cache:
            cache[s] = tracker.phases(s)
        return cache[s]

    doubled, cells, refinements = 0, 0, 0
    while stack:
        s0, s1, depth = stack.pop()
        ph0, plane0 = at(s0)
        ph1, plane1 = at(s1)
        matched, motion = _match(ph0, ph1)
        gap = plane_gap(plane0, plane1)
        eps = _choose_epsilon(ph0, matched) if motion <= MOTION_CAP and gap <= GAP_CAP else None
        if eps is None:
            if depth >= numerics.max_refinements:
                raise CrossingError(
                    f"{segment.label}: cannot separate the spectral window on "
                    f"[{s0:.12g}, {s1:.12g}] (motion {motion:.3f}, gap {gap:.3f}) "
                    f"after {depth} refinements"
                )
            mid = 0.5 * (s0 + s1)
            refinements += 1
            stack.append((mid, s1, depth + 1))
            stack.append((s0, mid, depth + 1))
            continue
        cells += 1
        doubled += _window_count(ph1, eps, numerics.phase_tol) - _window_count(ph0, eps, numerics.phase_tol)

    index = doubled if segment.plane_role == BOUNDARY_ROLE else -doubled
    logger.debug(f"{segment.label}: spectral-flow doubled index {doubled} over {cells} cells "
                 f"({refinements} refinements)")
    return MaslovResult(index=index, doubled_index=doubled, method=SPECTRAL_FLOW,
                        diagnostics={"segment": segment.label, "cells": cells,
                                     "refinements": refinements})


def _combine(results: List[MaslovResult], path: Union[PathSpec, Segment], method: str) -> MaslovResult:
    if isinstance(path, Segment):
        return results[0]
    doubled = sum(r.doubled_index for r in results)
    crossings = [c for r in results for c in r.crossings]
    return MaslovResult(
        index=doubled, doubled_index=doubled, method=method, crossings=crossings,
        diagnostics={
            "closed": path.closed,
            "segments": [
                {"label": seg.label, "index": r.index, "doubled_index": r.doubled_index,
                 **{k: v for k, v in r.diagnostics.items() if k != "segment"}}
                for seg, r in zip(path.segments, results)
            ],
        },
    )


def _run(path, planes, numerics, worker, threads: int) -> List[MaslovResult]:
    segs = _segments(path)
    if threads <= 1 or len(segs) == 1:
        return [worker(seg, i, planes, numerics) for i, seg in enumerate(segs)]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        futures = [executor.submit(worker, seg, i, planes, numerics) for i, seg in enumerate(segs)]
        return [f.result() for f in futures]


def maslov_crossing_form(path: Union[PathSpec, Segment], planes: LagrangianPlanes,
                         numerics: Optional[NumericsConfig] = None, threads: int = 1) -> MaslovResult:
    """
    Maslov index as the sum of crossing-form contributions.

    For a single segment, index is the index of the moving plane relative to
    the fixed one. For a path, index is the sum of doubled indices.

    Raises:
        CrossingError: a crossing is not regular
    """
    numerics = numerics or planes.numerics
    results = _run(path, planes, numerics, _segment_crossing_form, threads)
    return _combine(results, path, CROSSING_FORM)


def maslov_spectral_flow(path: Union[PathSpec, Segment], planes: LagrangianPlanes,
                         numerics: Optional[NumericsConfig] = None, threads: int = 1) -> MaslovResult:
    """Maslov index from the spectral flow of the doubled Souriau matrix through -1."""
    numerics = numerics or planes.numerics
    results = _run(path, planes, numerics, _segment_spectral_flow, threads)
    return _combine(results, path, SPECTRAL_FLOW)


def maslov_index(path: Union[PathSpec, Segment], planes: LagrangianPlanes,
                 backend: str = CROSSING_FORM, numerics: Optional[NumericsConfig] = None,
                 threads: int = 1) -> MaslovResult:
    """
    Maslov index with the selected backend; "both" runs the two backends and
    requires integer agreement on every segment.

    Raises:
        BackendMismatchError: the backends disagree on some segment
    """
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend '{backend}', expected one of {BACKENDS}")
    if backend == CROSSING_FORM:
        return maslov_crossing_form(path, planes, numerics, threads)
    if backend == SPECTRAL_FLOW:
        return maslov_spectral_flow(path, planes, numerics, threads)

    by_forms = maslov_crossing_form(path, planes, numerics, threads)
    by_flow = maslov_spectral_flow(path, planes, numerics, threads)
    if isinstance(path, Segment):
        pairs = [(path.label, by_forms.doubled_index, by_flow.doubled_index)]
    else:
        pairs = [(a["label"], a["doubled_index"], b["doubled_index"])
                 for a, b in zip(by_forms.diagnostics["segments"], by_flow.diagnostics["segments"])]
    for label, left, right in pairs:
        if left != right:
            logger.error(f"{label}: crossing-form index {left} != spectral-flow index {right}")
            raise BackendMismatchError(
                f"{label}: crossing-form doubled index {left} disagrees with spectral flow {right}"
            )
    by_forms.diagnostics["backends_agree"] = True
    by_forms.diagnostics["spectral_flow"] = by_flow.diagnostics
    return by_forms
