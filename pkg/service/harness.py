"""
Verification harness

Executable checks that compare Maslov indices of parameter rectangles with
eigenvalue counts from the spectral oracle, plus the derivative, monotonicity,
count-bound, realification and Souriau identities. Each check returns a
CheckReport; run_suite fans scenarios out over a thread pool and
exit_code folds the reports into the CLI contract.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from _types.config_types import NumericsConfig, RunConfig
from _types.data_models import (
    BOUNDARY_ROLE, LAMBDA, SCALE, THETA, Potential, Segment
)
from _types.errors import GuardBandError, MaslovError, ScenarioRejected
from _types.result_types import END, INTERIOR, START, CheckReport, CrossingRecord
from .maslov import find_crossings, maslov_index, rectangle_t, rectangle_theta
from .oracle import (
    branch_point, count_below, dlambda_dtheta, eigencurve, lambda_floor,
    morse, wronskian_check
)
from .potentials import (
    constant_potential, cosine_potential, mathieu_potential, potential_from_config
)
from .propagation import LagrangianPlanes, monodromy
from .symplectic import (
    intersect, make_standard_space, minus_one_multiplicity, random_lagrangian_pair,
    souriau_map
)

logger = logging.getLogger(__name__)

BOTH = "both"
PERTURBATION = 1e-4
HYPOTHESIS_SAMPLES = 101
DERIVATIVE_FORM_TOL = 1e-6
DERIVATIVE_FD_TOL = 1e-5
CRITICAL_TOL = 1e-8
WRONSKIAN_MIN = 1e-10
BISECTION_STEPS = 60

SUITES = (
    "theta-flow", "interval-flow", "bounds", "derivative", "monotone",
    "scaling-flow", "morse", "souriau", "realification",
)


class _CornerCrossing(MaslovError):
    """A conjugate point sits on a rectangle corner"""


def _crossing_summary(records: Sequence[CrossingRecord]) -> List[Dict[str, Any]]:
    return [
        {
            "segment_id": rec.segment_id, "s": rec.s_star, "point": dict(rec.point),
            "dim_real": rec.dim_real, "position": rec.position,
            "signature": list(rec.signature) if rec.signature is not None else None,
            "contribution": rec.contribution,
        }
        for rec in records
    ]


def _reject_corners(records: Sequence[CrossingRecord], where: str):
    for rec in records:
        if rec.position != INTERIOR:
            raise _CornerCrossing(f"{where}: crossing on a corner at s={rec.s_star:.12g}")


def _retry(claim_id: str, attempt: Callable[..., CheckReport], params: Dict[str, float],
           perturb: Callable[[Dict[str, float]], Dict[str, float]]) -> CheckReport:
    """Run attempt(**params); on a corner crossing or a guard-band hit, nudge once and retry."""
    try:
        return attempt(**params)
    except (GuardBandError, _CornerCrossing) as e:
        logger.warning(f"{claim_id}: {e}; perturbing by {PERTURBATION:g} and retrying")
        nudged = perturb(dict(params))
    try:
        report = attempt(**nudged)
    except (GuardBandError, _CornerCrossing) as e:
        raise ScenarioRejected(f"{claim_id}: {e} (after perturbation)") from e
    report.details["perturbed_from"] = params
    return report


def _planes(potential: Potential, numerics: NumericsConfig) -> LagrangianPlanes:
    return LagrangianPlanes(potential, numerics)


def _theta_segment(potential: Potential, theta1: float, theta2: float, r: float) -> Segment:
    path = rectangle_theta(theta1, theta2, r, lambda_floor(potential), floor=potential.floor)
    return path.segments[1]


def _half_index(result) -> float:
    return result.index / 2.0


# ---------------------------------------------------------------------------
# Count flow in theta
# ---------------------------------------------------------------------------

def check_theta_count_flow(potential: Potential, theta1: float, theta2: float, r: float,
                           numerics: Optional[NumericsConfig] = None, backend: str = BOTH,
                           full_rectangle: bool = True, threads: int = 1) -> CheckReport:
    """
    N(r, theta2) - N(r, theta1) against half the Maslov index of the top edge
    of the (lambda, theta) rectangle.

    With full_rectangle the whole loop is also evaluated: its doubled indices
    must sum to zero and the vertical edges must reproduce -2 N(r, theta1) and
    2 N(r, theta2).
    """
    numerics = numerics or NumericsConfig()
    planes = _planes(potential, numerics)

    def attempt(theta1: float, theta2: float, r: float) -> CheckReport:
        n1 = count_below(potential, theta1, r, numerics=numerics)
        n2 = count_below(potential, theta2, r, numerics=numerics)
        details: Dict[str, Any] = {"N_theta1": n1, "N_theta2": n2}
        if full_rectangle:
            path = rectangle_theta(theta1, theta2, r, lambda_floor(potential), floor=potential.floor)
            loop = maslov_index(path, planes, backend, numerics, threads)
            _reject_corners([c for c in loop.crossings if c.segment_id == 1], "Gamma_2")
            segments = loop.diagnostics["segments"]
            top = segments[1]["index"]
            details.update({
                "segments": segments, "loop_doubled_index": loop.doubled_index,
                "crossings": _crossing_summary(loop.crossings),
            })
            consistent = (loop.doubled_index == 0 and segments[0]["index"] == -2 * n1
                          and segments[2]["index"] == 2 * n2)
            details["rectangle_consistent"] = consistent
        else:
            edge = maslov_index(_theta_segment(potential, theta1, theta2, r), planes, backend, numerics, threads)
            _reject_corners(edge.crossings, "Gamma_2")
            top = edge.index
            details["crossings"] = _crossing_summary(edge.crossings)
            consistent = True
        lhs, rhs = n2 - n1, top / 2.0
        return CheckReport(
            claim_id="theta_count_flow",
            inputs={"kind": potential.kind, "n": potential.n, "theta1": theta1, "theta2": theta2, "r": r},
            lhs=lhs, rhs=rhs, passed=bool(lhs == rhs and consistent), details=details,
        )

    def perturb(params):
        params["r"] += PERTURBATION
        return params

    return _retry("theta_count_flow", attempt, {"theta1": theta1, "theta2": theta2, "r": r}, perturb)


def check_interval_count_flow(potential: Potential, theta1: float, theta2: float,
                              r1: float, r2: float, numerics: Optional[NumericsConfig] = None,
                              backend: str = BOTH, threads: int = 1) -> CheckReport:
    """N([r1, r2), theta2) - N([r1, r2), theta1) against the difference of the two top-edge half indices."""
    if not r1 < r2:
        raise ScenarioRejected(f"interval count flow needs r1 < r2, got ({r1}, {r2})")
    numerics = numerics or NumericsConfig()
    planes = _planes(potential, numerics)

    def attempt(theta1: float, theta2: float, r1: float, r2: float) -> CheckReport:
        counts = {
            (th, r): count_below(potential, th, r, numerics=numerics)
            for th in (theta1, theta2) for r in (r1, r2)
        }
        lhs = (counts[(theta2, r2)] - counts[(theta2, r1)]) - (counts[(theta1, r2)] - counts[(theta1, r1)])
        upper = maslov_index(_theta_segment(potential, theta1, theta2, r2), planes, backend, numerics, threads)
        lower = maslov_index(_theta_segment(potential, theta1, theta2, r1), planes, backend, numerics, threads)
        _reject_corners(upper.crossings + lower.crossings, "Gamma_2")
        rhs = _half_index(upper) - _half_index(lower)
        return CheckReport(
            claim_id="interval_count_flow",
            inputs={"kind": potential.kind, "n": potential.n, "theta1": theta1, "theta2": theta2,
                    "r1": r1, "r2": r2},
            lhs=lhs, rhs=rhs, passed=bool(lhs == rhs),
            details={"index_r1": lower.index, "index_r2": upper.index,
                     "crossings_r1": _crossing_summary(lower.crossings),
                     "crossings_r2": _crossing_summary(upper.crossings)},
        )

    def perturb(params):
        params["r1"] += PERTURBATION
        params["r2"] += PERTURBATION
        return params

    return _retry("interval_count_flow", attempt,
                  {"theta1": theta1, "theta2": theta2, "r1": r1, "r2": r2}, perturb)


# ---------------------------------------------------------------------------
# Count bounds
# ---------------------------------------------------------------------------

def _same_half(theta1: float, theta2: float) -> bool:
    lo, hi = sorted((theta1, theta2))
    return (0.0 < lo and hi < math.pi) or (math.pi < lo and hi < 2.0 * math.pi)


def check_count_bounds(potential: Potential, thetas: Sequence[float], levels: Sequence[float],
                       numerics: Optional[NumericsConfig] = None, kernel_scan: bool = True) -> CheckReport:
    """
    Bounds on count differences over a theta grid and a set of levels:
    |Delta N| <= 2n everywhere and <= n inside one half-circle; for intervals
    |Delta N| <= 4n and <= 2n. With kernel_scan, the theta scan at every level
    must see a total complex kernel dimension of at most 2n.
    """
    numerics = numerics or NumericsConfig()
    n = potential.n
    thetas = [float(th) for th in thetas]
    levels = sorted(float(r) for r in levels)
    try:
        table = np.array([[count_below(potential, th, r, numerics=numerics) for r in levels] for th in thetas])
    except GuardBandError as e:
        raise ScenarioRejected(f"count_bounds: {e}") from e

    violations: List[Dict[str, Any]] = []
    max_single, max_interval = 0, 0
    for i in range(len(thetas)):
        for j in range(i + 1, len(thetas)):
            half = _same_half(thetas[i], thetas[j])
            diff = table[j] - table[i]
            for k, r in enumerate(levels):
                bound = n if half else 2 * n
                max_single = max(max_single, abs(int(diff[k])))
                if abs(diff[k]) > bound:
                    violations.append({"theta1": thetas[i], "theta2": thetas[j], "r": r,
                                       "delta": int(diff[k]), "bound": bound})
            for k1 in range(len(levels)):
                for k2 in range(k1 + 1, len(levels)):
                    d = int(diff[k2] - diff[k1])
                    bound = 2 * n if half else 4 * n
                    max_interval = max(max_interval, abs(d))
                    if abs(d) > bound:
                        violations.append({"theta1": thetas[i], "theta2": thetas[j],
                                           "r1": levels[k1], "r2": levels[k2], "delta": d, "bound": bound})

    kernel_sums: Dict[str, int] = {}
    if kernel_scan:
        planes = _planes(potential, numerics)
        for r in levels:
            scan = Segment("theta_scan", THETA, 0.0, 2.0 * math.pi, {LAMBDA: r, SCALE: 1.0}, BOUNDARY_ROLE)
            records = find_crossings(scan, planes, numerics)
            total = sum(rec.dim_complex for rec in records if rec.position != END)
            kernel_sums[f"{r:.12g}"] = total
            if total > 2 * n:
                violations.append({"r": r, "kernel_sum": total, "bound": 2 * n})

    logger.info(f"Count bounds on {len(thetas)} thetas x {len(levels)} levels: {len(violations)} violations")
    return CheckReport(
        claim_id="count_bounds",
        inputs={"kind": potential.kind, "n": n, "thetas": thetas, "levels": levels},
        lhs=len(violations), rhs=0, passed=not violations,
        details={"violations": violations, "max_single": max_single,
                 "max_interval": max_interval, "kernel_sums": kernel_sums},
    )


# ---------------------------------------------------------------------------
# Derivative and monotonicity
# ---------------------------------------------------------------------------

def _open_half(theta_range: Tuple[float, float]):
    if not _same_half(*theta_range):
        raise ScenarioRejected(
            f"theta range {theta_range} must lie inside (0, pi) or inside (pi, 2 pi)"
        )


def check_derivative_formula(potential: Potential, branch: int, theta_range: Tuple[float, float],
                             points: int = 20, numerics: Optional[NumericsConfig] = None) -> CheckReport:
    """
    Boundary formula, negated theta crossing form and centered difference of
    d lambda / d theta along a branch.
    """
    numerics = numerics or NumericsConfig()
    _open_half(theta_range)
    step = abs(theta_range[1] - theta_range[0]) / max(1, points - 1)
    curve = eigencurve(potential, branch, theta_range, step, numerics=numerics)

    rows, form_gap, fd_gap = [], 0.0, 0.0
    for point in curve:
        boundary, form, centered = dlambda_dtheta(point, potential, numerics)
        scale = max(1.0, abs(point.lambda_k))
        form_gap = max(form_gap, abs(boundary - form) / scale)
        fd_gap = max(fd_gap, abs(boundary - centered) / scale, abs(form - centered) / scale)
        rows.append({"theta": point.theta, "lambda": point.lambda_k, "boundary": boundary,
                     "form": form, "centered": centered})
    passed = form_gap <= DERIVATIVE_FORM_TOL and fd_gap <= DERIVATIVE_FD_TOL
    return CheckReport(
        claim_id="derivative_formula",
        inputs={"kind": potential.kind, "n": potential.n, "branch": branch,
                "theta_range": list(theta_range), "points": len(curve)},
        lhs=max(form_gap, fd_gap), rhs=0.0, passed=bool(passed), tolerance=DERIVATIVE_FD_TOL,
        details={"rows": rows, "form_gap": form_gap, "fd_gap": fd_gap},
    )


def _slope(point) -> float:
    return 2.0 * float(np.imag(np.vdot(point.u_a, point.du_a)))


def _critical_theta(potential: Potential, left, right, branch: int,
                    numerics: NumericsConfig) -> Tuple[float, float]:
    """Bisect a sign change of the branch slope; returns (theta_*, |Im (u'(a), u(a))|)."""
    lo, hi = left, right
    s_lo = _slope(lo)
    for _ in range(BISECTION_STEPS):
        if hi.theta - lo.theta <= 1e-12:
            break
        mid_theta = 0.5 * (lo.theta + hi.theta)
        guess = 0.5 * (lo.lambda_k + hi.lambda_k)
        mid = branch_point(potential, mid_theta, guess, branch, numerics=numerics,
                           width=max(1e-8, abs(hi.lambda_k - lo.lambda_k)))
        if _slope(mid) * s_lo > 0.0:
            lo, s_lo = mid, _slope(mid)
        else:
            hi = mid
    best = lo if abs(_slope(lo)) <= abs(_slope(hi)) else hi
    return best.theta, abs(_slope(best)) / 2.0


def check_monotonicity(potential: Potential, branch: int, theta_range: Tuple[float, float],
                       points: int = 40, numerics: Optional[NumericsConfig] = None) -> CheckReport:
    """
    For n = 1 a simple branch is strictly monotone on a half-circle with a
    nonvanishing Wronskian. For n >= 2 every sign change of the slope brackets
    a theta_* with Im (u'(a), u(a)) = 0.
    """
    numerics = numerics or NumericsConfig()
    _open_half(theta_range)
    step = abs(theta_range[1] - theta_range[0]) / max(1, points - 1)
    curve = eigencurve(potential, branch, theta_range, step, numerics=numerics)
    slopes = np.array([_slope(p) for p in curve])
    steps = np.diff([p.lambda_k for p in curve])
    inputs = {"kind": potential.kind, "n": potential.n, "branch": branch,
              "theta_range": list(theta_range), "points": len(curve)}

    if potential.n == 1:
        wronskians = [wronskian_check(p, potential) for p in curve]
        signs = np.sign(slopes)
        monotone = bool(np.all(signs == signs[0]) and signs[0] != 0
                        and np.all(np.sign(steps) == signs[0]))
        min_w = float(np.min(np.abs(wronskians)))
        return CheckReport(
            claim_id="monotonicity", inputs=inputs,
            lhs=min_w, rhs=WRONSKIAN_MIN, passed=monotone and min_w > WRONSKIAN_MIN,
            details={"monotone": monotone, "min_abs_wronskian": min_w,
                     "slopes": slopes.tolist()},
        )

    critical = []
    for i in range(len(curve) - 1):
        if slopes[i] * slopes[i + 1] < 0.0:
            theta_star, residual = _critical_theta(potential, curve[i], curve[i + 1], branch, numerics)
            critical.append({"theta": theta_star, "im_boundary": residual})
    worst = max((c["im_boundary"] for c in critical), default=0.0)
    logger.info(f"Branch {branch} ({potential.kind}, n={potential.n}): {len(critical)} critical points")
    return CheckReport(
        claim_id="monotonicity", inputs=inputs,
        lhs=worst, rhs=0.0, passed=worst <= CRITICAL_TOL, tolerance=CRITICAL_TOL,
        details={"monotone": not critical, "critical_points": critical, "slopes": slopes.tolist()},
    )


# ---------------------------------------------------------------------------
# Rescaling
# ---------------------------------------------------------------------------

def _t_segment(potential: Potential, tau: float, r: float, theta: float) -> Segment:
    path = rectangle_t(tau, r, lambda_floor(potential), theta, floor=potential.floor)
    return path.segments[1]


def check_scaling_count_flow(potential: Potential, tau: float, theta: float, r: float,
                             r_low: Optional[float] = None, numerics: Optional[NumericsConfig] = None,
                             backend: str = BOTH, threads: int = 1) -> CheckReport:
    """
    N(r, tau) - N(r, 1) for the rescaled operators against half the Maslov
    index of the t edge. With r_low the interval version on [r_low, r) is
    checked as well.
    """
    numerics = numerics or NumericsConfig()
    planes = _planes(potential, numerics)

    def attempt(tau: float, theta: float, r: float, r_low: Optional[float] = None) -> CheckReport:
        n_tau = count_below(potential, theta, r, tau, numerics)
        n_one = count_below(potential, theta, r, 1.0, numerics)
        edge = maslov_index(_t_segment(potential, tau, r, theta), planes, backend, numerics, threads)
        _reject_corners(edge.crossings, "Sigma_2")
        lhs, rhs = n_tau - n_one, _half_index(edge)
        details: Dict[str, Any] = {"N_tau": n_tau, "N_one": n_one, "index": edge.index,
                                   "crossings": _crossing_summary(edge.crossings)}
        passed = lhs == rhs
        if r_low is not None:
            low_tau = count_below(potential, theta, r_low, tau, numerics)
            low_one = count_below(potential, theta, r_low, 1.0, numerics)
            low_edge = maslov_index(_t_segment(potential, tau, r_low, theta), planes, backend, numerics, threads)
            _reject_corners(low_edge.crossings, "Sigma_2")
            interval_lhs = (n_one - low_one) - (n_tau - low_tau)
            interval_rhs = _half_index(low_edge) - _half_index(edge)
            details.update({"interval_lhs": interval_lhs, "interval_rhs": interval_rhs,
                            "index_low": low_edge.index})
            passed = passed and interval_lhs == interval_rhs
        return CheckReport(
            claim_id="scaling_count_flow",
            inputs={"kind": potential.kind, "n": potential.n, "tau": tau, "theta": theta,
                    "r": r, "r_low": r_low},
            lhs=lhs, rhs=rhs, passed=bool(passed), details=details,
        )

    def perturb(params):
        params["r"] += PERTURBATION
        if params.get("r_low") is not None:
            params["r_low"] += PERTURBATION
        return params

    return _retry("scaling_count_flow", attempt,
                  {"tau": tau, "theta": theta, "r": r, "r_low": r_low}, perturb)


def morse_hypothesis(potential: Potential, tau: float) -> str:
    """
    Classify the rescaling as "nonpositive" or "positive" by sampling.

    Nonpositive: V <= 0 on the interval, or d/dt [t^2 V(t x)] <= 0 on the
    101 x 101 (t, x) grid over [tau, 1] x [-L, L]. Positive: d/dt [t^2 V(t x)] >= 0.

    Raises:
        ScenarioRejected: neither sign holds on the grid
    """
    big_l = potential.interval[1]
    xs = np.linspace(-big_l, big_l, HYPOTHESIS_SAMPLES)
    if np.max(np.linalg.eigvalsh(potential(xs))) <= 0.0:
        return "nonpositive"
    if not potential.differentiable:
        raise ScenarioRejected(f"{potential.kind} potential has no derivative to test the hypothesis")
    ts = np.linspace(tau, 1.0, HYPOTHESIS_SAMPLES)
    top, bottom = -np.inf, np.inf
    for t in ts:
        rate = 2.0 * t * potential(t * xs) + t * t * xs[:, None, None] * potential.derivative(t * xs)
        eig = np.linalg.eigvalsh(0.5 * (rate + np.swapaxes(rate, -1, -2)))
        top, bottom = max(top, float(eig.max())), min(bottom, float(eig.min()))
    if top <= 0.0:
        return "nonpositive"
    if bottom >= 0.0:
        return "positive"
    raise ScenarioRejected(
        f"d/dt [t^2 V(t x)] changes sign on [{tau:.6g}, 1] (range [{bottom:.3g}, {top:.3g}])"
    )


def check_morse_scaling(potential: Potential, tau: float, theta: float,
                        numerics: Optional[NumericsConfig] = None, backend: str = BOTH,
                        threads: int = 1) -> CheckReport:
    """
    Morse index change under rescaling against the kernel dimensions met on
    the t edge at level 0: over tau <= t < 1 in the nonpositive case, over
    tau < t <= 1 in the positive case. Every crossing form must have the sign
    the hypothesis predicts.
    """
    numerics = numerics or NumericsConfig()
    case = morse_hypothesis(potential, tau)
    planes = _planes(potential, numerics)

    def attempt(tau: float, theta: float) -> CheckReport:
        mor_one = morse(potential, theta, 1.0, numerics)
        mor_tau = morse(potential, theta, tau, numerics)
        edge = maslov_index(_t_segment(potential, tau, 0.0, theta), planes, backend, numerics, threads)
        _reject_corners(edge.crossings, "Sigma_2")
        if case == "nonpositive":
            lhs = mor_one - mor_tau
            rhs = sum(c.dim_complex for c in edge.crossings if c.position != END)
            definite = all(c.signature[0] == 0 and c.signature[1] == 0 for c in edge.crossings)
        else:
            lhs = mor_tau - mor_one
            rhs = sum(c.dim_complex for c in edge.crossings if c.position != START)
            definite = all(c.signature[2] == 0 and c.signature[1] == 0 for c in edge.crossings)
        return CheckReport(
            claim_id="morse_scaling",
            inputs={"kind": potential.kind, "n": potential.n, "tau": tau, "theta": theta},
            lhs=lhs, rhs=rhs, passed=bool(lhs == rhs and definite),
            details={"case": case, "mor_one": mor_one, "mor_tau": mor_tau, "index": edge.index,
                     "forms_definite": definite, "crossings": _crossing_summary(edge.crossings)},
        )

    def perturb(params):
        params["tau"] = min(1.0, params["tau"] + PERTURBATION)
        params["theta"] += PERTURBATION
        return params

    return _retry("morse_scaling", attempt, {"tau": tau, "theta": theta}, perturb)


# ---------------------------------------------------------------------------
# Linear-algebra identities
# ---------------------------------------------------------------------------

def check_realification(potential: Potential, theta1: float, theta2: float, r: float,
                        numerics: Optional[NumericsConfig] = None) -> CheckReport:
    """Every crossing of the rectangle has even dim_real equal to twice the monodromy kernel dimension."""
    numerics = numerics or NumericsConfig()
    planes = _planes(potential, numerics)
    path = rectangle_theta(theta1, theta2, r, lambda_floor(potential), floor=potential.floor)
    records = find_crossings(path, planes, numerics)
    mismatches = []
    for rec in records:
        t = rec.point.get(SCALE, 1.0)
        mono = monodromy(potential, rec.point[LAMBDA], t, numerics.integrator_tol)
        kernel = mono.kernel_dimension(rec.point[THETA])
        if rec.dim_real % 2 or rec.dim_real != 2 * kernel:
            mismatches.append({"point": dict(rec.point), "dim_real": rec.dim_real, "kernel": kernel})
    return CheckReport(
        claim_id="realification",
        inputs={"kind": potential.kind, "n": potential.n, "theta1": theta1, "theta2": theta2, "r": r},
        lhs=len(mismatches), rhs=0, passed=not mismatches,
        details={"crossings": len(records), "mismatches": mismatches},
    )


def check_souriau_identity(samples: int = 100, dims: Sequence[int] = (4, 8, 16),
                           seed: int = 0) -> CheckReport:
    """The -1 multiplicity of the Souriau matrix equals the rank-based intersection dimension."""
    rng = np.random.default_rng(seed)
    mismatches = []
    for i in range(samples):
        dim = int(dims[i % len(dims)])
        space = make_standard_space(dim // 2)
        k = int(rng.integers(0, dim // 2 + 1))
        x, y = random_lagrangian_pair(space, k, rng)
        by_rank = intersect(x, y).dim_real
        by_phase = minus_one_multiplicity(souriau_map(x, y))
        if not by_rank == by_phase == k:
            mismatches.append({"sample": i, "dim": dim, "k": k, "rank": by_rank, "souriau": by_phase})
    logger.info(f"Souriau identity on {samples} random pairs: {len(mismatches)} mismatches")
    return CheckReport(
        claim_id="souriau_identity", inputs={"samples": samples, "dims": list(dims), "seed": seed},
        lhs=len(mismatches), rhs=0, passed=not mismatches, details={"mismatches": mismatches},
    )


# ---------------------------------------------------------------------------
# Scenarios and suites
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    """One check invocation"""
    suite: str
    check: Callable[..., CheckReport]
    kwargs: Dict[str, Any] = field(default_factory=dict)


def _random_symmetric(n: int, rng: np.random.Generator, scale: float) -> np.ndarray:
    a = rng.normal(scale=scale, size=(n, n))
    return 0.5 * (a + a.T)


def preset_pool(rng: np.random.Generator, interval: Tuple[float, float] = (0.0, 2.0 * math.pi)) -> List[Potential]:
    """Constant, diagonal-cosine and Mathieu-type potentials for n in {1, 2}."""
    pool = [mathieu_potential(2.0, 1, interval)]
    for n in (1, 2):
        pool.append(constant_potential(_random_symmetric(n, rng, 1.0), interval))
        amps = rng.uniform(-2.0, 2.0, size=n)
        freqs = rng.integers(1, 3, size=n).astype(float)
        coupling = None if n == 1 else 0.5 * np.array([[0.0, 1.0], [1.0, 0.0]])
        pool.append(cosine_potential(amps, freqs, interval, coupling=coupling))
    return pool


def _sorted_thetas(rng: np.random.Generator) -> Tuple[float, float]:
    a, b = sorted(rng.uniform(0.0, 2.0 * math.pi, size=2))
    return float(a), float(b)


def _level(potential: Potential, rng: np.random.Generator) -> float:
    return float(rng.uniform(-potential.v_max + 0.1, potential.v_max + 4.0))


def build_scenarios(suite: str, config: RunConfig, random_scenarios: int = 50) -> List[Scenario]:
    """Closed-form scenarios plus seeded random ones for one suite (or "all")."""
    if suite == "all":
        return [s for name in SUITES for s in build_scenarios(name, config, random_scenarios)]
    if suite not in SUITES:
        raise ValueError(f"unknown suite '{suite}', expected one of {SUITES + ('all',)}")

    rng = np.random.default_rng(config.seed)
    numerics = config.numerics
    free = constant_potential(0.0, (0.0, 2.0 * math.pi))
    pool = preset_pool(rng)
    configured = potential_from_config(config.potential)
    pool.append(configured)
    out: List[Scenario] = []

    if suite == "theta-flow":
        out.append(Scenario(suite, check_theta_count_flow,
                            {"potential": free, "theta1": math.pi / 4, "theta2": math.pi / 2, "r": 0.6}))
        out.append(Scenario(suite, check_theta_count_flow,
                            {"potential": free, "theta1": math.pi / 4, "theta2": math.pi / 2, "r": 1.0}))
        for i in range(random_scenarios):
            pot = pool[i % len(pool)]
            theta1, theta2 = _sorted_thetas(rng)
            out.append(Scenario(suite, check_theta_count_flow,
                                {"potential": pot, "theta1": theta1, "theta2": theta2, "r": _level(pot, rng)}))
    elif suite == "interval-flow":
        out.append(Scenario(suite, check_interval_count_flow,
                            {"potential": free, "theta1": math.pi / 4, "theta2": math.pi / 2,
                             "r1": 0.3, "r2": 0.6}))
        for i in range(max(1, random_scenarios // 5)):
            pot = pool[i % len(pool)]
            theta1, theta2 = _sorted_thetas(rng)
            r1, r2 = sorted((_level(pot, rng), _level(pot, rng)))
            out.append(Scenario(suite, check_interval_count_flow,
                                {"potential": pot, "theta1": theta1, "theta2": theta2, "r1": r1, "r2": r2}))
    elif suite == "bounds":
        thetas = [(j + 0.5) * 2.0 * math.pi / 20 for j in range(20)]
        for pot in [free] + pool:
            levels = sorted(float(r) for r in rng.uniform(-pot.v_max + 0.1, pot.v_max + 4.0, size=5))
            out.append(Scenario(suite, check_count_bounds,
                                {"potential": pot, "thetas": thetas, "levels": levels}))
    elif suite == "derivative":
        for pot in (free, mathieu_potential(2.0, 1, (0.0, 2.0 * math.pi))):
            for branch in (0, 1):
                out.append(Scenario(suite, check_derivative_formula,
                                    {"potential": pot, "branch": branch, "theta_range": (0.1, math.pi - 0.1)}))
    elif suite == "monotone":
        for pot in (free, mathieu_potential(2.0, 1, (0.0, 2.0 * math.pi))):
            for rng_range in ((0.1, math.pi - 0.1), (math.pi + 0.1, 2.0 * math.pi - 0.1)):
                out.append(Scenario(suite, check_monotonicity,
                                    {"potential": pot, "branch": 0, "theta_range": rng_range}))
        coupled = cosine_potential([1.0, -1.0], [1.0, 1.0], (0.0, 2.0 * math.pi),
                                   coupling=[[0.0, 0.3], [0.3, 0.0]])
        out.append(Scenario(suite, check_monotonicity,
                            {"potential": coupled, "branch": 1, "theta_range": (0.1, math.pi - 0.1)}))
    elif suite == "scaling-flow":
        sym = (-math.pi, math.pi)
        scaled_pool = [constant_potential(-5.0, sym), mathieu_potential(2.0, 1, sym),
                       cosine_potential([-2.0], [1.0], sym, offset=[[-2.0]])]
        if configured.is_symmetric_interval:
            scaled_pool.append(configured)
        out.append(Scenario(suite, check_scaling_count_flow,
                            {"potential": scaled_pool[0], "tau": 0.3, "theta": 0.0, "r": -0.5}))
        out.append(Scenario(suite, check_scaling_count_flow,
                            {"potential": scaled_pool[1], "tau": 0.5, "theta": 1.0, "r": 0.0}))
        for i in range(10):
            pot = scaled_pool[i % len(scaled_pool)]
            r = _level(pot, rng)
            out.append(Scenario(suite, check_scaling_count_flow,
                                {"potential": pot, "tau": float(rng.uniform(0.2, 1.0)),
                                 "theta": float(rng.uniform(0.0, 2.0 * math.pi)), "r": r,
                                 "r_low": max(r - float(rng.uniform(0.5, 2.0)), -pot.v_max - 0.5)}))
    elif suite == "morse":
        sym = (-math.pi, math.pi)
        out.append(Scenario(suite, check_morse_scaling,
                            {"potential": constant_potential(-5.0, sym), "tau": 0.3, "theta": 0.0}))
        out.append(Scenario(suite, check_morse_scaling,
                            {"potential": constant_potential(-5.0, sym), "tau": 0.95, "theta": 0.0}))
        out.append(Scenario(suite, check_morse_scaling,
                            {"potential": cosine_potential([-1.0], [1.0], sym, offset=[[-2.0]]),
                             "tau": 0.4, "theta": 1.0}))
    elif suite == "souriau":
        out.append(Scenario(suite, check_souriau_identity, {"samples": 100, "seed": config.seed}))
    elif suite == "realification":
        for i in range(max(1, random_scenarios // 10)):
            pot = pool[i % len(pool)]
            theta1, theta2 = _sorted_thetas(rng)
            out.append(Scenario(suite, check_realification,
                                {"potential": pot, "theta1": theta1, "theta2": theta2, "r": _level(pot, rng)}))

    for scenario in out:
        if scenario.check is not check_souriau_identity:
            scenario.kwargs.setdefault("numerics", numerics)
    return out


def _run_one(scenario: Scenario) -> CheckReport:
    try:
        report = scenario.check(**scenario.kwargs)
    except ScenarioRejected as e:
        logger.warning(f"{scenario.suite}: scenario rejected: {e}")
        return CheckReport(claim_id=scenario.suite, inputs=_describe(scenario.kwargs), lhs=math.nan,
                           rhs=math.nan, passed=False, rejected=True, details={"error": str(e)})
    except MaslovError as e:
        logger.error(f"{scenario.suite}: check failed with {type(e).__name__}: {e}")
        return CheckReport(claim_id=scenario.suite, inputs=_describe(scenario.kwargs), lhs=math.nan,
                           rhs=math.nan, passed=False,
                           details={"error": str(e), "error_type": type(e).__name__})
    if not report.passed:
        logger.error(f"{report.claim_id} failed: lhs={report.lhs}, rhs={report.rhs}, inputs={report.inputs}")
    return report


def _describe(kwargs: Dict[str, Any]) -> Dict[str, Any]:
    out = {}
    for key, value in kwargs.items():
        if isinstance(value, Potential):
            out[key] = {"kind": value.kind, "n": value.n, "interval": list(value.interval)}
        elif not isinstance(value, NumericsConfig):
            out[key] = value
    return out


def run_suite(suite: str, config: RunConfig, random_scenarios: int = 50) -> List[CheckReport]:
    """Run every scenario of a suite; reports come back in scenario order."""
    scenarios = build_scenarios(suite, config, random_scenarios)
    logger.info(f"Running suite '{suite}': {len(scenarios)} scenarios on {config.threads} threads")
    if config.threads <= 1:
        reports = [_run_one(s) for s in scenarios]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as executor:
            reports = list(executor.map(_run_one, scenarios))
    passed = sum(r.passed for r in reports)
    logger.info(f"Suite '{suite}': {passed}/{len(reports)} passed")
    return reports


def exit_code(reports: Sequence[CheckReport]) -> int:
    """0 when every report passed, 1 on any failure, 2 when the only problems are rejected scenarios."""
    if any(not r.passed and not r.rejected for r in reports):
        return 1
    if any(r.rejected for r in reports):
        return 2
    return 0
