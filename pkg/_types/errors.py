from typing import Optional, Tuple


class MaslovError(Exception):
    """Base class for every error raised by this package"""


class SymplecticError(MaslovError, ValueError):
    """Wrong space kind or mismatched shapes"""


class NonLagrangianError(MaslovError, ValueError):
    """A frame failed the rank, isotropy or unitarity checks"""


class BorderlineRankError(MaslovError, RuntimeError):
    """A singular value fell inside the tolerance window around the rank threshold.

    Callers are expected to refine (move the parameter, tighten the integrator)
    rather than accept a rounded rank.
    """

    def __init__(self, value: float, threshold: float, interval: Optional[Tuple[float, float]] = None):
        self.value = value
        self.threshold = threshold
        self.interval = interval
        where = f" on s-interval [{interval[0]:.12g}, {interval[1]:.12g}]" if interval else ""
        super().__init__(
            f"Singular value {value:.3e} is within a factor 10 of the rank threshold {threshold:.3e}{where}"
        )


class PotentialError(MaslovError, ValueError):
    """Invalid potential data"""


class PropagationError(MaslovError, RuntimeError):
    """The propagator could not reach the requested tolerance"""


class PathError(MaslovError, ValueError):
    """Invalid parameter path"""


class CrossingError(MaslovError, RuntimeError):
    """A crossing could not be localized or is not regular"""

    def __init__(self, message: str, record=None):
        self.record = record
        super().__init__(message)


class BackendMismatchError(MaslovError, RuntimeError):
    """Crossing-form and spectral-flow indices disagree"""


class OracleError(MaslovError, RuntimeError):
    """Spectral oracle failure"""


class GuardBandError(OracleError):
    """A counting level sits within the guard band of an eigenvalue"""

    def __init__(self, level: float, eigenvalue: float, guard: float):
        self.level = level
        self.eigenvalue = eigenvalue
        self.guard = guard
        super().__init__(
            f"Level {level:.12g} is within {guard:.1e} of the eigenvalue {eigenvalue:.12g}"
        )


class BranchError(OracleError):
    """An eigencurve lost simplicity"""

    def __init__(self, theta: float, message: str):
        self.theta = theta
        super().__init__(f"Branch not simple at theta={theta:.12g}: {message}")


class ScenarioRejected(MaslovError, ValueError):
    """A verification scenario violates its hypothesis or guards"""
