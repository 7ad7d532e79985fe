"""
Potential presets

Builds symmetric matrix potentials V on [a, b] from configuration: constant
matrices, diagonal cosines with optional symmetric offset and coupling, the
Mathieu-type amplitude * cos(x) * I_n, and cubic-spline interpolated grids
loaded from CSV.
"""

import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import CubicSpline

from _types.config_types import PotentialConfig
from _types.data_models import Potential
from _types.errors import PotentialError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12
VMAX_SAMPLES = 2001


def _check_samples(values: np.ndarray, name: str):
    if not np.all(np.isfinite(values)):
        raise PotentialError(f"{name}: potential has non-finite samples")
    asym = float(np.max(np.abs(values - np.swapaxes(values, -1, -2))))
    if asym > SYMMETRY_TOL:
        raise PotentialError(f"{name}: potential is not symmetric (max |V - V^T| = {asym:.3e})")


def _sample_norm(values: Callable[[np.ndarray], np.ndarray], interval: Tuple[float, float],
                 name: str) -> float:
    """max ||V(x)||_2 over a uniform sample grid, after the symmetry check"""
    xs = np.linspace(interval[0], interval[1], VMAX_SAMPLES)
    samples = values(xs)
    _check_samples(samples, name)
    return float(np.max(np.abs(np.linalg.eigvalsh(samples))))


def _build(n: int, interval: Tuple[float, float], kind: str,
           values: Callable[[np.ndarray], np.ndarray],
           derivative: Optional[Callable[[np.ndarray], np.ndarray]],
           params: dict, sample_interval: Optional[Tuple[float, float]] = None) -> Potential:
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise PotentialError(f"interval must satisfy a < b, got ({a}, {b})")
    v_max = _sample_norm(values, sample_interval or (a, b), kind)
    logger.debug(f"Built {kind} potential: n={n}, interval=({a:.6g}, {b:.6g}), v_max={v_max:.6g}")
    return Potential(n=n, interval=(a, b), kind=kind, values=values,
                     derivative=derivative, v_max=v_max, params=params)


def constant_potential(matrix, interval: Tuple[float, float]) -> Potential:
    """V(x) = C for a symmetric matrix C (a scalar means a 1 x 1 matrix)."""
    c = np.atleast_2d(np.asarray(matrix, dtype=float))
    if c.shape[0] != c.shape[1]:
        raise PotentialError(f"constant potential must be square, got {c.shape}")
    n = c.shape[0]

    def values(x: np.ndarray) -> np.ndarray:
        return np.broadcast_to(c, (x.shape[0], n, n)).copy()

    def derivative(x: np.ndarray) -> np.ndarray:
        return np.zeros((x.shape[0], n, n))

    return _build(n, interval, "constant", values, derivative, {"matrix": c.tolist()})


def free_potential(n: int, interval: Tuple[float, float]) -> Potential:
    return constant_potential(np.zeros((n, n)), interval)


def cosine_potential(amplitudes: Sequence[float], frequencies: Sequence[float],
                     interval: Tuple[float, float], offset=None, coupling=None,
                     coupling_frequency: float = 1.0) -> Potential:
    """
    V(x) = offset + diag(A_k cos(w_k x)) + coupling * cos(w_c x).

    Args:
        amplitudes: A_k, one per channel
        frequencies: w_k, one per channel
        interval: (a, b)
        offset: optional symmetric constant matrix
        coupling: optional symmetric matrix multiplying cos(w_c x)
        coupling_frequency: w_c
    """
    amps = np.asarray(amplitudes, dtype=float)
    freqs = np.asarray(frequencies, dtype=float)
    if amps.shape != freqs.shape or amps.ndim != 1:
        raise PotentialError("amplitudes and frequencies must be 1-d of equal length")
    n = amps.shape[0]
    off = np.zeros((n, n)) if offset is None else np.asarray(offset, dtype=float)
    cpl = np.zeros((n, n)) if coupling is None else np.asarray(coupling, dtype=float)
    if off.shape != (n, n) or cpl.shape != (n, n):
        raise PotentialError(f"offset and coupling must be {n}x{n}")
    wc = float(coupling_frequency)

    def values(x: np.ndarray) -> np.ndarray:
        diag = amps[None, :] * np.cos(np.outer(x, freqs))
        out = off[None, :, :] + np.cos(wc * x)[:, None, None] * cpl[None, :, :]
        out = out + diag[:, :, None] * np.eye(n)[None, :, :]
        return out

    def derivative(x: np.ndarray) -> np.ndarray:
        diag = -(amps * freqs)[None, :] * np.sin(np.outer(x, freqs))
        out = -wc * np.sin(wc * x)[:, None, None] * cpl[None, :, :]
        return out + diag[:, :, None] * np.eye(n)[None, :, :]

    params = {
        "amplitudes": amps.tolist(), "frequencies": freqs.tolist(),
        "offset": off.tolist(), "coupling": cpl.tolist(), "coupling_frequency": wc,
    }
    return _build(n, interval, "diagonal_cosine", values, derivative, params)


def mathieu_potential(amplitude: float, n: int, interval: Tuple[float, float]) -> Potential:
    """V(x) = amplitude * cos(x) * I_n"""
    pot = cosine_potential([amplitude] * n, [1.0] * n, interval)
    return Potential(n=pot.n, interval=pot.interval, kind="mathieu", values=pot.values,
                     derivative=pot.derivative, v_max=pot.v_max,
                     params={"amplitude": float(amplitude)})


def _unpack_upper(row_values: np.ndarray, n: int) -> np.ndarray:
    """Columns v_11, v_12, ..., v_nn (upper triangle, row-major) to full symmetric matrices."""
    k = row_values.shape[0]
    out = np.zeros((k, n, n))
    iu = np.triu_indices(n)
    out[:, iu[0], iu[1]] = row_values
    out[:, iu[1], iu[0]] = row_values
    return out


def grid_potential(xs: np.ndarray, samples: np.ndarray) -> Potential:
    """
    Cubic-spline potential through samples (k, n, n) at strictly increasing xs.
    V' comes from the spline, so the result is differentiable.
    """
    xs = np.asarray(xs, dtype=float)
    samples = np.asarray(samples, dtype=float)
    if xs.ndim != 1 or xs.shape[0] < 4:
        raise PotentialError("grid potential needs at least 4 sample points")
    if np.any(np.diff(xs) <= 0):
        raise PotentialError("grid points must be strictly increasing")
    if samples.ndim != 3 or samples.shape[0] != xs.shape[0] or samples.shape[1] != samples.shape[2]:
        raise PotentialError(f"grid samples must have shape (k, n, n), got {samples.shape}")
    _check_samples(samples, "grid")
    n = samples.shape[1]
    spline = CubicSpline(xs, samples, axis=0)
    dspline = spline.derivative()

    def values(x: np.ndarray) -> np.ndarray:
        out = spline(x)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    def derivative(x: np.ndarray) -> np.ndarray:
        out = dspline(x)
        return 0.5 * (out + np.swapaxes(out, -1, -2))

    return _build(n, (xs[0], xs[-1]), "grid", values, derivative, {"points": int(xs.shape[0])})


def load_grid_potential(path: str, n: int, interval: Optional[Tuple[float, float]] = None) -> Potential:
    """
    Load a grid potential from CSV with columns x, v_11, v_12, ..., v_nn.

    The interval defaults to the first and last x; when given it must match them.
    """
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError) as e:
        logger.error(f"Failed to read grid potential {path}: {e}")
        raise PotentialError(f"cannot read grid potential '{path}': {e}") from e

    columns = ["x"] + [f"v_{i + 1}{j + 1}" for i in range(n) for j in range(i, n)]
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise PotentialError(f"grid file '{path}' is missing columns {missing}")
    frame = frame.sort_values("x")
    xs = frame["x"].to_numpy(dtype=float)
    samples = _unpack_upper(frame[columns[1:]].to_numpy(dtype=float), n)

    pot = grid_potential(xs, samples)
    if interval is not None and not np.allclose(pot.interval, interval, rtol=0.0, atol=1e-12):
        raise PotentialError(
            f"grid spans {pot.interval} but the configured interval is {tuple(interval)}"
        )
    logger.info(f"Loaded grid potential from {path}: {xs.shape[0]} points, n={n}")
    return pot


def potential_from_config(config: PotentialConfig) -> Potential:
    """Build the configured preset."""
    interval = tuple(config.interval)
    if config.preset == "free":
        return free_potential(config.n, interval)
    if config.preset == "constant":
        return constant_potential(config.matrix, interval)
    if config.preset == "diagonal_cosine":
        return cosine_potential(config.amplitudes, config.frequencies, interval,
                                offset=config.offset, coupling=config.coupling,
                                coupling_frequency=config.coupling_frequency)
    if config.preset == "mathieu":
        return mathieu_potential(config.amplitude, config.n, interval)
    if config.preset == "grid":
        return load_grid_potential(config.grid_path, config.n, interval)
    raise PotentialError(f"unknown preset '{config.preset}'")

