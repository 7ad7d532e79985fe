import math

import numpy as np
import pytest

from conftest import PERIOD, free_eigenvalues
from _types.errors import BranchError, GuardBandError, OracleError
from _types.result_types import FINITE_DIFFERENCE, MONODROMY_ROOTS, EigencurvePoint
from service.oracle import (
    bands, branch_point, count_below, count_interval, dlambda_dtheta, eigencurve, fd_spectrum,
    floquet_spectrum, lambda_floor, morse, wronskian_check
)
from service.potentials import constant_potential, cosine_potential, mathieu_potential

TOL = 1e-9
SLOPE = 1.0 / (4.0 * math.pi)


def assert_allclose(arr1, arr2, atol=TOL):
    np.testing.assert_allclose(arr1, arr2, rtol=0., atol=atol)


@pytest.mark.parametrize("theta", [math.pi / 4.0, math.pi / 2.0, 3.0 * math.pi / 4.0])
def test_floquet_free_spectrum(free, numerics, theta):
    expected = free_eigenvalues(theta, 6)
    result = floquet_spectrum(free, theta, window=(-1.0, expected[-1] + 0.5), numerics=numerics)
    assert result.method == MONODROMY_ROOTS
    assert all(mult == 1 for _, mult in result.eigenvalues)
    assert_allclose(result.values, expected)


def test_floquet_double_roots(free, numerics):
    result = floquet_spectrum(free, 0.0, window=(-1.0, 1.5), numerics=numerics)
    assert [mult for _, mult in result.eigenvalues] == [1, 2]
    assert_allclose([lam for lam, _ in result.eigenvalues], [0.0, 1.0], atol=1e-8)


def test_fd_spectrum_free(free):
    result = fd_spectrum(free, math.pi / 2.0, cutoff=2.0)
    assert result.method == FINITE_DIFFERENCE
    np.testing.assert_allclose(result.values, free_eigenvalues(math.pi / 2.0, 3), rtol=1e-4)


def test_fd_spectrum_guards(free):
    with pytest.raises(OracleError):
        fd_spectrum(free, 0.5, grid=32, cutoff=1.0)
    with pytest.raises(OracleError):
        fd_spectrum(free, 0.5, grid=200, cutoff=1e7)


def test_lambda_floor(mathieu):
    assert lambda_floor(mathieu) == pytest.approx(-3.0)


@pytest.mark.parametrize("theta, r, expected", [
    (math.pi / 2.0, 1.0, 2),
    (math.pi / 4.0, 0.6, 1),
    (math.pi / 2.0, 0.6, 2),
    (0.0, 0.5, 1),
    (0.0, 1.2, 3),
])
def test_count_below_free(free, numerics, theta, r, expected):
    assert count_below(free, theta, r, numerics=numerics) == expected


def test_count_below_guard_band(free, numerics):
    with pytest.raises(GuardBandError):
        count_below(free, math.pi / 2.0, 1.0 / 16.0, numerics=numerics)


def test_count_interval(free, numerics):
    assert count_interval(free, math.pi / 2.0, 0.3, 0.6, numerics=numerics) == 1
    with pytest.raises(OracleError):
        count_interval(free, math.pi / 2.0, 0.6, 0.3, numerics=numerics)


def test_count_two_channels(numerics):
    pot = constant_potential([[0.0, 0.0], [0.0, 10.0]], PERIOD)
    assert count_below(pot, math.pi / 2.0, 1.0, numerics=numerics) == 2


def test_morse_indices_of_well(well, numerics):
    # k^2 - 5 for integer k on [-pi, pi]
    assert morse(well, 0.0, numerics=numerics) == 5
    assert morse(well, 0.0, 0.3, numerics=numerics) == 1


def test_branch_point_and_derivative(free, numerics):
    point = branch_point(free, math.pi / 2.0, 0.06, numerics=numerics)
    assert point.lambda_k == pytest.approx(1.0 / 16.0, abs=1e-12)
    assert point.simple
    boundary, form, centered = dlambda_dtheta(point, free, numerics)
    assert boundary == pytest.approx(SLOPE, abs=1e-8)
    assert form == pytest.approx(SLOPE, abs=1e-8)
    assert centered == pytest.approx(SLOPE, abs=1e-6)
    assert wronskian_check(point, free) == pytest.approx(-SLOPE, abs=1e-8)


def test_wronskian_needs_one_channel(free2):
    point = EigencurvePoint(theta=1.0, lambda_k=0.1, u_a=np.ones(2, dtype=complex),
                            du_a=np.ones(2, dtype=complex))
    with pytest.raises(OracleError):
        wronskian_check(point, free2)


def test_branch_point_two_channels(numerics):
    pot = constant_potential([[0.0, 0.0], [0.0, 0.5]], PERIOD)
    point = branch_point(pot, math.pi / 2.0, 0.06, numerics=numerics)
    assert point.u_a.shape == (2,)
    # the eigenfunction lives in the free channel
    assert abs(point.u_a[1]) < 1e-8
    boundary, form, _ = dlambda_dtheta(point, pot, numerics)
    assert boundary == pytest.approx(SLOPE, abs=1e-8)
    assert form == pytest.approx(SLOPE, abs=1e-8)


def test_eigencurve_free_branch(free, numerics):
    points = eigencurve(free, 0, (0.2, 1.0), 0.2, numerics=numerics)
    thetas = np.array([p.theta for p in points])
    assert_allclose(thetas, np.linspace(0.2, 1.0, 5), atol=1e-12)
    assert_allclose([p.lambda_k for p in points], (thetas / (2.0 * math.pi)) ** 2)
    assert all(p.branch == 0 and p.simple for p in points)


def test_eigencurve_rejects_degenerate_start(free, numerics):
    with pytest.raises(BranchError):
        eigencurve(free, 1, (0.0, 0.5), 0.1, numerics=numerics)


def test_bands_free(free, numerics):
    edges = bands(free, 3, numerics)
    assert_allclose(np.array(edges), [[0.0, 0.25], [0.25, 1.0], [1.0, 2.25]], atol=1e-8)


def test_bands_mathieu_gap(mathieu, numerics):
    edges = bands(mathieu, 2, numerics)
    assert edges[0][0] < edges[0][1] < edges[1][0] - 1e-3
    with pytest.raises(OracleError):
        bands(mathieu, 0, numerics)


def coupled_cosine():
    return cosine_potential([1.0, -0.5], [1.0, 2.0], PERIOD, coupling=[[0.0, 0.3], [0.3, 0.0]])


@pytest.mark.parametrize("theta", [0.7, 2.0])
@pytest.mark.parametrize("build", [lambda: mathieu_potential(2.0, 1, PERIOD), coupled_cosine],
                         ids=["mathieu", "coupled"])
def test_floquet_conjugation_symmetry(numerics, theta, build):
    pot = build()
    window = (lambda_floor(pot), 3.0)
    forward = floquet_spectrum(pot, theta, window=window, numerics=numerics)
    mirrored = floquet_spectrum(pot, 2.0 * math.pi - theta, window=window, numerics=numerics)
    assert len(forward.values) == len(mirrored.values) > 0
    assert_allclose(forward.values, mirrored.values, atol=1e-8)


@pytest.mark.parametrize("theta", [0.4, math.pi / 2.0, 2.5])
def test_fd_matches_floquet_on_mathieu(mathieu, numerics, theta):
    cutoff = 3.0
    roots = floquet_spectrum(mathieu, theta, window=(lambda_floor(mathieu), cutoff), numerics=numerics)
    grid = fd_spectrum(mathieu, theta, grid=2000, cutoff=cutoff)
    assert len(grid.values) == len(roots.values) > 0
    np.testing.assert_allclose(grid.values, roots.values, rtol=1e-4, atol=1e-5)
