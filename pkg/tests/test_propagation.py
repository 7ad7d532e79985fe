import math

import numpy as np
import pytest

from _types.errors import PotentialError, PropagationError
from service.propagation import (
    LagrangianPlanes, SchrodingerPropagator, boundary_plane, monodromy, propagate_fundamental,
    realify_matrix, rescaled_system, trace_plane
)
from service.symplectic import intersect, is_lagrangian, make_standard_space

TOL = 1e-8


def assert_allclose(arr1, arr2, atol=TOL):
    np.testing.assert_allclose(arr1, arr2, rtol=0., atol=atol)


def free_transfer(lam, length):
    w = math.sqrt(lam)
    return np.array([[math.cos(w * length), math.sin(w * length) / w],
                     [-w * math.sin(w * length), math.cos(w * length)]])


@pytest.mark.parametrize("lam", [0.25, 1.0 / 16.0, 2.3])
def test_free_monodromy_closed_form(free, lam):
    mono = monodromy(free, lam)
    assert_allclose(mono.matrix, free_transfer(lam, 2.0 * math.pi))


def test_free_monodromy_below_zero(free):
    length = 2.0 * math.pi
    expected = np.array([[math.cosh(length), math.sinh(length)],
                         [math.sinh(length), math.cosh(length)]])
    np.testing.assert_allclose(monodromy(free, -1.0).matrix.real, expected, rtol=1e-8)


def test_monodromy_unimodular(mathieu):
    for lam in (-1.5, 0.3, 4.0):
        assert abs(monodromy(mathieu, lam).determinant - 1.0) < 1e-8


def test_monodromy_of_real_potential_is_real(mathieu):
    mono = monodromy(mathieu, 0.7)
    assert mono.matrix.dtype == complex
    assert_allclose(mono.matrix.imag, np.zeros((2, 2)), atol=0.0)
    # a real propagator maps conjugate data to conjugate data
    data = np.array([1.0 + 2.0j, -0.5j])
    assert_allclose(mono.matrix @ data.conj(), (mono.matrix @ data).conj(), atol=1e-14)


@pytest.mark.parametrize("lam", [-1.5, 0.0, 1.3])
def test_realified_propagator_is_symplectic(mathieu, numerics, lam):
    tol = numerics.integrator_tol
    phi = propagate_fundamental(rescaled_system(mathieu, lam), tol)
    omega = make_standard_space(2).omega_matrix
    assert phi.shape == (4, 4)
    scale = max(1.0, float(np.max(np.abs(phi)))) ** 2
    assert_allclose(phi.T @ omega @ phi, omega, atol=10.0 * tol * scale)


def test_halved_step_agrees(mathieu, numerics):
    # V = 2 cos x on [0, 2 pi] at lambda = 0
    prop = SchrodingerPropagator(mathieu, tol=numerics.integrator_tol)
    steps = prop.steps_for(0.0)
    full = prop.fundamental(0.0, steps=steps)
    halved = prop.fundamental(0.0, steps=2 * steps)
    scale = max(1.0, float(np.max(np.abs(halved))))
    assert_allclose(full, halved, atol=10.0 * numerics.integrator_tol * scale)


def test_realify_matrix_acts_per_component():
    mat = np.array([[1.0, 2.0], [3.0, 4.0]])
    big = realify_matrix(mat, 1)
    assert_allclose(big, np.kron(mat, np.eye(2)), atol=0.0)


def test_rescaled_system_guards(free, well):
    with pytest.raises(PotentialError):
        rescaled_system(well, 0.0, 0.0)
    with pytest.raises(PotentialError):
        rescaled_system(free, 0.0, 0.5)
    assert rescaled_system(well, 0.0, 0.5).t == 0.5


def test_rescaled_monodromy_matches_short_interval(well):
    # coefficient t^2 (V(t x) - lambda) on the unscaled interval [-pi, pi]
    t, lam = 0.5, -2.0
    assert_allclose(monodromy(well, lam, t).matrix, free_transfer(t * t * (lam + 5.0), 2.0 * math.pi),
                    atol=1e-7)


def test_boundary_plane_lagrangian():
    for n in (1, 2):
        for theta in (0.0, 1.0, math.pi):
            assert is_lagrangian(boundary_plane(theta, n))


def test_trace_plane_meets_boundary_at_eigenvalues(free, numerics):
    planes = LagrangianPlanes(free, numerics)
    boundary = planes.boundary(math.pi / 2.0)
    assert intersect(planes.solution(1.0 / 16.0), boundary, tol=1e-6).dim_real == 2
    assert intersect(planes.solution(0.3), boundary, tol=1e-6).dim_real == 0
    assert monodromy(free, 1.0 / 16.0).kernel_dimension(math.pi / 2.0) == 1


def test_trace_plane_far_below_floor(mathieu):
    frame = trace_plane(rescaled_system(mathieu, -400.0))
    assert is_lagrangian(frame, tol=1e-8)


def test_trajectory_follows_cosine(free):
    prop = SchrodingerPropagator(free, tol=1e-10)
    xs, states = prop.trajectory(1.0, 1.0, np.array([[1.0], [0.0]]))
    assert_allclose(states[:, 0, 0], np.cos(xs), atol=1e-7)
    assert_allclose(states[:, 1, 0], -np.sin(xs), atol=1e-7)


def test_propagator_tolerance_range(free):
    with pytest.raises(PropagationError):
        SchrodingerPropagator(free, tol=0.5)
