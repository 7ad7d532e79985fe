import math

import numpy as np
import pytest

from _types.errors import BorderlineRankError, NonLagrangianError, SymplecticError
from service.symplectic import (
    diagonal_plane, direct_sum, double_space, eigenphases, intersect, is_lagrangian,
    make_frame, make_standard_space, minus_one_multiplicity, plane_gap, random_lagrangian,
    random_lagrangian_pair, souriau_map
)

TOL = 1e-12


def assert_allclose(arr1, arr2, atol=TOL):
    np.testing.assert_allclose(arr1, arr2, rtol=0., atol=atol)


def coordinate_planes(m):
    space = make_standard_space(m)
    eye, zero = np.eye(m), np.zeros((m, m))
    return space, make_frame(space, np.vstack([eye, zero])), make_frame(space, np.vstack([zero, eye]))


def test_standard_form():
    space = make_standard_space(3)
    omega = space.omega_matrix
    assert space.dim == 6
    assert_allclose(omega, -omega.T)
    assert_allclose(omega @ omega, -np.eye(6))
    assert omega[0, 3] == 1.0


def test_double_space_only_from_standard():
    doubled = double_space(make_standard_space(2))
    assert doubled.half_dim == 4
    with pytest.raises(SymplecticError):
        double_space(doubled)
    with pytest.raises(SymplecticError):
        make_standard_space(0)


def test_make_frame_orthonormalizes():
    space = make_standard_space(2)
    frame = make_frame(space, np.array([[2.0, 1.0], [0.0, 3.0], [0.0, 0.0], [0.0, 0.0]]))
    assert_allclose(frame.columns.T @ frame.columns, np.eye(2))
    assert is_lagrangian(frame)


def test_make_frame_rejects_bad_frames():
    space = make_standard_space(2)
    # p_1 and q_1 pair to omega = 1
    not_isotropic = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
    with pytest.raises(NonLagrangianError):
        make_frame(space, not_isotropic)
    rank_deficient = np.array([[1.0, 1.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]])
    with pytest.raises(NonLagrangianError):
        make_frame(space, rank_deficient)
    with pytest.raises(SymplecticError):
        make_frame(space, np.eye(4))


@pytest.mark.parametrize("m", [1, 2, 4])
@pytest.mark.parametrize("k", [0, 1])
def test_intersect_random_pairs(m, k):
    rng = np.random.default_rng(17 + m + 5 * k)
    space = make_standard_space(m)
    x, y = random_lagrangian_pair(space, k, rng)
    basis = intersect(x, y)
    assert basis.dim_real == k
    assert basis.vectors.shape == (2 * m, k)
    if k:
        # intersection vectors lie in both planes
        assert_allclose(x.projection @ basis.vectors, basis.vectors, atol=1e-8)
        assert_allclose(y.projection @ basis.vectors, basis.vectors, atol=1e-8)


def test_intersect_with_itself_and_transversal():
    _, p_plane, q_plane = coordinate_planes(3)
    assert intersect(p_plane, p_plane).dim_real == 3
    assert intersect(p_plane, q_plane).dim_real == 0


def test_intersect_borderline_rank():
    space = make_standard_space(1)
    phi = 2e-9
    a = make_frame(space, np.array([[1.0], [0.0]]))
    b = make_frame(space, np.array([[math.cos(phi)], [math.sin(phi)]]))
    with pytest.raises(BorderlineRankError) as info:
        intersect(a, b, interval=(0.0, 1.0))
    assert info.value.interval == (0.0, 1.0)
    # clear of the window the answer is decided
    assert intersect(a, b, tol=1e-6).dim_real == 1
    assert intersect(a, b, tol=1e-12).dim_real == 0


def test_souriau_identical_and_transversal():
    _, p_plane, q_plane = coordinate_planes(2)
    u = souriau_map(p_plane, p_plane)
    assert_allclose(u, -np.eye(2))
    assert_allclose(eigenphases(u), np.zeros(2))
    assert minus_one_multiplicity(u) == 2
    assert minus_one_multiplicity(souriau_map(p_plane, q_plane)) == 0


@pytest.mark.parametrize("dim", [4, 8, 16])
def test_souriau_multiplicity_matches_rank(dim):
    rng = np.random.default_rng(dim)
    space = make_standard_space(dim // 2)
    for k in range(dim // 2 + 1):
        x, y = random_lagrangian_pair(space, k, rng)
        u = souriau_map(x, y)
        assert_allclose(u.conj().T @ u, np.eye(dim // 2), atol=1e-10)
        assert minus_one_multiplicity(u) == k == intersect(x, y).dim_real


def test_diagonal_meets_direct_sum_in_intersection():
    rng = np.random.default_rng(3)
    space = make_standard_space(3)
    x, y = random_lagrangian_pair(space, 2, rng)
    pair = direct_sum(x, y)
    delta = diagonal_plane(pair.space)
    assert is_lagrangian(pair)
    assert is_lagrangian(delta)
    assert intersect(pair, delta).dim_real == 2


def test_plane_gap():
    _, p_plane, q_plane = coordinate_planes(2)
    assert plane_gap(p_plane, p_plane) == pytest.approx(0.0, abs=TOL)
    assert plane_gap(p_plane, q_plane) == pytest.approx(1.0)
    with pytest.raises(SymplecticError):
        plane_gap(p_plane, coordinate_planes(3)[1])


def char_poly(u):
    return np.poly(np.linalg.eigvals(u))


@pytest.mark.parametrize("m", [2, 4, 8])
def test_souriau_independent_of_frame_basis(m):
    rng = np.random.default_rng(11 + m)
    space = make_standard_space(m)
    x, y = random_lagrangian(space, rng), random_lagrangian(space, rng)
    rotation, _ = np.linalg.qr(rng.normal(size=(m, m)))
    x_rotated = make_frame(space, x.columns @ rotation)
    assert_allclose(char_poly(souriau_map(x_rotated, y)), char_poly(souriau_map(x, y)), atol=1e-8)


@pytest.mark.parametrize("m", [2, 4, 8])
def test_souriau_products_independent_of_basepoint(m):
    rng = np.random.default_rng(29 + m)
    space = make_standard_space(m)
    x1, x2, y, z = (random_lagrangian(space, rng) for _ in range(4))
    # U_X(Y) U_X(Z)^{-1} represents (2 P_Y - I)(2 P_Z - I) for every X
    first = souriau_map(x1, y) @ souriau_map(x1, z).conj().T
    second = souriau_map(x2, y) @ souriau_map(x2, z).conj().T
    assert_allclose(char_poly(first), char_poly(second), atol=1e-8)
    assert_allclose(char_poly(first), char_poly(-souriau_map(z, y)), atol=1e-8)
