import math

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from _types.config_types import PotentialConfig
from _types.errors import PotentialError
from service.potentials import (
    constant_potential, cosine_potential, load_grid_potential, mathieu_potential,
    potential_from_config
)

TOL = 1e-12
PERIOD = (0.0, 2.0 * math.pi)


def assert_allclose(arr1, arr2, atol=TOL):
    np.testing.assert_allclose(arr1, arr2, rtol=0., atol=atol)


def test_constant_potential():
    pot = constant_potential([[1.0, 0.5], [0.5, -3.0]], PERIOD)
    assert pot.n == 2
    assert pot(np.array([0.0, 1.0, 2.0])).shape == (3, 2, 2)
    assert pot.v_max == pytest.approx(max(abs(np.linalg.eigvalsh([[1.0, 0.5], [0.5, -3.0]]))))
    assert pot.floor == -pot.v_max
    assert_allclose(pot.derivative(np.array([0.3])), np.zeros((1, 2, 2)))


def test_asymmetric_potential_rejected():
    with pytest.raises(PotentialError):
        constant_potential([[0.0, 1.0], [2.0, 0.0]], PERIOD)
    with pytest.raises(PotentialError):
        constant_potential([[0.0, 1.0, 2.0]], PERIOD)
    with pytest.raises(PotentialError):
        constant_potential([[1.0]], (1.0, 0.0))


def test_cosine_derivative_matches_difference_quotient():
    pot = cosine_potential([1.5, -0.5], [1.0, 2.0], PERIOD, offset=[[0.0, 0.2], [0.2, 1.0]],
                           coupling=[[0.0, 0.5], [0.5, 0.0]], coupling_frequency=3.0)
    xs = np.linspace(0.1, 6.0, 7)
    h = 1e-6
    quotient = (pot(xs + h) - pot(xs - h)) / (2.0 * h)
    assert_allclose(pot.derivative(xs), quotient, atol=1e-7)
    values = pot(xs)
    assert_allclose(values, np.swapaxes(values, -1, -2))


def test_mathieu_potential():
    pot = mathieu_potential(2.0, 2, PERIOD)
    assert pot.kind == "mathieu"
    assert pot.v_max == pytest.approx(2.0)
    assert_allclose(pot(np.array([math.pi]))[0], -2.0 * np.eye(2))
    assert pot.differentiable


def test_symmetric_interval():
    pot = mathieu_potential(1.0, 1, (-math.pi, math.pi))
    assert pot.is_symmetric_interval
    assert not mathieu_potential(1.0, 1, PERIOD).is_symmetric_interval


def test_grid_potential_from_csv(tmp_path):
    xs = np.linspace(0.0, 2.0 * math.pi, 201)
    path = tmp_path / "grid.csv"
    pd.DataFrame({"x": xs, "v_11": np.cos(xs), "v_12": 0.5 * np.ones_like(xs),
                  "v_22": np.sin(xs)}).to_csv(path, index=False)

    pot = load_grid_potential(str(path), 2, PERIOD)
    points = np.array([0.5, 1.234, 4.0])
    values = pot(points)
    assert_allclose(values[:, 0, 0], np.cos(points), atol=1e-6)
    assert_allclose(values[:, 0, 1], 0.5 * np.ones(3), atol=1e-9)
    assert_allclose(values[:, 1, 0], values[:, 0, 1])
    assert_allclose(pot.derivative(points)[:, 1, 1], np.cos(points), atol=1e-4)

    with pytest.raises(PotentialError):
        load_grid_potential(str(path), 2, (0.0, 1.0))
    with pytest.raises(PotentialError):
        load_grid_potential(str(path), 3)
    with pytest.raises(PotentialError):
        load_grid_potential(str(tmp_path / "missing.csv"), 1)


def test_potential_from_config():
    pot = potential_from_config(PotentialConfig(preset="constant", n=1, matrix=[[-5.0]],
                                                interval=(-math.pi, math.pi)))
    assert pot.kind == "constant"
    assert pot.v_max == pytest.approx(5.0)

    pot = potential_from_config(PotentialConfig(preset="diagonal_cosine", n=2, amplitudes=[1.0, 2.0],
                                                frequencies=[1.0, 1.0]))
    assert pot.n == 2
    assert potential_from_config(PotentialConfig()).v_max == 0.0


@pytest.mark.parametrize("data", [
    {"preset": "constant"},
    {"preset": "constant", "n": 2, "matrix": [[0.0, 1.0], [0.0, 0.0]]},
    {"preset": "diagonal_cosine", "n": 2, "amplitudes": [1.0], "frequencies": [1.0]},
    {"preset": "grid"},
    {"interval": [1.0, 0.0]},
    {"n": 0},
])
def test_potential_config_validation(data):
    with pytest.raises(ValidationError):
        PotentialConfig.model_validate(data)
