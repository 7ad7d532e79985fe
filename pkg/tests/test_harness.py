import math

import pytest

from conftest import PERIOD, SYMMETRIC
from _types.config_types import RunConfig
from _types.errors import ScenarioRejected
from _types.result_types import CheckReport
from service.harness import (
    SUITES, Scenario, _run_one, build_scenarios, check_count_bounds, check_derivative_formula,
    check_interval_count_flow, check_monotonicity, check_morse_scaling, check_realification,
    check_scaling_count_flow, check_souriau_identity, check_theta_count_flow, exit_code,
    morse_hypothesis
)
from service.potentials import constant_potential, cosine_potential

THETA_CROSS = 2.0 * math.pi * (1.0 - math.sqrt(0.6))


def report(passed, rejected=False):
    return CheckReport(claim_id="c", inputs={}, lhs=0, rhs=0, passed=passed, rejected=rejected)


def test_souriau_identity():
    result = check_souriau_identity(samples=12, seed=4)
    assert result.passed
    assert result.lhs == 0


def test_theta_count_flow_free(free, numerics):
    result = check_theta_count_flow(free, math.pi / 4.0, math.pi / 2.0, 0.6, numerics=numerics,
                                    full_rectangle=False)
    assert result.passed
    assert (result.lhs, result.rhs) == (1, 1.0)
    assert result.details["N_theta1"] == 1
    assert result.details["N_theta2"] == 2


@pytest.mark.slow
def test_theta_count_flow_full_rectangle(free, numerics):
    result = check_theta_count_flow(free, math.pi / 4.0, math.pi / 2.0, 0.6, numerics=numerics)
    assert result.passed
    assert result.details["rectangle_consistent"]
    assert result.details["loop_doubled_index"] == 0


def test_theta_count_flow_retries_on_guard_band(free, numerics):
    # 1/16 is an eigenvalue at theta = pi / 2
    result = check_theta_count_flow(free, math.pi / 4.0, math.pi / 2.0, 1.0 / 16.0, numerics=numerics,
                                    full_rectangle=False)
    assert result.passed
    assert result.details["perturbed_from"]["r"] == 1.0 / 16.0
    assert result.inputs["r"] == pytest.approx(1.0 / 16.0 + 1e-4)


def test_theta_count_flow_retries_on_corner(free, numerics):
    result = check_theta_count_flow(free, THETA_CROSS, math.pi / 2.0, 0.6, numerics=numerics,
                                    full_rectangle=False)
    assert result.passed
    assert "perturbed_from" in result.details


def test_interval_count_flow_free(free, numerics):
    result = check_interval_count_flow(free, math.pi / 4.0, math.pi / 2.0, 0.3, 0.6, numerics=numerics,
                                       backend="crossing_form")
    assert result.passed
    assert result.lhs == 1
    with pytest.raises(ScenarioRejected):
        check_interval_count_flow(free, math.pi / 4.0, math.pi / 2.0, 0.6, 0.3, numerics=numerics)


def test_count_bounds_free(free, numerics):
    result = check_count_bounds(free, [0.5, 1.0, 2.0, 4.0], [0.3, 1.3], numerics=numerics)
    assert result.passed
    assert result.details["max_single"] <= 2
    assert all(total <= 2 for total in result.details["kernel_sums"].values())


def test_derivative_formula_free(free, numerics):
    result = check_derivative_formula(free, 0, (0.2, 1.0), points=5, numerics=numerics)
    assert result.passed
    assert len(result.details["rows"]) == 5


def test_monotonicity_free(free, numerics):
    result = check_monotonicity(free, 0, (0.2, 2.8), points=8, numerics=numerics)
    assert result.passed
    assert result.details["monotone"]
    with pytest.raises(ScenarioRejected):
        check_monotonicity(free, 0, (3.0, 3.5), points=4, numerics=numerics)


def test_realification_free(free, numerics):
    result = check_realification(free, math.pi / 4.0, math.pi / 2.0, 1.0, numerics=numerics)
    assert result.passed
    assert result.details["crossings"] == 4


def test_morse_hypothesis():
    assert morse_hypothesis(constant_potential(-5.0, SYMMETRIC), 0.3) == "nonpositive"
    assert morse_hypothesis(cosine_potential([-1.0], [1.0], SYMMETRIC, offset=[[-2.0]]), 0.4) == "nonpositive"
    assert morse_hypothesis(cosine_potential([1.0], [1.0], SYMMETRIC, offset=[[2.0]]), 0.3) == "positive"
    with pytest.raises(ScenarioRejected):
        morse_hypothesis(cosine_potential([2.0], [1.0], SYMMETRIC), 0.3)


@pytest.mark.slow
def test_morse_scaling_of_well(well, numerics):
    result = check_morse_scaling(well, 0.3, 0.0, numerics=numerics)
    assert result.passed
    assert (result.lhs, result.rhs) == (4, 4)
    assert result.details["case"] == "nonpositive"
    assert [c["point"]["t"] for c in result.details["crossings"]] == pytest.approx(
        [1.0 / math.sqrt(5.0), 2.0 / math.sqrt(5.0)], abs=1e-6)


@pytest.mark.slow
def test_scaling_count_flow_of_well(well, numerics):
    result = check_scaling_count_flow(well, 0.3, 0.0, -0.5, r_low=-4.5, numerics=numerics)
    assert result.passed
    assert (result.lhs, result.rhs) == (-4, -4.0)


def test_exit_code():
    assert exit_code([report(True), report(True)]) == 0
    assert exit_code([report(True), report(False)]) == 1
    assert exit_code([report(False, rejected=True), report(True)]) == 2
    assert exit_code([report(False, rejected=True), report(False)]) == 1
    assert exit_code([]) == 0


def test_rejected_scenario_report(free, numerics):
    scenario = Scenario("monotone", check_monotonicity,
                        {"potential": free, "branch": 0, "theta_range": (3.0, 3.5), "numerics": numerics})
    result = _run_one(scenario)
    assert result.rejected
    assert not result.passed
    assert result.inputs["potential"]["kind"] == "constant"


def test_build_scenarios():
    config = RunConfig()
    scenarios = build_scenarios("theta-flow", config, random_scenarios=5)
    assert len(scenarios) == 7
    assert all("numerics" in s.kwargs for s in scenarios)
    (souriau,) = build_scenarios("souriau", config)
    assert souriau.check is check_souriau_identity
    assert "numerics" not in souriau.kwargs
    suites = {s.suite for s in build_scenarios("all", config, random_scenarios=2)}
    assert suites == set(SUITES)
    with pytest.raises(ValueError):
        build_scenarios("unknown", config)


def test_build_scenarios_is_seeded():
    first = build_scenarios("theta-flow", RunConfig(seed=7), random_scenarios=3)
    second = build_scenarios("theta-flow", RunConfig(seed=7), random_scenarios=3)
    assert [s.kwargs["theta1"] for s in first] == [s.kwargs["theta1"] for s in second]


@pytest.mark.slow
@pytest.mark.parametrize("branch", [0, 1])
def test_derivative_formula_mathieu(mathieu, numerics, branch):
    result = check_derivative_formula(mathieu, branch, (0.3, 2.8), points=6, numerics=numerics)
    assert result.passed
    assert result.details["form_gap"] <= 1e-6
    assert result.details["fd_gap"] <= 1e-5


def avoided_crossing():
    """
    Channel 1 free, channel 2 shifted by -0.5, coupled through 0.1 cos x.
    The diabatic branches theta^2 / 4 pi^2 and (1 - theta / 2 pi)^2 - 0.5 meet at
    theta = pi / 2; the coupling opens a gap there, so branch 1 rises and then falls.
    """
    return cosine_potential([0.0, 0.0], [1.0, 1.0], PERIOD, offset=[[0.0, 0.0], [0.0, -0.5]],
                            coupling=[[0.0, 0.1], [0.1, 0.0]], coupling_frequency=1.0)


@pytest.mark.slow
def test_monotonicity_two_channels_critical_point(numerics):
    result = check_monotonicity(avoided_crossing(), 1, (0.6, 2.4), points=24, numerics=numerics)
    assert result.passed
    assert not result.details["monotone"]
    (critical,) = result.details["critical_points"]
    assert 0.9 < critical["theta"] < 1.8
    assert critical["im_boundary"] <= 1e-8


def test_monotonicity_two_channels_without_coupling_is_monotone(numerics):
    pot = cosine_potential([0.0, 0.0], [1.0, 1.0], PERIOD, offset=[[0.0, 0.0], [0.0, -0.5]])
    # branch 0 is channel 2's (theta / 2 pi)^2 - 0.5 throughout (0, pi)
    result = check_monotonicity(pot, 0, (0.3, 2.8), points=8, numerics=numerics)
    assert result.passed
    assert result.details["monotone"]
