"""
Maslov index computation for theta-periodic Schrodinger operators

Symplectic linear algebra, Magnus propagation of matrix Schrodinger systems,
crossing-form and spectral-flow Maslov indices, an independent spectral
oracle, and the harness that checks eigenvalue counts against Maslov indices.
"""

from .symplectic import (
    make_standard_space, double_space, make_frame, diagonal_plane, direct_sum,
    intersect, souriau_map, eigenphases, plane_gap, random_lagrangian_pair
)
from .potentials import (
    constant_potential, free_potential, cosine_potential, mathieu_potential,
    grid_potential, load_grid_potential, potential_from_config
)
from .propagation import (
    SchrodingerPropagator, LagrangianPlanes, boundary_plane, propagate_fundamental,
    trace_plane, monodromy, rescaled_system
)
from .maslov import (
    rectangle_theta, rectangle_t, find_crossings, crossing_form_lambda,
    crossing_form_theta, crossing_form_t, maslov_crossing_form,
    maslov_spectral_flow, maslov_index
)
from .oracle import (
    fd_spectrum, floquet_spectrum, lambda_floor, count_below, count_interval,
    morse, eigencurve, branch_point, dlambda_dtheta, wronskian_check, bands
)
from .harness import (
    check_theta_count_flow, check_interval_count_flow, check_count_bounds,
    check_derivative_formula, check_monotonicity, check_scaling_count_flow,
    check_morse_scaling, check_realification, check_souriau_identity,
    run_suite, exit_code, SUITES
)
__version__ = "1.0.0"
__all__ = [
    "make_standard_space", "double_space", "make_frame", "diagonal_plane", "direct_sum",
    "intersect", "souriau_map", "eigenphases", "plane_gap", "random_lagrangian_pair",
    "constant_potential", "free_potential", "cosine_potential", "mathieu_potential",
    "grid_potential", "load_grid_potential", "potential_from_config",
    "SchrodingerPropagator", "LagrangianPlanes", "boundary_plane", "propagate_fundamental",
    "trace_plane", "monodromy", "rescaled_system",
    "rectangle_theta", "rectangle_t", "find_crossings", "crossing_form_lambda",
    "crossing_form_theta", "crossing_form_t", "maslov_crossing_form",
    "maslov_spectral_flow", "maslov_index",
    "fd_spectrum", "floquet_spectrum", "lambda_floor", "count_below", "count_interval",
    "morse", "eigencurve", "branch_point", "dlambda_dtheta", "wronskian_check", "bands",
    "check_theta_count_flow", "check_interval_count_flow", "check_count_bounds",
    "check_derivative_formula", "check_monotonicity", "check_scaling_count_flow",
    "check_morse_scaling", "check_realification", "check_souriau_identity",
    "run_suite", "exit_code", "SUITES"
]
