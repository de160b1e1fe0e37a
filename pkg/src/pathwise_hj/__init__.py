"""Numerical laboratory for pathwise Hamilton-Jacobi equations
``du = H(Du) dW``: exact conjugate-space solvers, monotone finite-difference
solvers, rough-path generators and regularity estimators, and a toolkit for
differences of convex functions."""

from .grid_convex import (
    Grid1D,
    GridFunction,
    KProfile,
    SeriesTail,
    besov_seminorm,
    c11_k_profile,
    convex_envelope,
    k_c11_estimate,
    legendre,
    monotone_conjugate,
    radial_convex_envelope,
    second_difference_modulus,
)
from .dc_toolkit import (
    DCFunction1D,
    Hamiltonian1D,
    dc_from_convex,
    dc_max,
    dc_min,
    dc_norm_upper,
    dc_split,
    h_membership_partial_sums,
    k_dc_profile,
    mollify_grid,
    power_dc_truncation,
    power_truncation_family,
)
from .paths import (
    Partition,
    PiecewiseLinearPath,
    RngSeed,
    bm_refinement_partition,
    brownian,
    count_N,
    embedded_walk,
    greedy_oscillation_partition,
    holder_seminorm,
    k_path_profile,
    mollify,
    p_alpha_norm,
    p_variation,
    path_L1_modulus,
    rademacher_walk,
    scale_path,
    scaled_random_walk,
    teeth,
    walk_exit_count,
    walk_exit_times,
)
from .solver import (
    ConjugateState,
    FDResult,
    StabilityReport,
    ToothRecursion,
    closedform_tooth_solution,
    conjugate_init,
    envelope_bounds,
    eval_primal,
    fd_domain_radius,
    fd_solve,
    hamiltonian_from_dc,
    hopf_solve,
    hopf_step,
    path_digest,
    s_convex,
    save_snapshots,
    stability_report,
    tooth_recursion,
)
from .experiments import (
    ConfigError,
    ExperimentConfig,
    RunArtifact,
    SCENARIOS,
    default_config,
    execute,
    parse_config,
    render_config,
    run_blowup,
    run_brownian_study,
    run_crossval,
    run_limit,
    run_stability,
    run_walk_convergence,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # grids and convex analysis
    "Grid1D",
    "GridFunction",
    "KProfile",
    "SeriesTail",
    "convex_envelope",
    "radial_convex_envelope",
    "legendre",
    "monotone_conjugate",
    "second_difference_modulus",
    "besov_seminorm",
    "k_c11_estimate",
    "c11_k_profile",
    # DC toolkit and Hamiltonians
    "DCFunction1D",
    "Hamiltonian1D",
    "dc_from_convex",
    "dc_split",
    "dc_norm_upper",
    "dc_max",
    "dc_min",
    "power_dc_truncation",
    "power_truncation_family",
    "mollify_grid",
    "k_dc_profile",
    "h_membership_partial_sums",
    # driving paths
    "PiecewiseLinearPath",
    "Partition",
    "RngSeed",
    "teeth",
    "scale_path",
    "brownian",
    "rademacher_walk",
    "scaled_random_walk",
    "embedded_walk",
    "mollify",
    "greedy_oscillation_partition",
    "count_N",
    "p_variation",
    "holder_seminorm",
    "k_path_profile",
    "p_alpha_norm",
    "bm_refinement_partition",
    "walk_exit_times",
    "walk_exit_count",
    "path_L1_modulus",
    # solvers
    "ConjugateState",
    "FDResult",
    "StabilityReport",
    "ToothRecursion",
    "conjugate_init",
    "hopf_step",
    "hopf_solve",
    "eval_primal",
    "s_convex",
    "envelope_bounds",
    "fd_solve",
    "fd_domain_radius",
    "hamiltonian_from_dc",
    "stability_report",
    "tooth_recursion",
    "closedform_tooth_solution",
    "save_snapshots",
    "path_digest",
    # experiments
    "ConfigError",
    "ExperimentConfig",
    "RunArtifact",
    "SCENARIOS",
    "default_config",
    "parse_config",
    "render_config",
    "execute",
    "run_blowup",
    "run_limit",
    "run_brownian_study",
    "run_walk_convergence",
    "run_crossval",
    "run_stability",
]
