"""Optimal limited-partnership payout schedules with a brute-force oracle cross-check."""

from .analysis import compare_methods, comparative_statics, feasibility, p2_star, rho_double_star, rho_star
from .closed_form import (
    SolutionReport,
    solve_conditional,
    solve_dbd,
    solve_dbd_single,
    solve_fno_dbd,
    solve_fno_single,
    solve_fno_wp,
    solve_three_point_single,
    solve_wp,
    solve_wp_monotone,
)
from .core_model import (
    JointTypeDistribution,
    PortfolioScenario,
    ProjectParams,
    joint_type_distribution,
    load_scenario,
    validate_scenario,
)
from .oracle import (
    ContractSchedule,
    GPStrategy,
    best_response,
    enumerate_strategies,
    expected_gp_value,
    expected_total_and_lp_value,
    minimize_gp_payout,
)

__all__ = [
    "ContractSchedule", "GPStrategy", "JointTypeDistribution", "PortfolioScenario", "ProjectParams",
    "SolutionReport", "best_response", "compare_methods", "comparative_statics", "enumerate_strategies",
    "expected_gp_value", "expected_total_and_lp_value", "feasibility", "joint_type_distribution",
    "load_scenario", "minimize_gp_payout", "p2_star", "rho_double_star", "rho_star", "solve_conditional",
    "solve_dbd", "solve_dbd_single", "solve_fno_dbd", "solve_fno_single", "solve_fno_wp",
    "solve_three_point_single", "solve_wp", "solve_wp_monotone", "validate_scenario",
]
