import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpa_lab.closed_form import (
    ThreePointProject,
    coefficients,
    conditional_closed_form,
    fno_total_surplus,
    intended_in_argmax,
    rho_threshold,
    solve_conditional,
    solve_dbd,
    solve_dbd_single,
    solve_fno_single,
    solve_fno_wp,
    solve_three_point_single,
    solve_wp,
    solve_wp_monotone,
    three_point_corner,
    wp_regime_bounds,
)
from lpa_lab.core_model import ProjectParams
from lpa_lab.errors import DegenerateAdverseSelection, InvalidScenario, SingularSlope
from lpa_lab.oracle import PER_PROJECT, first_best_strategy, minimize_gp_payout
from lpa_lab.verify import random_scenario

from conftest import make_scenario


def test_coefficients_s1(s1):
    k = coefficients(s1)
    assert k.alpha == pytest.approx(0.2)
    assert k.beta == pytest.approx(0.6)
    assert k.gamma == pytest.approx(0.2)
    assert k.beta_tilde == pytest.approx(0.66)


def test_rho_threshold(s0, s1):
    assert rho_threshold(s1) == pytest.approx(3 / 14, abs=1e-12)
    assert rho_threshold(s0) == 0.0
    with pytest.raises(DegenerateAdverseSelection):
        rho_threshold(make_scenario(p=(0.0, 0.0)))


def test_dbd_single_closed_form():
    rep = solve_dbd_single(3, 1, 0.1, ProjectParams(0.5, 0.2))
    assert rep.contract.sR == pytest.approx(0.25)
    assert rep.contract.sI == pytest.approx(0.05)
    assert rep.gp_expected == pytest.approx(0.15, abs=1e-12)
    assert rep.oracle_gap <= 1e-12
    assert rep.notes["funded"]


def test_dbd_portfolio_is_additive(s1):
    rep = solve_dbd(s1)
    singles = [solve_dbd_single(s1.R, s1.I, s1.c, pr) for pr in s1.projects]
    assert rep.gp_expected == pytest.approx(sum(r.gp_expected for r in singles))
    assert rep.schedule.signal_kind == PER_PROJECT
    assert intended_in_argmax(rep)


def test_fno_single_induces_blind_investing():
    rep = solve_fno_single(3, 1, 0.1, ProjectParams(0.5, 0.2))
    assert rep.contract.sI == 0.0
    assert rep.strategy.name == "strategy 3"
    assert intended_in_argmax(rep)


def test_wp_s0(s0):
    rep = solve_wp(s0)
    assert rep.contract.z == pytest.approx(1 / 60, abs=1e-12)
    assert rep.contract.y == pytest.approx(1 / 12, abs=1e-12)
    assert rep.contract.x == pytest.approx(5 / 12, abs=1e-12)
    assert rep.gp_expected == pytest.approx(13 / 60, abs=1e-9)
    assert rep.total_surplus == pytest.approx(4.0)


def test_wp_s1(s1):
    rep = solve_wp(s1)
    assert rep.regime == "high-rho"
    assert rep.contract.z == pytest.approx(0.0292207792, abs=1e-9)
    assert rep.gp_expected == pytest.approx(0.1292207792, abs=1e-9)


def test_wp_low_regime_s1(s1):
    rep = solve_wp(s1.replace(rho=0.1))
    assert rep.regime == "low-rho"
    assert rep.contract.z > wp_regime_bounds(s1)["high"]
    assert rep.oracle_gap <= 1e-8


def test_wp_rejects_no_adverse_selection():
    with pytest.raises(DegenerateAdverseSelection):
        solve_wp(make_scenario(p=(0.0, 0.0)))


def test_wp_rejects_invalid():
    with pytest.raises(InvalidScenario):
        solve_wp(make_scenario(R=0.5))


def test_fno_wp_s0(s0):
    rep = solve_fno_wp(s0)
    assert rep.contract.y == pytest.approx(1 / 12, abs=1e-12)
    assert rep.contract.x == pytest.approx(5 / 12, abs=1e-12)
    assert rep.total_surplus == pytest.approx(3.8, abs=1e-12)
    assert fno_total_surplus(s0) == pytest.approx(3.8, abs=1e-12)


def test_fno_wp_s1(s1):
    rep = solve_fno_wp(s1)
    assert rep.total_surplus == pytest.approx(3.98, abs=1e-12)
    assert intended_in_argmax(rep)


def test_conditional_no_worse_than_wp(s1):
    low = s1.replace(rho=0.1)
    assert solve_conditional(low).gp_expected <= solve_wp(low).gp_expected + 1e-12


def test_conditional_corner_beats_all_binding():
    # the all-binding pattern is not the cheapest here
    s = make_scenario(c=0.05, lam=(0.4, 0.6), p=(0.3, 0.1), rho=0.5)
    value, regime, _, _ = conditional_closed_form(s)
    assert regime.startswith("corner")
    oracle = minimize_gp_payout(s, first_best_strategy(), signal_kind=PER_PROJECT).value
    assert value == pytest.approx(oracle, abs=1e-10)


def test_conditional_equals_wp_at_equal_p(s1):
    s = s1.replace(p2=s1.p1)
    assert solve_conditional(s).gp_profit == pytest.approx(solve_wp(s).gp_profit, abs=1e-9)


def test_monotone_below_2i_is_baseline():
    s = make_scenario(R=1.8, c=0.05, lam=(0.6, 0.6), p=(0.3, 0.2), rho=0.7)
    mono, base = solve_wp_monotone(s), solve_wp(s)
    assert mono.gp_expected == pytest.approx(base.gp_expected)
    assert mono.schedule.monotone_everywhere


def test_monotone_above_2i_costs_more(s1):
    mono = solve_wp_monotone(s1)
    assert mono.schedule.payout(3.0) == pytest.approx(mono.contract.z)
    assert mono.schedule.payout(1.0) == 0.0
    assert mono.gp_expected >= solve_wp(s1).gp_expected - 1e-12


def test_three_point_example():
    t = ThreePointProject(3, 2, 1, 0.1, 0.5, 0.6, 0.1, 0.3)
    rep = solve_three_point_single(t)
    assert three_point_corner(t) == "R2"
    assert rep.contract.sR1 == pytest.approx(0.4)
    assert rep.contract.sR2 == 0.0
    assert rep.contract.sI == pytest.approx(0.04)
    assert rep.oracle_gap <= 1e-12


def test_three_point_singular_slope():
    with pytest.raises(SingularSlope):
        solve_three_point_single(ThreePointProject(3, 2, 1, 0.1, 0.5, 0.2, 0.2, 0.1))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_scenarios_match_oracle(seed):
    s = random_scenario(np.random.default_rng(seed))
    for solve in (solve_wp, solve_fno_wp, solve_wp_monotone, solve_conditional):
        rep = solve(s)
        assert rep.oracle_gap <= 1e-8
        assert intended_in_argmax(rep)


def test_conditional_profit_rises_with_p2():
    # cleaner second project -> cheaper screening -> less rent for the GP
    s = make_scenario(c=0.05, lam=(0.4, 0.6), p=(0.3, 0.1), rho=0.5)
    profits = [solve_conditional(s.replace(p2=float(p2))).gp_profit for p2 in np.linspace(0.01, 0.3, 7)]
    assert (np.diff(profits) >= -1e-12).all()
    assert profits[-1] > profits[0]


def test_conditional_beats_wp_at_equal_p_when_effort_row_is_one_sided():
    # low-rho regime with unequal lambdas: per-project outcomes tell the projects apart
    s = make_scenario(c=0.05, lam=(0.4, 0.6), p=(0.2, 0.2), rho=0.1)
    per = minimize_gp_payout(s, first_best_strategy(), signal_kind=PER_PROJECT).value
    assert solve_conditional(s).gp_expected == pytest.approx(per, abs=1e-12)
    assert per < solve_wp(s).gp_expected - 1e-3
    same_lam = s.replace(lam1=0.5, lam2=0.5)
    assert solve_conditional(same_lam).gp_expected == pytest.approx(solve_wp(same_lam).gp_expected, abs=1e-12)
