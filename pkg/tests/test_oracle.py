import pytest

from lpa_lab.core_model import ProjectParams
from lpa_lab.errors import Infeasible
from lpa_lab.oracle import (
    AGGREGATE,
    PER_PROJECT,
    ContractSchedule,
    Economy,
    GPStrategy,
    OracleFlags,
    best_response,
    enumerate_strategies,
    expected_gp_payout,
    expected_total_and_lp_value,
    first_best_strategy,
    fno_strategy,
    minimize_gp_payout,
    single_project_strategy,
)

HALF = ProjectParams(0.5, 0.2)


def test_strategy_counts(s0):
    assert len(enumerate_strategies(s0)) == 292
    assert len(enumerate_strategies(Economy.single(3, 1, 0.1, HALF))) == 4
    assert len(set(enumerate_strategies(s0))) == 292


def test_single_project_oracle_value():
    econ = Economy.single(3, 1, 0.1, HALF)
    sol = minimize_gp_payout(econ, single_project_strategy(4))
    assert sol.value == pytest.approx(0.15, abs=1e-12)
    assert sol.schedule.payout(3.0) == pytest.approx(0.25)
    assert sol.schedule.payout(1.0) == pytest.approx(0.05)


def test_single_project_fno_cannot_screen():
    econ = Economy.single(3, 1, 0.1, HALF)
    with pytest.raises(Infeasible):
        minimize_gp_payout(econ, single_project_strategy(4), OracleFlags(fno=True))


def test_portfolio_oracle_value(s0):
    sol = minimize_gp_payout(s0, first_best_strategy())
    assert sol.value == pytest.approx(13 / 60, abs=1e-9)
    assert sol.schedule.payout(2.0) == pytest.approx(1 / 60, abs=1e-12)


def test_total_value_constant_in_rho(s0):
    sched = minimize_gp_payout(s0, first_best_strategy()).schedule
    for rho in (0.0, 0.3, 1.0):
        total, _ = expected_total_and_lp_value(s0.replace(rho=rho), sched, first_best_strategy())
        assert total == pytest.approx(4.0, abs=1e-12)


def test_fno_strategy_total(s1):
    sched = ContractSchedule.from_mapping(AGGREGATE, {})
    total, lp = expected_total_and_lp_value(s1, sched, fno_strategy())
    assert total == pytest.approx(3.98, abs=1e-12)
    assert lp == pytest.approx(total)


def test_best_response_ties_prefer_lp(s1):
    # at the optimum the GP is indifferent; the tie goes to the LP's favorite
    sol = minimize_gp_payout(s1, first_best_strategy())
    br = best_response(s1, sol.schedule)
    assert len(br.ties) > 1
    assert br.includes(first_best_strategy())
    assert br.strategy == first_best_strategy()


def test_zero_schedule_best_response_is_shirking(s0):
    br = best_response(s0, ContractSchedule.from_mapping(AGGREGATE, {}))
    assert not any(br.strategy.effort)
    assert br.value == pytest.approx(0.0)


def test_per_project_signals_dominate_aggregate(s1):
    agg = minimize_gp_payout(s1, first_best_strategy(), signal_kind=AGGREGATE).value
    per = minimize_gp_payout(s1, first_best_strategy(), signal_kind=PER_PROJECT).value
    assert per <= agg + 1e-12


def test_gross_payout_matches_lp_value(s1):
    sol = minimize_gp_payout(s1, first_best_strategy())
    gp = expected_gp_payout(s1, sol.schedule, first_best_strategy())
    total, lp = expected_total_and_lp_value(s1, sol.schedule, first_best_strategy())
    assert gp + lp == pytest.approx(total)


def test_strategy_and_schedule_round_trip(s1):
    strat = fno_strategy()
    assert GPStrategy.from_dict(strat.to_dict(), 2) == strat
    sched = minimize_gp_payout(s1, first_best_strategy()).schedule
    back = ContractSchedule.from_json(sched.signal_kind, sched.to_json())
    assert back.as_dict() == sched.as_dict()
