import csv
import io

import pytest

from lpa_lab.analysis import (
    SWEEP_HEADER,
    compare_methods,
    comparative_statics,
    dbd_gp_expected,
    feasibility,
    p2_star,
    rho_double_star,
    rho_star,
    single_project_funding,
    sweep_csv,
    wp_is_decreasing,
)
from lpa_lab.closed_form import wp_gp_expected
from lpa_lab.core_model import ProjectParams
from lpa_lab.errors import RegimeStraddle

from conftest import make_scenario


def test_dbd_payment_s0(s0):
    assert dbd_gp_expected(s0) == pytest.approx(0.3)


def test_s0_is_wp_always(s0):
    th = rho_double_star(s0)
    assert th.side == "wp-always" and th.value is None
    assert p2_star(s0).value == 0.0


def test_s1_interior_threshold(s1):
    th = rho_double_star(s1)
    assert th.side == "interior"
    assert th.value == pytest.approx(0.0597889801, abs=1e-8)
    assert th.value <= rho_star(s1)
    at = s1.replace(rho=th.value)
    assert wp_gp_expected(at) == pytest.approx(dbd_gp_expected(at), abs=1e-9)


def test_dbd_always_with_a_clean_second_project():
    # project 2 carries no adverse selection, so pooling only adds cost
    s = make_scenario(c=0.05, lam=(0.9, 0.2), p=(0.3, 0.0), rho=0.9)
    assert rho_double_star(s).side == "dbd-always"


def test_wp_payment_decreasing_in_rho(s1):
    assert wp_is_decreasing(s1)


def test_compare_s0(s0):
    rep = compare_methods(s0)
    assert rep.preferred == "WP"
    assert rep.wp_gp_expected == pytest.approx(13 / 60)
    assert rep.dbd_gp_expected == pytest.approx(0.3)
    assert rep.containment_ok


def test_compare_without_adverse_selection_uses_oracle():
    s = make_scenario(p=(0.0, 0.0))
    rep = compare_methods(s)
    assert rep.rho_star is None
    # both methods pay exactly the effort cost when types are public
    assert rep.wp_gp_expected == pytest.approx(0.2)
    assert rep.dbd_gp_expected == pytest.approx(0.2)


def test_statics_sign_table(s0, s1):
    for s in (s0.replace(rho=0.9), s1, s1.replace(rho=0.1)):
        for param in ("p1", "lam_max", "lam_min", "rho"):
            try:
                rep = comparative_statics(s, param)
            except RegimeStraddle:
                continue
            assert rep.agrees, (s, param, rep)


def test_statics_refuses_lambda_order_flip(s0):
    with pytest.raises(RegimeStraddle):
        comparative_statics(s0.replace(rho=0.5), "lam_min", step=0.5)


def test_feasibility_s0(s0):
    for method in ("dbd", "wp"):
        for reputable in (True, False):
            assert feasibility(s0, method, reputable).portfolio


def test_feasibility_never_raises():
    rep = feasibility(make_scenario(R=0.5))
    assert not rep.valid and rep.lp_profit is None


def test_capital_zeroing_makes_funding_harder():
    # gap between the two LP profits is exactly (1 - lam)(pR - I)
    proj = ProjectParams(0.35, 0.3)
    out = single_project_funding(3.0, 1.0, 0.3, proj)
    assert out["reputable_lp_profit"] == pytest.approx(0.0326530612, abs=1e-9)
    assert out["fno_lp_profit"] - out["reputable_lp_profit"] == pytest.approx(0.65 * (0.9 - 1.0))
    assert out["reputable_funded"] and not out["fno_funded"]


def test_sweep_csv(s1):
    text = sweep_csv(s1, "rho", [0.0, 0.5, 1.0, 1.5])
    rows = list(csv.reader(io.StringIO(text)))
    assert tuple(rows[0]) == SWEEP_HEADER
    assert rows[1][4] == "DBD" and rows[2][4] == "WP"
    assert rows[4][2] == "" and rows[4][4] == "invalid"
    assert float(rows[2][2]) == pytest.approx(0.129220779221)
