import json

import pytest
from hypothesis import given, strategies as st

from lpa_lab.core_model import (
    joint_type_distribution,
    load_scenario,
    outcome_lattice,
    scenario_from_dict,
    validate_scenario,
)
from lpa_lab.errors import InvalidScenario

from conftest import make_scenario


def test_projects_sorted_by_descending_p():
    s = make_scenario(lam=(0.6, 0.4), p=(0.1, 0.3))
    assert s.p == (0.3, 0.1)
    assert s.lam == (0.4, 0.6)
    # original numbering survives the round trip
    assert s.to_dict()["projects"][0] == {"lambda": 0.6, "p": 0.1}


def test_joint_distribution_s1(s1):
    j = joint_type_distribution(s1)
    assert j.pGG == pytest.approx(0.2)
    assert j.pGB == pytest.approx(0.2)
    assert j.pBG == pytest.approx(0.4)
    assert j.pBB == pytest.approx(0.2)


def test_partial_effort_profiles(s1):
    only2 = joint_type_distribution(s1, effort=[2])
    assert (only2.pGG, only2.pGB, only2.pBG) == (0.0, 0.0, 0.6)
    none = joint_type_distribution(s1, effort=[])
    assert none.pBB == 1.0


@given(
    l1=st.floats(0.05, 1.0), l2=st.floats(0.05, 1.0), rho=st.floats(0.0, 1.0),
)
def test_joint_distribution_marginals(l1, l2, rho):
    s = make_scenario(lam=(l1, l2), p=(0.2, 0.1), rho=rho, c=0.01)
    if not validate_scenario(s).ok:
        return
    j = joint_type_distribution(s)
    assert j.total() == pytest.approx(1.0)
    assert j.pGG + j.pGB == pytest.approx(s.lam[0])
    assert j.pGG + j.pBG == pytest.approx(s.lam[1])
    assert min(j.pGG, j.pGB, j.pBG) >= 0


@pytest.mark.parametrize(
    "kwargs, failing",
    [
        (dict(R=0.9), "R>I>0"),
        (dict(c=0.0), "c>0"),
        (dict(p=(0.4, 0.2)), "assumption1_project1"),
        (dict(c=1.2), "assumption2_project1"),
        (dict(R=2.0), "distinct_lattice"),
        (dict(lam=(0.9, 0.8), rho=0.1), "joint_nonnegative"),
    ],
)
def test_validation_failures(kwargs, failing):
    report = validate_scenario(make_scenario(**kwargs))
    assert not report.ok
    assert failing in report.failures


def test_lattice(s0):
    lat = outcome_lattice(s0)
    assert lat.aggregate == (0.0, 1.0, 2.0, 3.0, 4.0, 6.0)
    assert lat.on_path == (2.0, 4.0, 6.0)


def test_scenario_parsing_rejects_unknown_fields():
    good = {"R": 3, "I": 1, "c": 0.1, "rho": 1, "projects": [{"lambda": 0.5, "p": 0.2}] * 2}
    s, extras = scenario_from_dict(good)
    assert s.R == 3.0 and extras == {}
    with pytest.raises(InvalidScenario):
        scenario_from_dict({**good, "typo": 1})
    with pytest.raises(InvalidScenario):
        scenario_from_dict({**good, "projects": [{"lambda": 0.5}] * 2})
    with pytest.raises(InvalidScenario):
        scenario_from_dict({**good, "R": "3"})


def test_load_scenario_bad_json(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidScenario):
        load_scenario(path)
    path.write_text(json.dumps({"R": 3}))
    with pytest.raises(InvalidScenario):
        load_scenario(path)
