"""Analytic optimal contracts, each cross-checked against the brute-force oracle.

Every solver evaluates its formula, builds the payout schedule, and (unless
``verify=False``) asks :func:`lpa_lab.oracle.minimize_gp_payout` for the
cheapest schedule implementing the same target strategy. A gap above
``ORACLE_TOL`` raises :class:`OracleMismatch`.

Amounts reported as ``gp_expected`` are gross expected payments to the GP;
``gp_profit`` subtracts effort costs and ``lp_profit`` subtracts the capital
the LP commits.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core_model import PortfolioScenario, ProjectParams, require_valid
from .errors import (
    DegenerateAdverseSelection,
    Infeasible,
    InvalidScenario,
    NoConsistentCandidate,
    OracleMismatch,
    SingularSlope,
)
from .oracle import (
    AGGREGATE,
    PER_PROJECT,
    ContractSchedule,
    Economy,
    GPStrategy,
    OracleFlags,
    Technology,
    best_response,
    expected_gp_payout,
    expected_total_and_lp_value,
    first_best_strategy,
    fno_strategy,
    minimize_gp_payout,
    single_project_strategy,
)

ORACLE_TOL = 1e-8
FEAS_TOL = 1e-10


@dataclass(frozen=True)
class DerivedCoefficients:
    alpha: float
    beta: float
    gamma: float
    beta_tilde: float
    theta1: float
    theta2: float
    lam_min: float
    lam_max: float


def coefficients(s: PortfolioScenario) -> DerivedCoefficients:
    l1, l2 = s.lam
    lmin, lmax = s.lam_min, s.lam_max
    alpha = s.rho * lmin
    beta = l1 + l2 - 2 * alpha
    gamma = 1.0 - l1 - l2 + alpha
    p1 = s.p1
    return DerivedCoefficients(
        alpha, beta, gamma, beta + p1 * gamma,
        l1 + p1 * (1 - l1), l2 + p1 * (1 - l2), lmin, lmax,
    )


def rho_threshold(s: PortfolioScenario) -> float:
    """Correlation at which the binding effort deviation switches; may exceed 1."""
    if s.p1 <= 0:
        raise DegenerateAdverseSelection("whole-portfolio formulas need p1 > 0")
    if s.lam_max == s.lam_min:
        return 0.0
    return (s.lam_max - s.lam_min) / (s.lam_min * (1.0 / s.p1 - 1.0))


# ---------------------------------------------------------------- contracts


@dataclass(frozen=True)
class DbDContract:
    sI: float
    sR: float

    def to_dict(self) -> dict:
        return {"sI": self.sI, "sR": self.sR}


@dataclass(frozen=True)
class CompositeDbDContract:
    projects: tuple[DbDContract, DbDContract]

    def to_dict(self) -> dict:
        return {f"project{i + 1}": c.to_dict() for i, c in enumerate(self.projects)}


@dataclass(frozen=True)
class WPContract:
    x: float  # s(2R)
    y: float  # s(R+I)
    z: float  # s(2I)
    regime: str
    sR: float = 0.0  # nonzero only for the monotone-everywhere variant

    def to_dict(self) -> dict:
        out = {"x": self.x, "y": self.y, "z": self.z, "regime": self.regime}
        if self.sR:
            out["sR"] = self.sR
        return out


@dataclass(frozen=True)
class FNOWPContract:
    x: float
    y: float
    regime: str

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "regime": self.regime}


@dataclass(frozen=True)
class ConditionalContract:
    x: float  # s(R, R)
    y1: float  # s(R, I): project 1 returned R, project 2 held in the safe asset
    y2: float  # s(I, R)
    z: float  # s(I, I)
    regime: str

    def to_dict(self) -> dict:
        return {"x": self.x, "y1": self.y1, "y2": self.y2, "z": self.z, "regime": self.regime}


@dataclass(frozen=True)
class ThreePointContract:
    sI: float
    sR1: float
    sR2: float
    gamma_hat: float
    zeta: float

    def to_dict(self) -> dict:
        return {"sI": self.sI, "sR1": self.sR1, "sR2": self.sR2, "gamma_hat": self.gamma_hat, "zeta": self.zeta}


@dataclass(frozen=True)
class OracleContract:
    """Placeholder when a report carries the oracle's schedule instead of a formula."""

    def to_dict(self) -> dict:
        return {}


@dataclass
class SolutionReport:
    method: str
    contract: Any
    schedule: ContractSchedule
    gp_expected: float
    lp_expected: float
    total_surplus: float
    regime: str
    binding: tuple[str, ...]
    oracle_gap: float | None
    economy: Economy
    strategy: GPStrategy
    gp_profit: float = 0.0
    lp_profit: float = 0.0
    notes: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "contract": self.contract.to_dict(),
            "gp_expected": self.gp_expected,
            "lp_expected": self.lp_expected,
            "total_surplus": self.total_surplus,
            "regime": self.regime,
            "binding": list(self.binding),
            "oracle_gap": self.oracle_gap,
            "gp_profit": self.gp_profit,
            "lp_profit": self.lp_profit,
            "signal_kind": self.schedule.signal_kind,
            "fno": self.schedule.fno,
            "schedule": self.schedule.to_json(),
            "strategy": self.strategy.to_dict(),
            "notes": dict(sorted(self.notes.items())),
        }


def _finish(
    method, contract, schedule, econ, target, regime, binding, verify,
    flags: OracleFlags | None = None, notes=None, gp_override=None,
) -> SolutionReport:
    """Evaluate a schedule under its target strategy and attach the oracle gap."""
    gp = expected_gp_payout(econ, schedule, target) if gp_override is None else gp_override
    total, lp = expected_total_and_lp_value(econ, schedule, target)
    gap = None
    if verify:
        oracle = minimize_gp_payout(econ, target, flags or OracleFlags(fno=schedule.fno), schedule.signal_kind)
        gap = abs(gp - oracle.value)
        if gap > ORACLE_TOL:
            raise OracleMismatch(f"{method}: closed form {gp:.12g} vs oracle {oracle.value:.12g}")
    effort = econ.c * sum(target.effort)
    return SolutionReport(
        method=method, contract=contract, schedule=schedule, gp_expected=gp,
        lp_expected=lp, total_surplus=total, regime=regime, binding=tuple(binding),
        oracle_gap=gap, economy=econ, strategy=target, gp_profit=gp - effort,
        lp_profit=lp - econ.capital, notes=dict(notes or {}),
    )


# -------------------------------------------------------- single project


def _check_single(R: float, I: float, c: float, proj: ProjectParams) -> None:
    fails = []
    if not R > I > 0:
        fails.append("R>I>0")
    if not c > 0:
        fails.append("c>0")
    if not (0 < proj.lam <= 1 and 0 <= proj.p < 1):
        fails.append("probability ranges")
    if not proj.p * R < I:
        fails.append("assumption1")
    if not (proj.lam > 0 and R - c / proj.lam > I):
        fails.append("assumption2")
    if fails:
        raise InvalidScenario("single project rejected: " + ", ".join(fails))


def solve_dbd_single(R: float, I: float, c: float, proj: ProjectParams, verify: bool = True) -> SolutionReport:
    """Single-project contract inducing effort and investment in good projects only."""
    _check_single(R, I, c, proj)
    sR = c / (proj.lam * (1 - proj.p))
    sI = proj.p * sR
    econ = Economy.single(R, I, c, proj)
    schedule = ContractSchedule.from_mapping(AGGREGATE, {0.0: 0.0, I: sI, R: sR})
    rep = _finish(
        "dbd", DbDContract(sI, sR), schedule, econ, single_project_strategy(4), "deal-by-deal",
        ("effort: effort vs none", "selection: s(I) = p*s(R)"), verify,
    )
    rep.notes["funded"] = rep.lp_profit >= 0
    return rep


def solve_fno_single(R: float, I: float, c: float, proj: ProjectParams, verify: bool = True) -> SolutionReport:
    """Single-project contract with nothing paid at or below the capital ``I``.

    Without a reward for returning capital the GP invests whatever type she
    draws, so the contract induces effort followed by investing regardless.
    """
    _check_single(R, I, c, proj)
    sR = c / (proj.lam * (1 - proj.p))
    econ = Economy.single(R, I, c, proj)
    schedule = ContractSchedule.from_mapping(AGGREGATE, {0.0: 0.0, I: 0.0, R: sR}, fno=True)
    rep = _finish(
        "dbd-fno", DbDContract(0.0, sR), schedule, econ, single_project_strategy(3), "deal-by-deal",
        ("effort: effort vs blind investing",), verify,
    )
    rep.notes["funded"] = rep.lp_profit >= 0
    return rep


def _composite(method: str, singles: list[SolutionReport], s: PortfolioScenario, target: GPStrategy, fno: bool):
    econ = Economy.from_scenario(s)
    per = [dict(r.schedule.payouts) for r in singles]
    mapping = {(a, b): per[0].get(a, 0.0) + per[1].get(b, 0.0) for a in per[0] for b in per[1]}
    schedule = ContractSchedule.from_mapping(PER_PROJECT, mapping, fno=fno)
    gp = sum(r.gp_expected for r in singles)
    gaps = [r.oracle_gap for r in singles]
    total = sum(r.total_surplus for r in singles)
    lp = total - gp
    return SolutionReport(
        method=method,
        contract=CompositeDbDContract(tuple(r.contract for r in singles)),
        schedule=schedule, gp_expected=gp, lp_expected=lp, total_surplus=total,
        regime="deal-by-deal", binding=tuple(f"project{i + 1} {b}" for i, r in enumerate(singles) for b in r.binding),
        oracle_gap=None if None in gaps else max(gaps), economy=econ, strategy=target,
        gp_profit=gp - econ.c * 2, lp_profit=lp - econ.capital,
        notes={"funded": all(r.notes["funded"] for r in singles)},
    )


def solve_dbd(s: PortfolioScenario, verify: bool = True) -> SolutionReport:
    """Two independent single-project contracts; payout is additive in per-project cash."""
    require_valid(s)
    singles = [solve_dbd_single(s.R, s.I, s.c, pr, verify) for pr in s.projects]
    return _composite("dbd", singles, s, first_best_strategy(), fno=False)


def solve_fno_dbd(s: PortfolioScenario, verify: bool = True) -> SolutionReport:
    require_valid(s)
    singles = [solve_fno_single(s.R, s.I, s.c, pr, verify) for pr in s.projects]
    blind = GPStrategy((True, True), tuple(
        (prof, (True, True)) for prof in (("G", "G"), ("G", "B"), ("B", "G"), ("B", "B"))
    ))
    return _composite("dbd-fno", singles, s, blind, fno=True)


# --------------------------------------------------------- whole portfolio


def _need_p1(s: PortfolioScenario) -> None:
    require_valid(s)
    if s.p1 <= 0:
        raise DegenerateAdverseSelection(
            "p1 = 0: no adverse selection, whole-portfolio formulas divide by p1; use the oracle"
        )


def wp_z(s: PortfolioScenario) -> tuple[float, str]:
    """Payout at 2I of the whole-portfolio contract and its regime."""
    _need_p1(s)
    k = coefficients(s)
    p1, c = s.p1, s.c
    if s.rho >= rho_threshold(s):
        return 2 * c / (k.beta * (1 - p1) / p1 + k.alpha * (1 - p1**2) / p1**2), "high-rho"
    denom = k.alpha * (1 - p1**2) / p1**2 + k.beta * (1 - p1) / p1 - k.lam_max * (1 - p1) / p1
    return c / denom, "low-rho"


def wp_gp_expected(s: PortfolioScenario) -> float:
    """Gross expected GP payment under the whole-portfolio contract, formula only."""
    z, regime = wp_z(s)
    if regime == "high-rho":
        return z + 2 * s.c
    return s.lam_max * z / s.p1 + (1 - s.lam_max) * z + s.c


def _lam_max_project(s: PortfolioScenario) -> int:
    return 1 if s.lam[0] >= s.lam[1] else 2


def solve_wp(s: PortfolioScenario, verify: bool = True) -> SolutionReport:
    """Whole-portfolio contract paying only on aggregate cash 2I, R+I, 2R."""
    z, regime = wp_z(s)
    p1, I, R = s.p1, s.I, s.R
    y, x = z / p1, z / p1**2
    econ = Economy.from_scenario(s)
    schedule = ContractSchedule.from_mapping(
        AGGREGATE, {0.0: 0.0, I: 0.0, R: 0.0, 2 * I: z, R + I: y, 2 * R: x}
    )
    effort = (
        "effort: both vs none" if regime == "high-rho"
        else f"effort: both vs project {_lam_max_project(s)} only"
    )
    rep = _finish(
        "wp", WPContract(x, y, z, regime), schedule, econ, first_best_strategy(), regime,
        (effort, "selection: z = p1*y", "selection: y = p1*x"), verify,
    )
    rep.notes["rho_star"] = rho_threshold(s)
    return rep


def wp_regime_bounds(s: PortfolioScenario) -> dict:
    """Upper bounds on z that each regime's proof relies on."""
    k = coefficients(s)
    out = {"high": s.p1 * s.c / (k.lam_max * (1 - s.p1))}
    out["low"] = s.p1 * s.c / ((1 - s.p1) * k.lam_min * (1 - s.rho)) if s.rho < 1 else float("inf")
    return out


def solve_fno_wp(s: PortfolioScenario, verify: bool = True) -> SolutionReport:
    """Whole-portfolio contract paying nothing at or below committed capital 2I."""
    _need_p1(s)
    k = coefficients(s)
    p1, c, I, R = s.p1, s.c, s.I, s.R
    if s.rho >= rho_threshold(s):
        y = 2 * p1 * c / (k.alpha - p1 * (p1 - k.beta_tilde))
        regime = "high-rho"
        effort = "effort: both vs none"
    else:
        theta_max = max(k.theta1, k.theta2)
        y = p1 * c / (k.alpha - p1 * (theta_max - k.beta_tilde))
        regime = "low-rho"
        effort = f"effort: both vs project {_lam_max_project(s)} only"
    x = y / p1
    z_rep, _ = wp_z(s)
    if abs(y * p1 - z_rep) > 1e-10 * max(1.0, z_rep):
        raise OracleMismatch(f"FNO payout y*p1={y * p1:.12g} differs from reputable z={z_rep:.12g}")
    econ = Economy.from_scenario(s)
    schedule = ContractSchedule.from_mapping(
        AGGREGATE, {0.0: 0.0, I: 0.0, R: 0.0, 2 * I: 0.0, R + I: y, 2 * R: x}, fno=True
    )
    rep = _finish(
        "wp-fno", FNOWPContract(x, y, regime), schedule, econ, fno_strategy(), regime,
        (effort, "selection: y = p1*x"), verify,
    )
    rep.notes["rho_star"] = rho_threshold(s)
    return rep


def fno_total_surplus(s: PortfolioScenario) -> float:
    k = coefficients(s)
    return 2 * k.alpha * s.R + k.beta_tilde * (s.R + s.I) + (1 - k.alpha - k.beta_tilde) * s.I


def wp_total_surplus(s: PortfolioScenario) -> float:
    k = coefficients(s)
    return 2 * k.alpha * s.R + k.beta * (s.R + s.I) + 2 * k.gamma * s.I


# ------------------------------------------------------------ conditional


def _conditional_rows(s: PortfolioScenario):
    """Constraints on v = (x, y1, y2, z) once off-path payouts are zero: rows a.v >= b."""
    (l1, l2), (p1, p2), c = s.lam, s.p, s.c
    k = coefficients(s)
    b1, b2 = l1 - k.alpha, l2 - k.alpha
    E = np.array([k.alpha, b1, b2, k.gamma])
    rows = [
        ("effort: both vs none", E - [0, 0, 0, 1], 2 * c),
        ("effort: both vs project 1 only", E - [0, l1, 0, 1 - l1], c),
        ("effort: both vs project 2 only", E - [0, 0, l2, 1 - l2], c),
        ("selection: z >= p1*y1", np.array([0, -p1, 0, 1.0]), 0.0),
        ("selection: z >= p2*y2", np.array([0, 0, -p2, 1.0]), 0.0),
        ("selection: z >= p1*p2*x", np.array([-p1 * p2, 0, 0, 1.0]), 0.0),
        ("selection: y1 >= p2*x", np.array([-p2, 1.0, 0, 0]), 0.0),
        ("selection: y2 >= p1*x", np.array([-p1, 0, 1.0, 0]), 0.0),
        ("order: x >= y1", np.array([1.0, -1, 0, 0]), 0.0),
        ("order: x >= y2", np.array([1.0, 0, -1, 0]), 0.0),
        ("order: y1 >= z", np.array([0, 1.0, 0, -1]), 0.0),
        ("order: y2 >= z", np.array([0, 0, 1.0, -1]), 0.0),
    ]
    return E, rows


def _conditional_candidates(s: PortfolioScenario):
    """Candidate (regime, v, binding) triples.

    ``all-binding`` sets z = p1*y1 = p2*y2 = p1*p2*x and picks z from the
    tightest effort row. The two corner families keep z = pi*yi and
    yj = pi*x for one project i only, leaving two free payouts pinned by a
    pair of effort rows.
    """
    (l1, l2), (p1, p2), c = s.lam, s.p, s.c
    E, rows = _conditional_rows(s)
    effort = rows[:3]
    out = []
    # One free payout z; every row is linear in z.
    shape = np.array([1 / (p1 * p2), 1 / p1, 1 / p2, 1.0])
    zs = []
    for label, a, b in effort:
        slope = a @ shape
        if slope <= FEAS_TOL:
            zs = None
            break
        zs.append((b / slope, label))
    if zs:
        z, label = max(zs)
        out.append(("all-binding", z * shape, (label, "selection: z = p1*y1 = p2*y2 = p1*p2*x")))
    # Corner for project i: v = B @ (x, y_i).
    for i, pi, pj in ((1, p1, p2), (2, p2, p1)):
        if i == 1:  # y2 = p1*x, z = p1*y1
            B = np.array([[1, 0], [0, 1], [p1, 0], [0, p1]], dtype=float)
        else:  # y1 = p2*x, z = p2*y2
            B = np.array([[1, 0], [p2, 0], [0, 1], [0, p2]], dtype=float)
        for (la, aa, ba), (lb, ab, bb) in itertools.combinations(effort, 2):
            M = np.array([aa @ B, ab @ B])
            if abs(np.linalg.det(M)) < 1e-14:
                continue
            u = np.linalg.solve(M, [ba, bb])
            j = 2 if i == 1 else 1
            out.append((
                f"corner-project-{i}", B @ u,
                (la, lb, f"selection: z = p{i}*y{i}", f"selection: y{j} = p{i}*x"),
            ))
    return E, rows, out


def conditional_closed_form(s: PortfolioScenario):
    """Cheapest self-consistent candidate; raises NoConsistentCandidate if none is feasible."""
    require_valid(s)
    if s.p2 <= 0:
        raise DegenerateAdverseSelection("conditional formulas divide by p2; use the oracle")
    E, rows, cands = _conditional_candidates(s)
    best = None
    for regime, v, binding in cands:
        if (v < -FEAS_TOL).any():
            continue
        scale = max(1.0, float(np.abs(v).max()))
        if all(a @ v >= b - FEAS_TOL * scale for _, a, b in rows):
            value = float(E @ v)
            # strict improvement only, so the all-binding pattern wins ties
            if best is None or value < best[0] - 1e-13:
                best = (value, regime, np.maximum(v, 0.0), binding)
    if best is None:
        raise NoConsistentCandidate("no candidate binding pattern is feasible")
    return best


def solve_conditional(s: PortfolioScenario, verify: bool = True, fallback: bool = True) -> SolutionReport:
    """Contract on the pair of per-project outcomes.

    Falls back to the oracle's schedule (flagged ``closed_form_miss``) when no
    candidate pattern is consistent and ``fallback`` is set.
    """
    econ = Economy.from_scenario(s)
    target = first_best_strategy()
    I, R = s.I, s.R
    try:
        value, regime, v, binding = conditional_closed_form(s)
    except NoConsistentCandidate:
        if not fallback:
            raise
        sol = minimize_gp_payout(econ, target, OracleFlags(), PER_PROJECT)
        rep = _finish("conditional", OracleContract(), sol.schedule, econ, target, "oracle", sol.binding, False)
        rep.oracle_gap = 0.0
        rep.notes["closed_form_miss"] = True
        return rep
    x, y1, y2, z = v
    schedule = ContractSchedule.from_mapping(
        PER_PROJECT, {(R, R): x, (R, I): y1, (I, R): y2, (I, I): z, (0.0, 0.0): 0.0}
    )
    rep = _finish(
        "conditional", ConditionalContract(x, y1, y2, z, regime), schedule, econ, target, regime,
        binding, verify, flags=OracleFlags(),
    )
    rep.notes["closed_form_miss"] = False
    return rep


# -------------------------------------------------- monotone everywhere


def monotone_thetas(s: PortfolioScenario) -> tuple[float, float]:
    p1, p2 = s.p
    return p1**2 / (1 - p1 + p1**2), p1 * p2 / (1 - p1 - p2 + 2 * p1 * p2)


def solve_wp_monotone(s: PortfolioScenario, verify: bool = True) -> SolutionReport:
    """Whole-portfolio contract whose payout is nondecreasing on every aggregate outcome.

    Only binds when R > 2I, where the single-project return R outranks 2I
    and must be paid at least z. With R < 2I the baseline contract is
    already monotone everywhere and is returned unchanged.
    """
    _need_p1(s)
    flags = OracleFlags(monotone_everywhere=True)
    econ = Economy.from_scenario(s)
    I, R, p1, c = s.I, s.R, s.p1, s.c
    claim = p1 <= 0.25
    if R < 2 * I:
        base = solve_wp(s, verify=False)
        schedule = ContractSchedule(AGGREGATE, base.schedule.payouts, monotone_everywhere=True)
        rep = _finish("wp-monotone", base.contract, schedule, econ, base.strategy, base.regime,
                      base.binding, verify, flags=flags)
        rep.notes.update(monotone_rho_claim_valid=claim, rho_star=rho_threshold(s))
        return rep
    if s.p2 <= 0:
        raise DegenerateAdverseSelection("monotone variant needs p2 > 0")
    value, v, binding = _monotone_vertex(s)
    x, y, z = v
    effort = [b for b in binding if b.startswith("effort")]
    regime = "high-rho" if effort == ["effort: both vs none"] else "low-rho" if len(effort) == 1 else "both-effort-rows"
    schedule = ContractSchedule.from_mapping(
        AGGREGATE, {0.0: 0.0, I: 0.0, R: z, 2 * I: z, R + I: y, 2 * R: x}, monotone_everywhere=True
    )
    rep = _finish(
        "wp-monotone", WPContract(x, y, z, regime, sR=z), schedule, econ, first_best_strategy(), regime,
        binding + ("order: s(R) = s(2I)",), verify, flags=flags,
    )
    rep.notes.update(
        monotone_rho_claim_valid=claim,
        theta_max=max(monotone_thetas(s)),
        textbook_pattern="selection: z = p1*y" in binding,
    )
    return rep


def _monotone_rows(s: PortfolioScenario):
    """Rows a.(x, y, z) >= b of the monotone problem with s(R) = s(2I) = z and s(I) = 0."""
    k = coefficients(s)
    p1, p2, c, lm = s.p1, s.p2, s.c, k.lam_max
    E = np.array([k.alpha, k.beta, k.gamma])
    j = _lam_max_project(s)
    rows = [
        ("effort: both vs none", E - [0, 0, 1], 2 * c),
        (f"effort: both vs project {j} only", E - [0, lm, 1 - lm], c),
        ("selection: z = p1*y", np.array([0, -p1, 1.0]), 0.0),
        ("selection: z = p1*p2*x + (p1+p2-2*p1*p2)*z", np.array([-p1 * p2, 0, 1 - p1 - p2 + 2 * p1 * p2]), 0.0),
        ("selection: y = p1*x + (1-p1)*z", np.array([-p1, 1.0, -(1 - p1)]), 0.0),
        ("order: x >= y", np.array([1.0, -1, 0]), 0.0),
        ("order: y >= z", np.array([0, 1.0, -1]), 0.0),
        ("order: z >= 0", np.array([0, 0, 1.0]), 0.0),
    ]
    return E, rows


def _monotone_vertex(s: PortfolioScenario):
    """Cheapest feasible vertex of the three-payout problem.

    The textbook pattern (z = p1*y with x = z/theta_max) is one of these
    vertices. When R is close to 2I or p1 is large, a vertex where z > p1*y
    can be cheaper, so all binding triples are checked.
    """
    E, rows = _monotone_rows(s)
    combos = sorted(itertools.combinations(range(len(rows)), 3), key=lambda cmb: 2 not in cmb)
    best = None
    for cmb in combos:
        M = np.array([rows[i][1] for i in cmb])
        if abs(np.linalg.det(M)) < 1e-13:
            continue
        v = np.linalg.solve(M, [rows[i][2] for i in cmb])
        scale = max(1.0, float(np.abs(v).max()))
        if all(a @ v >= b - FEAS_TOL * scale for _, a, b in rows):
            value = float(E @ v)
            if best is None or value < best[0] - 1e-13:
                best = (value, np.maximum(v, 0.0), tuple(rows[i][0] for i in cmb if not rows[i][0].startswith("order")))
    if best is None:
        raise NoConsistentCandidate("monotone problem has no feasible vertex")
    return best


# ---------------------------------------------------------- three points


@dataclass(frozen=True)
class ThreePointProject:
    """Single project whose return lies in {0, R1, R2}.

    A good project returns R1 with probability ``p`` and R2 otherwise; a bad
    one returns R1 with ``p1``, R2 with ``p2`` and 0 otherwise.
    """

    R1: float
    R2: float
    I: float
    c: float
    lam: float
    p: float
    p1: float
    p2: float

    def technology(self) -> Technology:
        good = tuple((v, q) for v, q in ((self.R1, self.p), (self.R2, 1 - self.p)) if q > 0)
        bad = tuple(
            (v, q) for v, q in ((self.R1, self.p1), (self.R2, self.p2), (0.0, 1 - self.p1 - self.p2)) if q > 0
        )
        return Technology(self.lam, good, bad)

    def economy(self) -> Economy:
        return Economy(self.I, self.c, (self.technology(),))


def validate_three_point(t: ThreePointProject) -> None:
    fails = []
    if not (t.I > 0 and t.c > 0):
        fails.append("I>0, c>0")
    if len({round(v, 9) for v in (0.0, t.I, t.R1, t.R2)}) < 4:
        fails.append("returns 0, I, R1, R2 must be distinct")
    if not (0 < t.lam <= 1 and 0 <= t.p <= 1 and t.p1 >= 0 and t.p2 >= 0 and t.p1 + t.p2 <= 1):
        fails.append("probability ranges")
    if not t.p1 * t.R1 + t.p2 * t.R2 < t.I:
        fails.append("bad project must have negative NPV")
    if fails:
        raise InvalidScenario("three-point project rejected: " + ", ".join(fails))


def three_point_corner(t: ThreePointProject) -> str:
    """Which payout is switched off: 'R2' when R1 carries relatively more good-type mass, else 'R1'."""
    lhs = (t.lam * (1 - t.p) + (1 - t.lam) * t.p2) * (t.p - t.p1)
    rhs = (t.lam * t.p + (1 - t.lam) * t.p1) * (1 - t.p - t.p2)
    return "R2" if lhs > rhs else "R1"


def solve_three_point_single(t: ThreePointProject, verify: bool = True) -> SolutionReport:
    """Cheapest contract inducing effort and good-only investment on a three-point project.

    With s(I) = p1*s(R1) + p2*s(R2) binding, the effort row is the line
    s(R1) = gamma_hat*s(R2) + zeta and the objective is linear along it, so
    one of the two payouts is zero.
    """
    validate_three_point(t)
    if abs(t.p - t.p1) < 1e-14:
        raise SingularSlope("good and bad types put the same mass on R1")
    gamma_hat = -(1 - t.p - t.p2) / (t.p - t.p1)
    zeta = t.c / (t.lam * (t.p - t.p1))
    if three_point_corner(t) == "R2":
        x, y = zeta, 0.0
    else:
        x, y = 0.0, -zeta / gamma_hat if gamma_hat != 0 else float("inf")
    if not (np.isfinite(x) and np.isfinite(y)) or x < -FEAS_TOL or y < -FEAS_TOL:
        raise Infeasible("the implied payout is negative: effort cannot be rewarded on the surviving outcome")
    sI = t.p1 * x + t.p2 * y
    econ = t.economy()
    schedule = ContractSchedule.from_mapping(AGGREGATE, {0.0: 0.0, t.I: sI, t.R1: x, t.R2: y})
    return _finish(
        "three-point", ThreePointContract(sI, x, y, gamma_hat, zeta), schedule, econ,
        single_project_strategy(4), f"zero-at-{three_point_corner(t)}",
        ("effort: effort vs none", "selection: s(I) = p1*s(R1) + p2*s(R2)"), verify,
        flags=OracleFlags(on_path_monotone=False),
    )


def intended_in_argmax(report: SolutionReport, tol: float = 1e-9) -> bool:
    """Is the report's target strategy a best response to its own schedule?"""
    return best_response(report.economy, report.schedule, tol).includes(report.strategy)
