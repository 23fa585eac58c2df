"""Thresholds, method comparisons, comparative statics and funding screens."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .closed_form import (
    rho_threshold,
    solve_dbd,
    solve_dbd_single,
    solve_fno_dbd,
    solve_fno_single,
    solve_fno_wp,
    solve_wp,
    wp_gp_expected,
)
from .core_model import PortfolioScenario, ProjectParams, validate_scenario
from .errors import InvalidScenario, RegimeStraddle
from .oracle import (
    AGGREGATE,
    Economy,
    OracleFlags,
    expected_total_and_lp_value,
    first_best_strategy,
    fno_strategy,
    minimize_gp_payout,
)

XTOL = 1e-10
MAXITER = 200
PREF_TOL = 1e-10


@dataclass(frozen=True)
class Threshold:
    value: float | None
    side: str  # "interior", "wp-always" or "dbd-always"


def rho_star(s: PortfolioScenario) -> float:
    """Regime threshold; values above 1 mean the low-rho regime applies for every rho."""
    return rho_threshold(s)


def rho_floor(s: PortfolioScenario) -> float:
    """Smallest correlation keeping P(BB) nonnegative."""
    return min(1.0, max(0.0, (s.lam[0] + s.lam[1] - 1.0) / s.lam_min))


def dbd_gp_expected(s: PortfolioScenario) -> float:
    return 2 * s.c + sum(pr.p * s.c / (pr.lam * (1 - pr.p)) for pr in s.projects)


def wp_is_decreasing(s: PortfolioScenario, points: int = 100) -> bool:
    grid = np.linspace(rho_floor(s), 1.0, points)
    vals = np.array([wp_gp_expected(s.replace(rho=float(r))) for r in grid])
    return bool((np.diff(vals) < 0).all())


def rho_double_star(s: PortfolioScenario) -> Threshold:
    """Correlation above which whole-portfolio contracting is cheaper for the LP.

    Root of wp(rho) = dbd on the admissible rho range, by bisection. The WP
    payment falls strictly in rho, so there is at most one crossing.
    """
    dbd = dbd_gp_expected(s)
    lo = rho_floor(s)

    def gap(r):
        return wp_gp_expected(s.replace(rho=float(r))) - dbd

    g_lo, g_hi = gap(lo), gap(1.0)
    if g_lo <= 0:
        return Threshold(None, "wp-always")
    if g_hi > 0:
        return Threshold(None, "dbd-always")
    root = bisect(gap, lo, 1.0, xtol=XTOL, maxiter=MAXITER)
    if root > rho_star(s) + XTOL and rho_star(s) <= 1:
        raise AssertionError(f"rho** = {root} exceeds rho* = {rho_star(s)}")
    return Threshold(float(root), "interior")


def p2_star(s: PortfolioScenario) -> Threshold:
    """Smallest p2 in [0, p1] at which whole-portfolio contracting is weakly better.

    Only the DBD payment depends on p2, and it rises with p2, so the WP
    region is an upper interval.
    """
    wp = wp_gp_expected(s)

    def gap(p2):
        return wp - dbd_gp_expected(s.replace(p2=float(p2)))

    if gap(0.0) <= 0:
        return Threshold(0.0, "wp-always")
    if gap(s.p1) > 0:
        return Threshold(s.p1, "dbd-always")
    return Threshold(float(bisect(gap, 0.0, s.p1, xtol=XTOL, maxiter=MAXITER)), "interior")


@dataclass(frozen=True)
class ComparisonReport:
    reputable: bool
    dbd_lp_value: float
    wp_lp_value: float
    dbd_gp_expected: float
    wp_gp_expected: float
    preferred: str
    rho_star: float | None
    rho_double_star: Threshold | None
    p2_star: Threshold | None
    containment_ok: bool

    def to_json(self) -> dict:
        def th(t):
            return None if t is None else {"value": t.value, "side": t.side}

        return {
            "reputable": self.reputable,
            "dbd_lp_value": self.dbd_lp_value,
            "wp_lp_value": self.wp_lp_value,
            "dbd_gp_expected": self.dbd_gp_expected,
            "wp_gp_expected": self.wp_gp_expected,
            "preferred": self.preferred,
            "rho_star": self.rho_star,
            "rho_double_star": th(self.rho_double_star),
            "p2_star": th(self.p2_star),
            "containment_ok": self.containment_ok,
        }


def _preferred(dbd_lp: float, wp_lp: float) -> str:
    if wp_lp > dbd_lp + PREF_TOL:
        return "WP"
    if dbd_lp > wp_lp + PREF_TOL:
        return "DBD"
    return "tie"


def method_values(s: PortfolioScenario, reputable: bool, verify: bool = False) -> tuple[float, float, float, float]:
    """(dbd LP value, wp LP value, dbd GP payment, wp GP payment)."""
    if reputable:
        dbd = solve_dbd(s, verify)
    else:
        dbd = solve_fno_dbd(s, verify)
    if s.p1 > 0:
        wp = solve_wp(s, verify) if reputable else solve_fno_wp(s, verify)
        return dbd.lp_expected, wp.lp_expected, dbd.gp_expected, wp.gp_expected
    # No adverse selection: the formulas are undefined, the oracle is not.
    econ = Economy.from_scenario(s)
    target = first_best_strategy() if reputable else fno_strategy()
    sol = minimize_gp_payout(econ, target, OracleFlags(fno=not reputable), AGGREGATE)
    total, lp = expected_total_and_lp_value(econ, sol.schedule, target)
    return dbd.lp_expected, lp, dbd.gp_expected, sol.value


def compare_methods(s: PortfolioScenario, reputable: bool = True, verify: bool = False) -> ComparisonReport:
    """LP's value from deal-by-deal vs whole-portfolio contracting.

    Also checks, on every call, that a reputable-WP preference carries over
    to the non-reputable case.
    """
    dlp, wlp, dgp, wgp = method_values(s, reputable, verify)
    pref = _preferred(dlp, wlp)
    other = _preferred(*method_values(s, not reputable, False)[:2])
    rep_pref, nr_pref = (pref, other) if reputable else (other, pref)
    containment = not (rep_pref == "WP" and nr_pref != "WP")
    have_p1 = s.p1 > 0
    return ComparisonReport(
        reputable=reputable, dbd_lp_value=dlp, wp_lp_value=wlp, dbd_gp_expected=dgp, wp_gp_expected=wgp,
        preferred=pref,
        rho_star=rho_star(s) if have_p1 else None,
        rho_double_star=rho_double_star(s) if have_p1 and reputable else None,
        p2_star=p2_star(s) if have_p1 and reputable else None,
        containment_ok=containment,
    )


# ----------------------------------------------------- comparative statics

EXPECTED_SIGNS = {
    "high-rho": {"p1": 1, "lam_max": -1, "lam_min": -1, "rho": -1},
    "low-rho": {"p1": 1, "lam_max": 1, "lam_min": -1, "rho": -1},
}
QUANTITIES = ("gp_expected", "gp_profit")  # same derivative: effort cost is fixed


@dataclass(frozen=True)
class SignReport:
    param: str
    target: str
    derivative: float
    sign: int
    expected_sign: int
    regime: str

    @property
    def agrees(self) -> bool:
        return self.sign == self.expected_sign


def _perturb(s: PortfolioScenario, param: str, h: float) -> PortfolioScenario:
    if param == "rho":
        return s.replace(rho=s.rho + h)
    if param == "p1":
        new = s.p1 + h
        # On a tie, lowering p1 alone would leave the larger p unchanged.
        return s.replace(p1=new, p2=min(s.p2, new))
    idx = int(np.argmax(s.lam)) if param == "lam_max" else int(np.argmin(s.lam))
    if s.lam[0] == s.lam[1]:
        idx = 0 if param == "lam_max" else 1
    out = s.replace(**{f"lam{idx + 1}": s.lam[idx] + h})
    if (param == "lam_max" and out.lam[idx] < out.lam[1 - idx]) or (
        param == "lam_min" and out.lam[idx] > out.lam[1 - idx]
    ):
        raise RegimeStraddle(f"perturbing {param} by {h:g} swaps which project has the larger lambda")
    return out


def _param_value(s: PortfolioScenario, param: str) -> float:
    return {"rho": s.rho, "p1": s.p1, "lam_max": s.lam_max, "lam_min": s.lam_min}[param]


def _regime(s: PortfolioScenario) -> str:
    return "high-rho" if s.rho >= rho_threshold(s) else "low-rho"


def comparative_statics(
    s: PortfolioScenario, param: str, target: str = "gp_expected", step: float = 1e-5
) -> SignReport:
    """Central-difference sign of a whole-portfolio quantity with respect to ``param``."""
    if param not in EXPECTED_SIGNS["high-rho"]:
        raise ValueError(f"param must be one of {sorted(EXPECTED_SIGNS['high-rho'])}")
    if target not in QUANTITIES:
        raise ValueError(f"target must be one of {QUANTITIES}")
    h = step * max(abs(_param_value(s, param)), 1e-2)
    lo, hi = _perturb(s, param, -h), _perturb(s, param, h)
    for side in (lo, hi):
        rep = validate_scenario(side)
        if not rep.ok:
            raise InvalidScenario(f"perturbed scenario invalid: {rep.failures}", rep)
    regime = _regime(s)
    if _regime(lo) != regime or _regime(hi) != regime:
        raise RegimeStraddle(f"step {h:g} in {param} crosses rho* = {rho_threshold(s):.6g}")
    f_hi = getattr(solve_wp(hi, verify=False), target)
    f_lo = getattr(solve_wp(lo, verify=False), target)
    d = (f_hi - f_lo) / (2 * h)
    sign = int(np.sign(d)) if abs(d) > 1e-12 else 0
    return SignReport(param, target, float(d), sign, EXPECTED_SIGNS[regime][param], regime)


# ------------------------------------------------------------- feasibility


@dataclass(frozen=True)
class FeasibilityReport:
    method: str
    reputable: bool
    valid: bool
    per_project: tuple[bool, ...]
    portfolio: bool
    lp_profit: float | None
    failures: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "method": self.method, "reputable": self.reputable, "valid": self.valid,
            "per_project": list(self.per_project), "portfolio": self.portfolio,
            "lp_profit": self.lp_profit, "failures": list(self.failures),
        }


def single_project_funding(R: float, I: float, c: float, proj: ProjectParams) -> dict:
    """LP profit of funding one project under the reputable and the capital-zeroed contract."""
    rep = solve_dbd_single(R, I, c, proj, verify=False)
    fno = solve_fno_single(R, I, c, proj, verify=False)
    return {
        "reputable_lp_profit": rep.lp_profit,
        "fno_lp_profit": fno.lp_profit,
        "reputable_funded": rep.lp_profit >= 0,
        "fno_funded": fno.lp_profit >= 0,
        # fno - reputable = (1 - lam)(p R - I) < 0: zeroing s(I) makes funding harder
        "fno_weaker": (fno.lp_profit >= 0) >= (rep.lp_profit >= 0),
    }


def feasibility(s: PortfolioScenario, method: str = "dbd", reputable: bool = True) -> FeasibilityReport:
    """Whether the LP breaks even; never raises on invalid input."""
    report = validate_scenario(s)
    if not report.ok:
        return FeasibilityReport(method, reputable, False, (False, False), False, None, tuple(report.failures))
    if method == "dbd":
        solve = solve_dbd_single if reputable else solve_fno_single
        singles = [solve(s.R, s.I, s.c, pr, verify=False) for pr in s.projects]
        per = tuple(r.lp_profit >= 0 for r in singles)
        profit = sum(r.lp_profit for r in singles)
        return FeasibilityReport(method, reputable, True, per, profit >= 0, profit)
    if method == "wp":
        if s.p1 <= 0:
            profit = method_values(s, reputable)[1] - 2 * s.I
        else:
            profit = (solve_wp if reputable else solve_fno_wp)(s, verify=False).lp_profit
        return FeasibilityReport(method, reputable, True, (), profit >= 0, profit)
    raise ValueError("method must be 'dbd' or 'wp'")


# ------------------------------------------------------------------- sweeps

SWEEP_PARAMS = ("rho", "lam1", "lam2", "p1", "p2", "c", "R", "I")
SWEEP_HEADER = ("param", "value", "gp_expected", "lp_expected", "preferred", "regime")


def sweep_rows(s: PortfolioScenario, param: str, values, reputable: bool = True) -> list[tuple]:
    """One row per value: WP payment and LP value, preferred method, WP regime."""
    if param not in SWEEP_PARAMS:
        raise ValueError(f"param must be one of {SWEEP_PARAMS}")
    rows = []
    for v in values:
        v = float(v)
        try:
            cell = s.replace(**{param: v})
            if not validate_scenario(cell).ok:
                raise InvalidScenario("invalid")
            cmp = compare_methods(cell, reputable)
            regime = _regime(cell) if cell.p1 > 0 else "no-adverse-selection"
            rows.append((param, v, cmp.wp_gp_expected, cmp.wp_lp_value, cmp.preferred, regime))
        except InvalidScenario:
            rows.append((param, v, None, None, "invalid", "invalid"))
    return rows


def format_number(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def sweep_csv(s: PortfolioScenario, param: str, values, reputable: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_HEADER)
    for row in sweep_rows(s, param, values, reputable):
        w.writerow([format_number(v) for v in row])
    return buf.getvalue()
