"""Continuous effort with power costs, an investor who cannot see correlation, GP bargaining power."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .analysis import rho_double_star, rho_floor
from .closed_form import (
    SolutionReport,
    fno_total_surplus,
    solve_dbd,
    solve_fno_dbd,
    solve_fno_wp,
    solve_wp,
)
from .core_model import PortfolioScenario, validate_scenario
from .errors import InfeasibleParticipation, InvalidCost, InvalidScenario, NoInteriorOptimum
from .oracle import ContractSchedule

GOLDEN_TOL = 1e-10


# ---------------------------------------------------------- continuous effort


@dataclass(frozen=True)
class PowerCost:
    """Effort cost ``a * lam**m`` for reaching success probability ``lam``."""

    a: float
    m: float

    def __post_init__(self):
        if not (self.a > 0 and self.m > 2):
            raise InvalidCost(f"need a > 0 and m > 2, got a={self.a}, m={self.m}")

    def cost(self, lam):
        return self.a * lam**self.m

    def marginal(self, lam):
        return self.a * self.m * lam ** (self.m - 1)

    def curvature(self, lam):
        return self.a * self.m * (self.m - 1) * lam ** (self.m - 2)


@dataclass(frozen=True)
class PowerCostParams:
    a: float
    b: float
    m: float
    R: float
    I: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.m > 2):
            raise InvalidCost(f"need a, b > 0 and m > 2, got a={self.a}, b={self.b}, m={self.m}")
        if not self.R > self.I > 0:
            raise InvalidCost("need R > I > 0")

    @property
    def C(self) -> float:
        return (self.a / self.b) ** (1 / self.m)

    @property
    def d(self) -> float:
        """Witness ratio in (0, 1]; symmetric in (a, b)."""
        lo, hi = sorted((self.a, self.b))
        return ((lo / hi) ** (1 / self.m)) ** (1 / (self.m - 1))


@dataclass(frozen=True)
class ContinuousReport:
    method: str
    lam: tuple[float, ...]
    lam_first_best: tuple[float, ...]
    payout: dict
    lp_value: float
    gp_value: float
    numeric_lam: tuple[float, ...] | None = None

    def to_json(self) -> dict:
        return {
            "method": self.method, "lam": list(self.lam), "lam_first_best": list(self.lam_first_best),
            "contract": dict(self.payout), "lp_value": self.lp_value, "gp_value": self.gp_value,
            "numeric_lam": None if self.numeric_lam is None else list(self.numeric_lam),
        }


def golden_argmax(f, df, lo: float = 0.0, hi: float = 1.0) -> float:
    """Maximize a concave ``f`` on [lo, hi] by golden-section, then polish on ``df``.

    Golden-section alone resolves the argmax only to about sqrt(machine eps)
    on flat objectives; a root of the derivative inside the final bracket
    pins it to ~1e-15.
    """
    grid = np.linspace(lo, hi, 65)
    i = int(np.clip(np.argmax([f(t) for t in grid]), 1, len(grid) - 2))
    res = minimize_scalar(lambda t: -f(t), bracket=tuple(grid[i - 1:i + 2]), method="golden",
                          options={"xtol": GOLDEN_TOL})
    x = float(res.x)
    width = max(1e-6, 1e3 * np.sqrt(np.finfo(float).eps) * max(1.0, abs(x)))
    a, b = max(lo + 1e-15, x - width), min(hi, x + width)
    if df(a) > 0 > df(b):
        x = brentq(df, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    return x


def _dbd_objective(margin: float, cost: PowerCost, p: float):
    def f(lam):
        return lam * margin - (lam + (1 - lam) * p) * cost.marginal(lam) / (1 - p)

    def df(lam):
        return margin - ((1 - p) * cost.marginal(lam) + (lam + (1 - lam) * p) * cost.curvature(lam)) / (1 - p)

    return f, df


def solve_continuous_dbd(R: float, I: float, cost: PowerCost, p: float = 0.0, numeric: bool = False) -> ContinuousReport:
    """Single project where effort chooses the good-project probability continuously.

    The GP picks lam to maximize lam*s(R) + (1-lam)*s(I) - cost(lam), so the
    LP pays s(R) = c'(lam)/(1-p) and s(I) = p*s(R) to target lam.
    """
    if not 0 <= p < 1:
        raise InvalidScenario("p must lie in [0, 1)")
    margin = R - I
    if cost.marginal(1.0) <= margin:
        raise NoInteriorOptimum("marginal cost at lam = 1 does not exceed R - I")
    f, df = _dbd_objective(margin, cost, p)
    if df(1.0) >= 0:
        raise NoInteriorOptimum("LP objective still rising at lam = 1")
    lam_fb = (margin / (cost.a * cost.m)) ** (1 / (cost.m - 1))
    found = golden_argmax(f, df) if (numeric or p > 0) else None
    if p == 0:
        lam = (margin / (cost.a * cost.m**2)) ** (1 / (cost.m - 1))
    else:
        lam = found
    sR = cost.marginal(lam) / (1 - p)
    sI = p * sR
    gp = lam * sR + (1 - lam) * sI - cost.cost(lam)
    return ContinuousReport(
        "dbd", (lam,), (lam_fb,), {"sR": sR, "sI": sI}, float(f(lam)), float(gp),
        None if found is None else (found,),
    )


def solve_continuous_wp(params: PowerCostParams, numeric: bool = False) -> ContinuousReport:
    """Two projects, no adverse selection, a contract paying only when both succeed.

    The GP's first-order conditions give lam2 = C*lam1 with C = (a/b)^(1/m);
    the LP's problem is then one-dimensional in lam1.
    """
    a, b, m, margin = params.a, params.b, params.m, params.R - params.I
    C = params.C
    lam1 = ((1 + C) * margin / (a * m**2)) ** (1 / (m - 1))
    lam2 = C * lam1
    if max(lam1, lam2) >= 1:
        raise NoInteriorOptimum("implied effort reaches lam = 1")
    x = (a / C) * m * lam1 ** (m - 2)
    lp = lam1 * (1 + C) * margin * (1 - 1 / m)
    gp = lam1 * lam2 * x - a * lam1**m - b * lam2**m
    found = None
    if numeric:
        def f(t):
            return t * (1 + C) * margin - a * m * t**m

        def df(t):
            return (1 + C) * margin - a * m * m * t ** (m - 1)

        hi = min(1.0, 1.0 / C)
        t = golden_argmax(f, df, 0.0, hi)
        found = (t, C * t)
    fb = tuple((margin / (k * m)) ** (1 / (m - 1)) for k in (a, b))
    return ContinuousReport("wp", (lam1, lam2), fb, {"s2R": x}, float(lp), float(gp), found)


def witness_holds(d: float, m: float) -> bool:
    return (1 + d ** (m - 1)) ** m > (1 + d**m) ** (m - 1)


@dataclass(frozen=True)
class PowerComparison:
    wp_lp_value: float
    dbd_lp_value: float
    margin: float
    d: float
    witness: bool

    @property
    def wp_preferred(self) -> bool:
        return self.margin > 0

    def to_json(self) -> dict:
        return {
            "wp_lp_value": self.wp_lp_value, "dbd_lp_value": self.dbd_lp_value, "margin": self.margin,
            "d": self.d, "witness": self.witness, "preferred": "WP" if self.wp_preferred else "DBD",
        }


def compare_power(params: PowerCostParams) -> PowerComparison:
    wp = solve_continuous_wp(params)
    dbd = sum(
        solve_continuous_dbd(params.R, params.I, PowerCost(k, params.m)).lp_value for k in (params.a, params.b)
    )
    margin = wp.lp_value - dbd
    if not margin > 0:
        raise AssertionError(f"whole-portfolio LP value {wp.lp_value} not above deal-by-deal {dbd}")
    return PowerComparison(wp.lp_value, dbd, margin, params.d, witness_holds(params.d, params.m))


# -------------------------------------------------------- uninformed investor


@dataclass(frozen=True)
class UninformedScenario:
    base: PortfolioScenario
    rho_lo: float
    rho_hi: float

    def __post_init__(self):
        if not 0 <= self.rho_lo <= self.rho_hi <= 1:
            raise InvalidScenario("need 0 <= rho_lo <= rho_hi <= 1")
        for r in (self.rho_lo, self.rho_hi):
            rep = validate_scenario(self.base.replace(rho=r))
            if not rep.ok:
                raise InvalidScenario(f"scenario invalid at rho={r}: {rep.failures}", rep)


@dataclass(frozen=True)
class UninformedOffer:
    method: str
    chosen_rho: float
    report: SolutionReport
    curvature: float | None  # x - 2y + z of the offered contract

    def to_json(self) -> dict:
        return {
            "method": self.method, "chosen_rho": self.chosen_rho, "curvature": self.curvature,
            "report": self.report.to_json(),
        }


def solve_uninformed(u: UninformedScenario, verify: bool = True) -> UninformedOffer:
    """Investor who knows only an interval for rho.

    Under a whole-portfolio contract the GP's payoff moves with rho at rate
    lam_min*(x - 2y + z), which is positive for the offered shape, so the GP
    takes the top of the interval, and the investor plans for it.
    """
    top = u.base.replace(rho=u.rho_hi)
    threshold = rho_double_star(top)
    wp_wins = threshold.side == "wp-always" or (threshold.side == "interior" and u.rho_hi >= threshold.value)
    if not wp_wins:
        return UninformedOffer("DBD", u.rho_hi, solve_dbd(top, verify), None)
    rep = solve_wp(top, verify)
    k = rep.contract
    curvature = k.x - 2 * k.y + k.z
    if not curvature > 0:
        raise AssertionError(f"x - 2y + z = {curvature} is not positive")
    return UninformedOffer("WP", u.rho_hi, rep, curvature)


# ------------------------------------------------------------ bargaining power


def _scale(obj, k: float):
    if dataclasses.is_dataclass(obj):
        changes = {}
        for f in dataclasses.fields(obj):
            v = getattr(obj, f.name)
            if f.name in ("gamma_hat", "zeta"):
                continue
            if isinstance(v, float | np.floating):
                changes[f.name] = float(v) * k
            elif isinstance(v, tuple) and v and dataclasses.is_dataclass(v[0]):
                changes[f.name] = tuple(_scale(x, k) for x in v)
        return dataclasses.replace(obj, **changes)
    return obj


def scale_report(rep: SolutionReport, k: float) -> SolutionReport:
    """Multiply every payout by ``k`` >= 1.

    Each incentive row is (P_target - P_alt).s >= c*(effort gap) with a
    nonnegative right side, and selection and order rows have zero right
    sides, so scaling up keeps all of them.
    """
    if k < 1:
        raise ValueError("scaling below 1 can break effort incentives")
    sched = rep.schedule
    scaled = ContractSchedule(
        sched.signal_kind, tuple((s, v * k) for s, v in sched.payouts), sched.fno, sched.monotone_everywhere
    )
    gp = rep.gp_expected * k
    effort = rep.gp_expected - rep.gp_profit
    return dataclasses.replace(
        rep, contract=_scale(rep.contract, k), schedule=scaled, gp_expected=gp,
        lp_expected=rep.total_surplus - gp, gp_profit=gp - effort,
        lp_profit=rep.total_surplus - gp - rep.economy.capital, oracle_gap=None,
        notes={**rep.notes, "scale": k},
    )


@dataclass(frozen=True)
class BargainingReport:
    reputable: bool
    method: str
    chosen_rho: float
    total_surplus: float
    gp_value_gross: float  # E[payout] = total - 2I
    gp_value: float  # net of effort costs
    scale: float
    report: SolutionReport
    unique: bool = False
    checks: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "reputable": self.reputable, "method": self.method, "chosen_rho": self.chosen_rho,
            "total_surplus": self.total_surplus, "gp_value_gross": self.gp_value_gross,
            "gp_value": self.gp_value, "scale": self.scale, "unique": self.unique,
            "checks": dict(sorted(self.checks.items())), "report": self.report.to_json(),
        }


def _bargain(base: SolutionReport, reputable: bool, method: str, rho: float, checks: dict) -> BargainingReport:
    capital = base.economy.capital
    if base.total_surplus < capital:
        raise InfeasibleParticipation(
            f"expected cash {base.total_surplus:.6g} is below committed capital {capital:.6g}"
        )
    k = (base.total_surplus - capital) / base.gp_expected
    if k < 1:
        raise InfeasibleParticipation("investor-optimal contract already leaves the LP below break-even")
    rep = scale_report(base, k)
    return BargainingReport(
        reputable, method, rho, base.total_surplus, rep.gp_expected, rep.gp_profit, k, rep, False, checks,
    )


def solve_bargaining(s: PortfolioScenario, reputable: bool = True, verify: bool = True) -> BargainingReport:
    """GP writes the contract subject to incentive compatibility and LP break-even.

    The GP keeps all surplus above 2I. A representative contract scales the
    investor-optimal schedule up until the LP exactly breaks even; any
    incentive-compatible schedule with the same expected split is optimal too.
    """
    if reputable:
        dbd = solve_dbd(s, verify)
        if s.p1 > 0:
            wp = solve_wp(s, verify)
            checks = {"dbd_wp_same_value": abs(dbd.total_surplus - wp.total_surplus) <= 1e-10}
            return _bargain(wp, True, "WP", s.rho, checks)
        return _bargain(dbd, True, "DBD", s.rho, {"dbd_wp_same_value": True})
    # A non-reputable GP owning the contract also picks rho; FNO surplus falls in rho.
    floor = rho_floor(s)
    low = s.replace(rho=floor)
    dbd_total = solve_fno_dbd(low, verify=False).total_surplus
    wp_at_one = fno_total_surplus(s.replace(rho=1.0))
    checks = {"wp_beats_dbd_even_at_rho_1": wp_at_one > dbd_total}
    wp = solve_fno_wp(low, verify)
    if wp.total_surplus >= dbd_total:
        return _bargain(wp, False, "WP", floor, checks)
    return _bargain(solve_fno_dbd(low, verify), False, "DBD", floor, checks)
