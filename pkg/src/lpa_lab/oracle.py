"""Brute-force ground truth over the GP's finite strategy space.

Every closed form in :mod:`lpa_lab.closed_form` is checked against two things
computed here with no algebra from the closed forms themselves:

* the GP's expected payoff from every (effort subset, investment policy)
  pair under a given payout schedule, and
* the cheapest schedule that makes a target strategy weakly optimal among
  all enumerated alternatives, found by a dense simplex.

Projects are described generically by return distributions for each type, so
the same machinery covers the binary model and three-point supports.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .core_model import PortfolioScenario, ProjectParams, both_effort_distribution, require_valid
from .errors import Infeasible, SignalMismatch
from .simplex import solve_covering_lp

AGGREGATE = "aggregate"
PER_PROJECT = "per-project"
TIE_TOL = 1e-9
KEY_DIGITS = 10


def signal_key(cash):
    if isinstance(cash, (tuple, list)):
        return tuple(round(float(v), KEY_DIGITS) + 0.0 for v in cash)
    return round(float(cash), KEY_DIGITS) + 0.0


def signal_cash(key) -> float:
    return float(sum(key)) if isinstance(key, tuple) else float(key)


@dataclass(frozen=True)
class Technology:
    lam: float
    good: tuple[tuple[float, float], ...]  # (cash, probability) for a type-G project
    bad: tuple[tuple[float, float], ...]

    @classmethod
    def binary(cls, R: float, proj: ProjectParams) -> "Technology":
        bad = tuple((v, q) for v, q in ((R, proj.p), (0.0, 1.0 - proj.p)) if q > 0)
        return cls(proj.lam, ((R, 1.0),), bad)


@dataclass(frozen=True)
class Economy:
    I: float
    c: float
    techs: tuple[Technology, ...]
    rho: float = 0.0

    @classmethod
    def from_scenario(cls, s: PortfolioScenario) -> "Economy":
        require_valid(s)
        return cls(s.I, s.c, tuple(Technology.binary(s.R, pr) for pr in s.projects), s.rho)

    @classmethod
    def single(cls, R: float, I: float, c: float, proj: ProjectParams) -> "Economy":
        return cls(I, c, (Technology.binary(R, proj),))

    @property
    def n(self) -> int:
        return len(self.techs)

    @property
    def capital(self) -> float:
        return self.n * self.I

    def type_distribution(self, effort: tuple[bool, ...]) -> dict[tuple[str, ...], float]:
        lam = [t.lam if e else 0.0 for t, e in zip(self.techs, effort)]
        if self.n == 1:
            return {("G",): lam[0], ("B",): 1.0 - lam[0]}
        if all(effort):
            j = both_effort_distribution(lam[0], lam[1], self.rho)
            return {("G", "G"): j.pGG, ("G", "B"): j.pGB, ("B", "G"): j.pBG, ("B", "B"): j.pBB}
        # at most one project has effort: independent, the other is B
        return {
            ("G", "G"): 0.0 if not all(effort) else lam[0] * lam[1],
            ("G", "B"): lam[0] * (1 - lam[1]),
            ("B", "G"): (1 - lam[0]) * lam[1],
            ("B", "B"): (1 - lam[0]) * (1 - lam[1]),
        }


def as_economy(model) -> Economy:
    if isinstance(model, Economy):
        return model
    if isinstance(model, PortfolioScenario):
        return Economy.from_scenario(model)
    raise TypeError(f"expected Economy or PortfolioScenario, got {type(model).__name__}")


@dataclass(frozen=True)
class GPStrategy:
    effort: tuple[bool, ...]
    policy: tuple[tuple[tuple[str, ...], tuple[bool, ...]], ...]
    name: str = field(default="", compare=False)

    def action(self, profile: tuple[str, ...]) -> tuple[bool, ...]:
        for prof, act in self.policy:
            if prof == profile:
                return act
        raise KeyError(profile)

    def describe(self) -> str:
        if self.name:
            return self.name
        eff = "{" + ",".join(str(i + 1) for i, e in enumerate(self.effort) if e) + "}"
        pol = ";".join(
            "".join(prof) + ":" + "".join("I" if a else "S" for a in act) for prof, act in self.policy
        )
        return f"effort={eff} policy[{pol}]"

    @classmethod
    def from_dict(cls, data: dict, n: int) -> "GPStrategy":
        effort = tuple(i + 1 in set(data["effort"]) for i in range(n))
        policy = data["policy"]
        rows = []
        for prof in reachable_profiles(effort):
            acts = policy["".join(prof)]
            rows.append((prof, tuple(a == "invest" for a in acts)))
        return cls(effort, tuple(rows))

    def to_dict(self) -> dict:
        return {
            "effort": [i + 1 for i, e in enumerate(self.effort) if e],
            "policy": {"".join(p): ["invest" if a else "safe" for a in act] for p, act in self.policy},
        }


def reachable_profiles(effort: tuple[bool, ...]) -> list[tuple[str, ...]]:
    options = [("G", "B") if e else ("B",) for e in effort]
    return list(itertools.product(*options))


def strategy_from_rule(effort: tuple[bool, ...], rule, name: str = "") -> GPStrategy:
    """Build a strategy from ``rule(profile) -> actions`` over reachable profiles."""
    return GPStrategy(effort, tuple((prof, tuple(rule(prof))) for prof in reachable_profiles(effort)), name)


def single_project_strategy(k: int) -> GPStrategy:
    """The four single-project strategies: 1 safe, 2 invest blind, 3 effort+invest always, 4 effort+invest if G."""
    table = {
        1: ((False,), lambda prof: (False,)),
        2: ((False,), lambda prof: (True,)),
        3: ((True,), lambda prof: (True,)),
        4: ((True,), lambda prof: (prof[0] == "G",)),
    }
    effort, rule = table[k]
    return strategy_from_rule(effort, rule, name=f"strategy {k}")


def first_best_strategy(n: int = 2) -> GPStrategy:
    """Effort everywhere, invest exactly the good projects."""
    if n == 1:
        return single_project_strategy(4)
    return strategy_from_rule((True,) * n, lambda prof: tuple(t == "G" for t in prof))


def fno_strategy(n: int = 2) -> GPStrategy:
    """Constrained optimum when payouts at or below committed capital are zero.

    Effort on every project; invest good projects only, except that with no
    good project the GP still invests the first (highest-p) one.
    """
    if n == 1:
        return single_project_strategy(3)

    def rule(prof):
        if "G" in prof:
            return tuple(t == "G" for t in prof)
        return tuple(i == 0 for i in range(len(prof)))

    return strategy_from_rule((True,) * n, rule)


def enumerate_strategies(model) -> list[GPStrategy]:
    """Every distinct (effort, policy) pair, in a fixed order.

    With one project only the four classic strategies are returned: the two
    remaining policies (effort, then never invest a good project) pay
    ``lam*s(I) + (1-lam)*ps(R) - c`` at most, which is strictly below the
    better of strategies 1 and 2 for every schedule, so they never matter.
    With two projects every policy is kept: 4 + 16 + 16 + 256 = 292.
    """
    econ = as_economy(model)
    return list(_strategies(econ.n))


@lru_cache(maxsize=None)
def _strategies(n: int) -> tuple[GPStrategy, ...]:
    if n == 1:
        return tuple(single_project_strategy(k) for k in (1, 2, 3, 4))
    out = []
    for effort in itertools.product((False, True), repeat=n):
        profiles = reachable_profiles(effort)
        actions = list(itertools.product((True, False), repeat=n))
        for choice in itertools.product(actions, repeat=len(profiles)):
            out.append(GPStrategy(effort, tuple(zip(profiles, choice))))
    return tuple(out)


@dataclass(frozen=True)
class ContractSchedule:
    signal_kind: str
    payouts: tuple[tuple[object, float], ...]
    fno: bool = False
    monotone_everywhere: bool = False

    @classmethod
    def from_mapping(cls, signal_kind: str, mapping, fno=False, monotone_everywhere=False):
        items = {}
        for k, v in dict(mapping).items():
            if v < 0:
                raise ValueError(f"limited liability violated: payout {v} at {k}")
            items[signal_key(k)] = items.get(signal_key(k), 0.0) + float(v)
        ordered = tuple(sorted(items.items(), key=lambda kv: (signal_cash(kv[0]), str(kv[0]))))
        return cls(signal_kind, ordered, fno, monotone_everywhere)

    def payout(self, signal) -> float:
        key = signal_key(signal)
        for k, v in self.payouts:
            if k == key:
                return v
        return 0.0

    def as_dict(self) -> dict:
        return dict(self.payouts)

    def to_json(self) -> list[dict]:
        return [
            {"signal": list(k) if isinstance(k, tuple) else k, "payout": v} for k, v in self.payouts
        ]

    @classmethod
    def from_json(cls, signal_kind: str, rows: Sequence[dict], fno=False, monotone_everywhere=False):
        mapping = {}
        for row in rows:
            sig = row["signal"]
            mapping[tuple(sig) if isinstance(sig, list) else sig] = row["payout"]
        return cls.from_mapping(signal_kind, mapping, fno, monotone_everywhere)


@dataclass(frozen=True)
class _Model:
    signals: tuple
    cash: np.ndarray
    index: dict
    cost: np.ndarray  # effort cost per enumerated strategy
    P: np.ndarray  # signal probabilities per enumerated strategy


def _project_outcomes(tech: Technology, typ: str, invest: bool, I: float):
    if not invest:
        return ((I, 1.0),)
    return tech.good if typ == "G" else tech.bad


@lru_cache(maxsize=256)
def _outcome_table(econ: Economy, kind: str):
    """Signal distribution for each (profile, action vector); the lattice is their union."""
    table = {}
    signals = set()
    for prof in itertools.product("GB", repeat=econ.n):
        for act in itertools.product((True, False), repeat=econ.n):
            dist: dict = {}
            per = [_project_outcomes(t, typ, a, econ.I) for t, typ, a in zip(econ.techs, prof, act)]
            for combo in itertools.product(*per):
                q = float(np.prod([pr for _, pr in combo]))
                cash = [v for v, _ in combo]
                key = signal_key(tuple(cash)) if kind == PER_PROJECT else signal_key(sum(cash))
                dist[key] = dist.get(key, 0.0) + q
            table[(prof, act)] = dist
            signals.update(dist)
    ordered = tuple(sorted(signals, key=lambda k: (signal_cash(k), str(k))))
    return table, ordered


def _check_kind(econ: Economy, kind: str) -> None:
    if kind not in (AGGREGATE, PER_PROJECT):
        raise SignalMismatch(f"unknown signal kind {kind!r}")
    if kind == PER_PROJECT and econ.n == 1:
        raise SignalMismatch("per-project signals need two projects")


def strategy_signal_probs(econ: Economy, strategy: GPStrategy, kind: str = AGGREGATE) -> np.ndarray:
    table, signals = _outcome_table(econ, kind)
    index = {k: i for i, k in enumerate(signals)}
    vec = np.zeros(len(signals))
    types = econ.type_distribution(strategy.effort)
    for prof, act in strategy.policy:
        w = types.get(prof, 0.0)
        if w == 0.0:
            continue
        for key, q in table[(prof, act)].items():
            vec[index[key]] += w * q
    return vec


@lru_cache(maxsize=256)
def _model(econ: Economy, kind: str) -> _Model:
    _check_kind(econ, kind)
    _, signals = _outcome_table(econ, kind)
    strategies = _strategies(econ.n)
    P = np.array([strategy_signal_probs(econ, g, kind) for g in strategies])
    cost = np.array([econ.c * sum(g.effort) for g in strategies])
    cash = np.array([signal_cash(k) for k in signals])
    return _Model(signals, cash, {k: i for i, k in enumerate(signals)}, cost, P)


def lattice(model, kind: str = AGGREGATE) -> tuple:
    """All signals the economy can produce under some strategy, in cash order."""
    return _model(as_economy(model), kind).signals


def _payout_vector(m: _Model, schedule: ContractSchedule, kind: str) -> np.ndarray:
    if schedule.signal_kind != kind:
        raise SignalMismatch(f"schedule uses {schedule.signal_kind} signals, expected {kind}")
    s = np.zeros(len(m.signals))
    for key, v in schedule.payouts:
        if key not in m.index:
            raise SignalMismatch(f"signal {key!r} is not an outcome of this economy")
        s[m.index[key]] = v
    return s


def expected_gp_payout(model, schedule: ContractSchedule, strategy: GPStrategy) -> float:
    """Gross expected payment to the GP (before effort costs)."""
    econ = as_economy(model)
    m = _model(econ, schedule.signal_kind)
    s = _payout_vector(m, schedule, schedule.signal_kind)
    return float(strategy_signal_probs(econ, strategy, schedule.signal_kind) @ s)


def expected_gp_value(model, schedule: ContractSchedule, strategy: GPStrategy) -> float:
    """GP's expected payout net of effort costs ``c`` per project worked on."""
    econ = as_economy(model)
    return expected_gp_payout(econ, schedule, strategy) - econ.c * sum(strategy.effort)


def expected_total_and_lp_value(model, schedule: ContractSchedule, strategy: GPStrategy):
    """Expected portfolio cash (projects plus safe holdings) and the LP's share of it."""
    econ = as_economy(model)
    m = _model(econ, schedule.signal_kind)
    s = _payout_vector(m, schedule, schedule.signal_kind)
    probs = strategy_signal_probs(econ, strategy, schedule.signal_kind)
    total = float(probs @ m.cash)
    return total, total - float(probs @ s)


@dataclass(frozen=True)
class BestResponse:
    strategy: GPStrategy
    value: float
    ties: tuple[GPStrategy, ...]

    def __iter__(self):
        return iter((self.strategy, self.value))

    def includes(self, strategy: GPStrategy) -> bool:
        return strategy in self.ties


def best_response(model, schedule: ContractSchedule, tol: float = TIE_TOL) -> BestResponse:
    econ = as_economy(model)
    m = _model(econ, schedule.signal_kind)
    s = _payout_vector(m, schedule, schedule.signal_kind)
    values = m.P @ s - m.cost
    top = float(values.max())
    strategies = _strategies(econ.n)
    idx = np.flatnonzero(values >= top - tol)
    # Ties go the principal's way: highest LP value, then enumeration order.
    lp = m.P[idx] @ (m.cash - s)
    pick = idx[int(np.flatnonzero(lp >= lp.max() - tol)[0])]
    return BestResponse(strategies[pick], top, tuple(strategies[i] for i in idx))


@dataclass(frozen=True)
class OracleFlags:
    fno: bool = False
    monotone_everywhere: bool = False
    on_path_monotone: bool = True


@dataclass(frozen=True)
class OracleSolution:
    schedule: ContractSchedule
    value: float
    binding: tuple[str, ...]
    rows: int


def constraint_rows(econ: Economy, target: GPStrategy, flags: OracleFlags, kind: str):
    """Affine rows ``a.s >= b`` over the full signal vector, with labels."""
    m = _model(econ, kind)
    pt = strategy_signal_probs(econ, target, kind)
    ct = econ.c * sum(target.effort)
    rows, rhs, labels = [], [], []
    for g, pg, cg in zip(_strategies(econ.n), m.P, m.cost):
        if g == target:
            continue
        rows.append(pt - pg)
        rhs.append(ct - cg)
        labels.append(f"IC vs {g.describe()}")
    n = len(m.signals)

    def order_rows(indices):
        for a, b in itertools.combinations(sorted(indices, key=lambda i: m.cash[i]), 2):
            if m.cash[a] < m.cash[b] - 1e-12:
                row = np.zeros(n)
                row[b], row[a] = 1.0, -1.0
                rows.append(row)
                rhs.append(0.0)
                labels.append(f"order s({m.signals[a]}) <= s({m.signals[b]})")

    if flags.monotone_everywhere:
        order_rows(range(n))
    elif flags.on_path_monotone:
        order_rows(np.flatnonzero(pt > 1e-15))
    A = np.array(rows) if rows else np.zeros((0, n))
    return A, np.array(rhs), labels, pt


def minimize_gp_payout(
    model, target: GPStrategy, flags: OracleFlags | None = None, signal_kind: str = AGGREGATE
) -> OracleSolution:
    """Cheapest nonnegative schedule under which ``target`` is a best response.

    Constraints: target weakly beats each enumerated alternative, limited
    liability, on-path (or global) monotonicity of the GP's payout, and zero
    payouts at or below committed capital when ``flags.fno`` is set.
    """
    econ = as_economy(model)
    flags = flags or OracleFlags()
    m = _model(econ, signal_kind)
    A, b, labels, pt = constraint_rows(econ, target, flags, signal_kind)
    free = np.ones(len(m.signals), dtype=bool)
    if flags.fno:
        free &= m.cash > econ.capital + 1e-12
    cols = np.flatnonzero(free)
    if cols.size == 0:
        if (b > 1e-12).any():
            raise Infeasible("all payouts are forced to zero and the target needs a reward")
        x = np.zeros(0)
        value = 0.0
        kept = np.arange(0)
    else:
        res = solve_covering_lp(pt[cols], A[:, cols], b)
        x, value, kept = res.x, res.value, res.kept_rows
    full = np.zeros(len(m.signals))
    full[cols] = x
    residual = A @ full - b
    binding = tuple(labels[i] for i in np.flatnonzero(np.abs(residual) <= 1e-9) if i in set(kept))
    schedule = ContractSchedule.from_mapping(
        signal_kind,
        {k: float(v) for k, v in zip(m.signals, full)},
        fno=flags.fno,
        monotone_everywhere=flags.monotone_everywhere,
    )
    return OracleSolution(schedule, float(value), binding, int(len(b)))


def joint_signal_distribution(model, strategy: GPStrategy, kind: str = AGGREGATE) -> dict:
    econ = as_economy(model)
    m = _model(econ, kind)
    probs = strategy_signal_probs(econ, strategy, kind)
    return {k: float(q) for k, q in zip(m.signals, probs) if q > 0}


def on_path_signals(model, strategy: GPStrategy, kind: str = AGGREGATE) -> tuple:
    return tuple(joint_signal_distribution(model, strategy, kind))


def strategies_with_effort(model, effort: Iterable[int]) -> list[GPStrategy]:
    econ = as_economy(model)
    mask = tuple(i + 1 in set(effort) for i in range(econ.n))
    return [g for g in _strategies(econ.n) if g.effort == mask]
