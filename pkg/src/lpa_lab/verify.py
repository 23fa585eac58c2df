"""Random valid scenarios and the closed-form vs oracle equivalence suite."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .closed_form import (
    ThreePointProject,
    intended_in_argmax,
    solve_conditional,
    solve_dbd_single,
    solve_fno_single,
    solve_fno_wp,
    solve_three_point_single,
    solve_wp,
    solve_wp_monotone,
    validate_three_point,
)
from .core_model import PortfolioScenario, ProjectParams, validate_scenario
from .errors import Infeasible, InvalidScenario, LPAError

SOLVERS = ("dbd", "dbd-fno", "wp", "wp-fno", "conditional", "wp-monotone", "three-point")
GAP_TOL = 1e-8


def random_scenario(
    rng: np.random.Generator,
    R: tuple[float, float] = (1.2, 4.0),
    p_max: float = 0.45,
    rho: tuple[float, float] = (0.02, 0.98),
    min_p2: float = 1e-3,
) -> PortfolioScenario:
    """Rejection-sample a valid two-project scenario with I = 1.

    Correlation stays inside (0, 1) so every type profile has positive
    probability and no payout is off the equilibrium path by accident.
    """
    while True:
        lam = rng.uniform(0.05, 1.0, 2)
        p = rng.uniform(min_p2, p_max, 2)
        s = PortfolioScenario(
            R=float(rng.uniform(*R)), I=1.0, c=float(rng.uniform(0.01, 0.3)),
            projects=(ProjectParams(float(lam[0]), float(p[0])), ProjectParams(float(lam[1]), float(p[1]))),
            rho=float(rng.uniform(*rho)),
        )
        if validate_scenario(s).ok and abs(s.R - 2 * s.I) > 1e-3:
            return s


def random_three_point(rng: np.random.Generator) -> ThreePointProject:
    """Admissible three-point project whose optimal contract exists."""
    while True:
        R1, R2 = rng.uniform(1.2, 4.0, 2)
        lam, p = rng.uniform(0.1, 1.0), rng.uniform(0.0, 1.0)
        p1, p2 = rng.dirichlet((1.0, 1.0, 2.0))[:2] * rng.uniform(0.1, 0.9)
        t = ThreePointProject(float(R1), float(R2), 1.0, float(rng.uniform(0.01, 0.3)),
                              float(lam), float(p), float(p1), float(p2))
        try:
            validate_three_point(t)
            if abs(t.p - t.p1) < 1e-3 or abs(R1 - R2) < 1e-3:
                continue
            solve_three_point_single(t, verify=False)
        except (InvalidScenario, Infeasible):
            continue
        return t


@dataclass
class SolverStats:
    runs: int = 0
    max_gap: float = 0.0
    br_failures: int = 0
    errors: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"runs": self.runs, "max_gap": self.max_gap, "br_failures": self.br_failures,
                "errors": self.errors[:5]}


@dataclass
class VerifyReport:
    grid: int
    seed: int
    elapsed: float
    stats: dict

    @property
    def ok(self) -> bool:
        return all(st.max_gap <= GAP_TOL and not st.errors and st.br_failures == 0 for st in self.stats.values())

    def to_json(self) -> dict:
        return {"grid": self.grid, "seed": self.seed, "ok": self.ok, "elapsed": self.elapsed,
                "solvers": {k: v.to_json() for k, v in self.stats.items()}}


def _record(st: SolverStats, run) -> None:
    st.runs += 1
    try:
        rep = run()
    except LPAError as exc:
        st.errors.append(f"{type(exc).__name__}: {exc}")
        return
    st.max_gap = max(st.max_gap, rep.oracle_gap or 0.0)
    if not intended_in_argmax(rep):
        st.br_failures += 1


def run_equivalence(grid: int = 200, seed: int = 0, solvers=SOLVERS) -> VerifyReport:
    """Solve ``grid`` random scenarios with every solver, oracle check on."""
    rng = np.random.default_rng(seed)
    stats = {name: SolverStats() for name in solvers}
    start = time.perf_counter()
    for _ in range(grid):
        s = random_scenario(rng)
        t = random_three_point(rng) if "three-point" in stats else None
        for name, st in stats.items():
            if name == "dbd":
                for pr in s.projects:
                    _record(st, lambda pr=pr: solve_dbd_single(s.R, s.I, s.c, pr))
            elif name == "dbd-fno":
                for pr in s.projects:
                    _record(st, lambda pr=pr: solve_fno_single(s.R, s.I, s.c, pr))
            elif name == "wp":
                _record(st, lambda: solve_wp(s))
            elif name == "wp-fno":
                _record(st, lambda: solve_fno_wp(s))
            elif name == "conditional":
                _record(st, lambda: solve_conditional(s, fallback=False))
            elif name == "wp-monotone":
                _record(st, lambda: solve_wp_monotone(s))
            elif name == "three-point":
                _record(st, lambda: solve_three_point_single(t))
    return VerifyReport(grid, seed, time.perf_counter() - start, stats)
