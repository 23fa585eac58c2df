"""Economic primitives: projects, two-project scenarios, type distribution, outcome lattice.

Projects inside a :class:`PortfolioScenario` are always held in descending
order of the bad-type success rate ``p``; ``order`` remembers where each one
came from so reports can map back to the caller's numbering.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import InvalidScenario

PROFILES = (("G", "G"), ("G", "B"), ("B", "G"), ("B", "B"))
SCENARIO_FIELDS = {"R", "I", "c", "projects", "rho"}
OPTIONAL_SECTIONS = {"three_point", "power_cost"}
PROB_TOL = 1e-12


@dataclass(frozen=True)
class ProjectParams:
    lam: float  # P(type G | effort)
    p: float  # success probability of a type-B project


@dataclass(frozen=True)
class PortfolioScenario:
    R: float
    I: float
    c: float
    projects: tuple[ProjectParams, ProjectParams]
    rho: float
    order: tuple[int, int] = field(default=(0, 1), compare=False)

    def __post_init__(self):
        projects = tuple(self.projects)
        if len(projects) != 2:
            raise ValueError("a portfolio scenario holds exactly two projects")
        idx = sorted(range(2), key=lambda i: -projects[i].p)
        object.__setattr__(self, "projects", tuple(projects[i] for i in idx))
        object.__setattr__(self, "order", tuple(self.order[i] for i in idx))

    @property
    def lam(self) -> tuple[float, float]:
        return (self.projects[0].lam, self.projects[1].lam)

    @property
    def p(self) -> tuple[float, float]:
        return (self.projects[0].p, self.projects[1].p)

    @property
    def lam_min(self) -> float:
        return min(self.lam)

    @property
    def lam_max(self) -> float:
        return max(self.lam)

    @property
    def p1(self) -> float:
        return self.projects[0].p

    @property
    def p2(self) -> float:
        return self.projects[1].p

    def replace(self, **changes) -> "PortfolioScenario":
        """Copy with fields changed; ``lam1``/``lam2``/``p1``/``p2`` address stored positions."""
        projects = list(self.projects)
        for key in ("lam1", "lam2", "p1", "p2"):
            if key in changes:
                i = int(key[-1]) - 1
                attr = "lam" if key.startswith("lam") else "p"
                projects[i] = ProjectParams(**{**projects[i].__dict__, attr: changes.pop(key)})
        base = dict(R=self.R, I=self.I, c=self.c, projects=tuple(projects), rho=self.rho, order=self.order)
        base.update(changes)
        return PortfolioScenario(**base)

    def to_dict(self) -> dict:
        # Back in the caller's original numbering.
        original = [None, None]
        for proj, i in zip(self.projects, self.order):
            original[i] = {"lambda": proj.lam, "p": proj.p}
        return {"R": self.R, "I": self.I, "c": self.c, "projects": original, "rho": self.rho}


@dataclass(frozen=True)
class JointTypeDistribution:
    pGG: float
    pGB: float
    pBG: float
    pBB: float

    def as_dict(self) -> dict[tuple[str, str], float]:
        return dict(zip(PROFILES, (self.pGG, self.pGB, self.pBG, self.pBB)))

    def total(self) -> float:
        return self.pGG + self.pGB + self.pBG + self.pBB


@dataclass(frozen=True)
class OutcomeLattice:
    per_project: tuple[float, ...]
    aggregate: tuple[float, ...]
    on_path: tuple[float, ...]


@dataclass(frozen=True)
class ValidationReport:
    checks: Mapping[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, passed in self.checks.items() if not passed]


def _effort_mask(effort: Iterable[int] | tuple[bool, ...] | None, n: int = 2) -> tuple[bool, ...]:
    """Accept 1-based project numbers or an explicit boolean mask."""
    if effort is None:
        return (True,) * n
    effort = tuple(effort)
    if len(effort) == n and all(isinstance(e, bool) for e in effort):
        return effort
    members = set(effort)
    if not members <= set(range(1, n + 1)):
        raise ValueError(f"effort must name projects 1..{n}, got {sorted(members)}")
    return tuple(i + 1 in members for i in range(n))


def both_effort_distribution(lam1: float, lam2: float, rho: float) -> JointTypeDistribution:
    gg = rho * min(lam1, lam2)
    return JointTypeDistribution(gg, lam1 - gg, lam2 - gg, 1.0 - lam1 - lam2 + gg)


def validate_scenario(s: PortfolioScenario) -> ValidationReport:
    checks: dict[str, bool] = {
        "R>I>0": s.R > s.I > 0,
        "c>0": s.c > 0,
        "rho_in_unit_interval": 0.0 <= s.rho <= 1.0,
        # Aggregate outcomes R and I / 2I would otherwise be indistinguishable.
        "distinct_lattice": abs(s.R - s.I) > 1e-9 and abs(s.R - 2 * s.I) > 1e-9,
    }
    for k, proj in enumerate(s.projects, start=1):
        checks[f"lambda{k}_range"] = 0.0 < proj.lam <= 1.0
        checks[f"p{k}_range"] = 0.0 <= proj.p < 1.0
        checks[f"assumption1_project{k}"] = proj.p * s.R < s.I
        checks[f"assumption2_project{k}"] = proj.lam > 0 and s.R - s.c / proj.lam > s.I
    if checks["lambda1_range"] and checks["lambda2_range"]:
        j = both_effort_distribution(*s.lam, min(max(s.rho, 0.0), 1.0))
        checks["joint_nonnegative"] = min(j.pGB, j.pBG, j.pBB) >= -PROB_TOL
    else:
        checks["joint_nonnegative"] = False
    return ValidationReport(checks)


def require_valid(s: PortfolioScenario) -> None:
    report = validate_scenario(s)
    if not report.ok:
        raise InvalidScenario("scenario rejected: " + ", ".join(report.failures), report)


def joint_type_distribution(s: PortfolioScenario, effort=None) -> JointTypeDistribution:
    """Distribution over type profiles (project 1, project 2) given the effort subset.

    A project without effort is type B for sure; with effort on a single
    project its type is Bernoulli(lambda) and the other project is B.
    """
    require_valid(s)
    mask = _effort_mask(effort)
    l1, l2 = s.lam
    if all(mask):
        return both_effort_distribution(l1, l2, s.rho)
    if mask[0]:
        return JointTypeDistribution(0.0, l1, 0.0, 1.0 - l1)
    if mask[1]:
        return JointTypeDistribution(0.0, 0.0, l2, 1.0 - l2)
    return JointTypeDistribution(0.0, 0.0, 0.0, 1.0)


def outcome_lattice(s: PortfolioScenario, single: bool = False) -> OutcomeLattice:
    cash = (0.0, s.I, s.R)
    if single:
        return OutcomeLattice(cash, cash, (s.I, s.R))
    agg = tuple(sorted({a + b for a in cash for b in cash}))
    return OutcomeLattice(cash, agg, tuple(sorted((2 * s.I, s.R + s.I, 2 * s.R))))


def scenario_from_dict(data: Mapping) -> tuple[PortfolioScenario, dict]:
    """Parse the scenario JSON object; returns the scenario and any optional sections.

    Field names are exact and unknown top-level or per-project fields are
    rejected. Optional sections are passed back unvalidated; the method that
    uses them checks their contents.
    """
    if not isinstance(data, Mapping):
        raise InvalidScenario("scenario must be a JSON object")
    unknown = set(data) - SCENARIO_FIELDS - OPTIONAL_SECTIONS
    if unknown:
        raise InvalidScenario(f"unknown scenario fields: {sorted(unknown)}")
    missing = SCENARIO_FIELDS - set(data)
    if missing:
        raise InvalidScenario(f"missing scenario fields: {sorted(missing)}")
    projects = data["projects"]
    if not isinstance(projects, list) or len(projects) != 2:
        raise InvalidScenario("'projects' must be a list of two objects")
    parsed = []
    for proj in projects:
        if not isinstance(proj, Mapping) or set(proj) != {"lambda", "p"}:
            raise InvalidScenario("each project needs exactly the fields 'lambda' and 'p'")
        parsed.append(ProjectParams(_number(proj["lambda"]), _number(proj["p"])))
    s = PortfolioScenario(
        R=_number(data["R"]), I=_number(data["I"]), c=_number(data["c"]),
        projects=tuple(parsed), rho=_number(data["rho"]),
    )
    extras = {k: data[k] for k in OPTIONAL_SECTIONS if k in data}
    return s, extras


def load_scenario(path: str | Path) -> tuple[PortfolioScenario, dict]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InvalidScenario(f"{path}: not valid JSON ({exc})") from exc
    return scenario_from_dict(data)


def _number(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InvalidScenario(f"expected a number, got {v!r}")
    return float(v)
