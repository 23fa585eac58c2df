"""Command-line front end.

Data goes to stdout (or ``--output``), diagnostics to stderr. Exit codes:
0 success, 2 invalid input, 3 infeasible, 4 closed form disagrees with the oracle.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, closed_form, extensions, montecarlo, verify
from .core_model import PortfolioScenario, load_scenario, require_valid
from .errors import (
    Infeasible,
    InfeasibleParticipation,
    InvalidCost,
    InvalidScenario,
    LPAError,
    NoConsistentCandidate,
    NoInteriorOptimum,
    OracleMismatch,
)
from .oracle import ContractSchedule, Economy, GPStrategy

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_MISMATCH = 0, 2, 3, 4
METHODS = ("dbd", "wp", "wp-fno", "conditional", "wp-monotone", "three-point", "continuous")
THREE_POINT_FIELDS = {"R1", "R2", "lambda", "p", "p1", "p2"}
POWER_FIELDS = {"a", "b", "m"}


def clean(obj):
    """Round floats to 12 significant digits; non-finite values become null."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return float(f"{v:.12g}") if math.isfinite(v) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2) + "\n"


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _section(extras: dict, name: str, fields: set) -> dict:
    if name not in extras:
        raise InvalidScenario(f"method needs a '{name}' section in the scenario file")
    sec = extras[name]
    if not isinstance(sec, dict) or set(sec) != fields:
        raise InvalidScenario(f"'{name}' needs exactly the fields {sorted(fields)}")
    for k, v in sec.items():
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidScenario(f"'{name}.{k}' must be a number")
    return sec


def three_point_project(s: PortfolioScenario, extras: dict) -> closed_form.ThreePointProject:
    sec = _section(extras, "three_point", THREE_POINT_FIELDS)
    return closed_form.ThreePointProject(
        float(sec["R1"]), float(sec["R2"]), s.I, s.c, float(sec["lambda"]),
        float(sec["p"]), float(sec["p1"]), float(sec["p2"]),
    )


def power_params(s: PortfolioScenario, extras: dict) -> extensions.PowerCostParams:
    sec = _section(extras, "power_cost", POWER_FIELDS)
    return extensions.PowerCostParams(float(sec["a"]), float(sec["b"]), float(sec["m"]), s.R, s.I)


def solve_report(s: PortfolioScenario, extras: dict, method: str, reputable: bool, check: bool):
    """Returns (json-able dict, SolutionReport or None)."""
    if method == "three-point":
        rep = closed_form.solve_three_point_single(three_point_project(s, extras), check)
        return rep.to_json(), rep
    if method == "continuous":
        params = power_params(s, extras)
        out = {
            "dbd": [
                extensions.solve_continuous_dbd(s.R, s.I, extensions.PowerCost(k, params.m), pr.p).to_json()
                for k, pr in zip((params.a, params.b), s.projects)
            ]
        }
        if all(pr.p == 0 for pr in s.projects):
            out["wp"] = extensions.solve_continuous_wp(params).to_json()
            out["comparison"] = extensions.compare_power(params).to_json()
        return out, None
    require_valid(s)
    if method == "dbd":
        rep = (closed_form.solve_dbd if reputable else closed_form.solve_fno_dbd)(s, check)
    elif method == "wp":
        rep = (closed_form.solve_wp if reputable else closed_form.solve_fno_wp)(s, check)
    elif method == "wp-fno":
        rep = closed_form.solve_fno_wp(s, check)
    elif method == "conditional":
        rep = closed_form.solve_conditional(s, check)
    elif method == "wp-monotone":
        rep = closed_form.solve_wp_monotone(s, check)
    else:
        raise InvalidScenario(f"unknown method {method}")
    return rep.to_json(), rep


def cmd_solve(args) -> int:
    s, extras = load_scenario(args.scenario)
    out, _ = solve_report(s, extras, args.method, args.reputable, not args.no_verify)
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    s, _ = load_scenario(args.scenario)
    require_valid(s)
    rep = analysis.compare_methods(s, args.reputable, verify=not args.no_verify)
    _emit(dumps(rep.to_json()), args.output)
    return EXIT_OK


def cmd_thresholds(args) -> int:
    s, _ = load_scenario(args.scenario)
    require_valid(s)
    rs = analysis.rho_star(s)
    rss = analysis.rho_double_star(s)
    p2s = analysis.p2_star(s)
    out = {
        "rho_star": rs,
        "low_rho_everywhere": rs > 1,
        "rho_double_star": {"value": rss.value, "side": rss.side},
        "p2_star": {"value": p2s.value, "side": p2s.side},
    }
    _emit(dumps(out), args.output)
    return EXIT_OK


def cmd_sweep(args) -> int:
    s, _ = load_scenario(args.scenario)
    if args.steps < 1:
        raise InvalidScenario("--steps must be at least 1")
    values = np.linspace(args.start, args.stop, args.steps)
    _emit(analysis.sweep_csv(s, args.param, values, args.reputable), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    rep = verify.run_equivalence(args.grid, args.seed)
    out = rep.to_json()
    out.pop("elapsed")  # keep output byte-stable
    _emit(dumps(out), args.output)
    if not rep.ok:
        print("oracle equivalence failed", file=sys.stderr)
        return EXIT_MISMATCH
    return EXIT_OK


def _contract_from_file(path: str, s: PortfolioScenario, extras: dict):
    data = json.loads(Path(path).read_text())
    for key in ("schedule", "signal_kind", "strategy", "method"):
        if key not in data:
            raise InvalidScenario(f"contract file lacks '{key}'")
    if data["method"] == "three-point":
        econ = three_point_project(s, extras).economy()
    else:
        require_valid(s)
        econ = Economy.from_scenario(s)
    schedule = ContractSchedule.from_json(data["signal_kind"], data["schedule"], fno=bool(data.get("fno")))
    strategy = GPStrategy.from_dict(data["strategy"], econ.n)
    return econ, schedule, strategy


def cmd_simulate(args) -> int:
    s, extras = load_scenario(args.scenario)
    if args.contract:
        econ, schedule, strategy = _contract_from_file(args.contract, s, extras)
    else:
        if args.method == "continuous":
            raise InvalidScenario("continuous-effort contracts cannot be simulated")
        _, rep = solve_report(s, extras, args.method, args.reputable, check=False)
        econ, schedule, strategy = rep.economy, rep.schedule, rep.strategy
    if args.best_response:
        strategy = None
    cfg = montecarlo.SimConfig(args.trials, args.seed, econ, schedule, strategy)
    rep = montecarlo.simulate(cfg, trial_csv=args.trials_csv)
    _emit(dumps(rep.to_json()), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lpa-lab", description="Limited-partnership contract design lab.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p, scenario=True, reputation=True):
        if scenario:
            p.add_argument("--scenario", required=True, help="scenario JSON file")
        if reputation:
            g = p.add_mutually_exclusive_group()
            g.add_argument("--reputable", dest="reputable", action="store_true", default=True)
            g.add_argument("--non-reputable", dest="reputable", action="store_false")
        p.add_argument("--output", help="write to this file instead of stdout")

    p = sub.add_parser("solve", help="optimal contract for one method")
    common(p)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--no-verify", action="store_true", help="skip the oracle cross-check")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("compare", help="deal-by-deal vs whole-portfolio")
    common(p)
    p.add_argument("--no-verify", action="store_true")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("thresholds", help="rho*, rho** and p2*")
    common(p, reputation=False)
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("sweep", help="CSV of the whole-portfolio contract along one parameter")
    common(p)
    p.add_argument("--param", choices=analysis.SWEEP_PARAMS, required=True)
    p.add_argument("--from", dest="start", type=float, required=True)
    p.add_argument("--to", dest="stop", type=float, required=True)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="closed forms vs brute-force oracle on random scenarios")
    common(p, scenario=False, reputation=False)
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo check of a contract")
    common(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--method", choices=METHODS, default="wp")
    src.add_argument("--contract", help="a JSON report written by 'solve'")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--best-response", action="store_true", help="let the GP best-respond instead of following the target")
    p.add_argument("--trials-csv", help="also dump every trial to this CSV")
    p.set_defaults(func=cmd_simulate)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleMismatch as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (Infeasible, InfeasibleParticipation, NoInteriorOptimum, NoConsistentCandidate) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (InvalidScenario, InvalidCost, LPAError, ValueError, OSError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())
