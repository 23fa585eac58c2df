"""Simulated fund realizations under a payout schedule.

Randomness is counter based: trial ``t`` consumes the single 4-word Philox
block at counter ``t`` under key ``seed``. Any partition of trial indices
therefore sees the same draws, and because results are accumulated as
integer counts per outcome signal, merging chunks is exact.

Block words: 0 picks the type profile, 1 and 2 drive each project's return.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .oracle import (
    PER_PROJECT,
    ContractSchedule,
    Economy,
    GPStrategy,
    as_economy,
    best_response,
    expected_gp_payout,
    expected_total_and_lp_value,
    signal_cash,
    signal_key,
)

DEFAULT_CHUNK = 1 << 16
TRIAL_COLUMNS = ("trial", "type1", "type2", "action1", "action2", "cash", "gp", "lp")


@dataclass(frozen=True)
class SimConfig:
    trials: int
    seed: int
    model: object  # PortfolioScenario or Economy
    schedule: ContractSchedule
    strategy: GPStrategy | None = None  # None: the first best response
    chunk: int = DEFAULT_CHUNK

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SimReport:
    trials: int
    seed: int
    strategy: str
    emp_gp_mean: float
    emp_lp_mean: float
    emp_total_mean: float
    se_gp: float
    se_lp: float
    se_total: float
    analytic_gp: float
    analytic_lp: float
    analytic_total: float
    counts: dict = field(default_factory=dict)

    @property
    def gap_gp(self) -> float:
        return abs(self.emp_gp_mean - self.analytic_gp)

    @property
    def gap_lp(self) -> float:
        return abs(self.emp_lp_mean - self.analytic_lp)

    @property
    def gap_total(self) -> float:
        return abs(self.emp_total_mean - self.analytic_total)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "strategy": self.strategy,
            "emp_gp_mean": self.emp_gp_mean,
            "emp_lp_mean": self.emp_lp_mean,
            "emp_total_mean": self.emp_total_mean,
            "standard_errors": {"gp": self.se_gp, "lp": self.se_lp, "total": self.se_total},
            "analytic": {"gp": self.analytic_gp, "lp": self.analytic_lp, "total": self.analytic_total},
            "analytic_gaps": {"gp": self.gap_gp, "lp": self.gap_lp, "total": self.gap_total},
            "counts": [{"signal": list(k) if isinstance(k, tuple) else k, "count": n} for k, n in self.counts.items()],
        }


def uniforms(seed: int, start: int, n: int) -> np.ndarray:
    """Uniforms in [0, 1) of shape (n, 4) for trials start .. start+n-1."""
    bg = np.random.Philox(key=seed)
    bg.advance(start)
    raw = bg.random_raw(4 * n).reshape(n, 4)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _draw_index(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def _simulate_chunk(econ: Economy, strategy: GPStrategy, kind: str, seed: int, start: int, n: int):
    """Per-trial profile index, actions and per-project cash for one chunk."""
    u = uniforms(seed, start, n)
    types = econ.type_distribution(strategy.effort)
    profiles = [prof for prof, _ in strategy.policy]
    weights = np.array([types.get(p, 0.0) for p in profiles])
    prof_idx = _draw_index(np.cumsum(weights) / weights.sum(), u[:, 0])
    cash = np.zeros((n, econ.n))
    actions = np.zeros((n, econ.n), dtype=bool)
    for k, (prof, act) in enumerate(strategy.policy):
        mask = prof_idx == k
        if not mask.any():
            continue
        for j, (tech, typ, invest) in enumerate(zip(econ.techs, prof, act)):
            actions[mask, j] = invest
            if not invest:
                cash[mask, j] = econ.I
                continue
            dist = tech.good if typ == "G" else tech.bad
            values = np.array([v for v, _ in dist])
            cdf = np.cumsum([q for _, q in dist])
            cash[mask, j] = values[_draw_index(cdf, u[mask, 1 + j])]
    return prof_idx, actions, cash


def _keys(cash: np.ndarray, kind: str) -> list:
    if kind == PER_PROJECT:
        return [signal_key(tuple(row)) for row in cash]
    return [signal_key(v) for v in cash.sum(axis=1)]


def simulate(cfg: SimConfig, trial_csv: str | Path | None = None) -> SimReport:
    econ = as_economy(cfg.model)
    kind = cfg.schedule.signal_kind
    strategy = cfg.strategy or best_response(econ, cfg.schedule).strategy
    payout = dict(cfg.schedule.payouts)
    counts: dict = {}
    writer = None
    handle = None
    if trial_csv is not None:
        handle = open(trial_csv, "w", newline="")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRIAL_COLUMNS)
    try:
        for start in range(0, cfg.trials, cfg.chunk):
            n = min(cfg.chunk, cfg.trials - start)
            prof_idx, actions, cash = _simulate_chunk(econ, strategy, kind, cfg.seed, start, n)
            # cash rows hold exact lattice values; round only when keying
            keys, tally = np.unique(cash, axis=0, return_counts=True)
            for row, cnt in zip(keys, tally):
                key = signal_key(tuple(row)) if kind == PER_PROJECT else signal_key(row.sum())
                counts[key] = counts.get(key, 0) + int(cnt)
            if writer is not None:
                _write_trials(writer, econ, strategy, kind, payout, start, prof_idx, actions, cash)
    finally:
        if handle is not None:
            handle.close()
    counts = dict(sorted(counts.items(), key=lambda kv: (signal_cash(kv[0]), str(kv[0]))))
    return _summarize(cfg, econ, strategy, payout, counts)


def _write_trials(writer, econ, strategy, kind, payout, start, prof_idx, actions, cash):
    profiles = [prof for prof, _ in strategy.policy]
    for t in range(len(prof_idx)):
        prof = profiles[prof_idx[t]]
        key = signal_key(tuple(cash[t])) if kind == PER_PROJECT else signal_key(cash[t].sum())
        gp = payout.get(key, 0.0)
        total = float(cash[t].sum())
        types = list(prof) + [""] * (2 - len(prof))
        acts = ["invest" if a else "safe" for a in actions[t]] + [""] * (2 - econ.n)
        writer.writerow([start + t, *types, *acts, f"{total:.12g}", f"{gp:.12g}", f"{total - gp:.12g}"])


def _moments(values: list[float], weights: list[int], n: int) -> tuple[float, float]:
    mean = math.fsum(v * w for v, w in zip(values, weights)) / n
    if n < 2:
        return mean, 0.0
    var = math.fsum(w * (v - mean) ** 2 for v, w in zip(values, weights)) / (n - 1)
    return mean, math.sqrt(var / n)


def _summarize(cfg, econ, strategy, payout, counts) -> SimReport:
    sig = list(counts)
    w = [counts[k] for k in sig]
    gp = [payout.get(k, 0.0) for k in sig]
    total = [signal_cash(k) for k in sig]
    lp = [t - g for t, g in zip(total, gp)]
    n = cfg.trials
    gp_m, gp_se = _moments(gp, w, n)
    lp_m, lp_se = _moments(lp, w, n)
    tot_m, tot_se = _moments(total, w, n)
    a_gp = expected_gp_payout(econ, cfg.schedule, strategy)
    a_tot, a_lp = expected_total_and_lp_value(econ, cfg.schedule, strategy)
    return SimReport(
        n, cfg.seed, strategy.describe(), gp_m, lp_m, tot_m, gp_se, lp_se, tot_se, a_gp, a_lp, a_tot, counts
    )


def merge_counts(parts: list[dict]) -> dict:
    """Combine per-chunk signal counts; order of parts does not matter."""
    out: dict = {}
    for part in parts:
        for k, v in part.items():
            out[k] = out.get(k, 0) + v
    return dict(sorted(out.items(), key=lambda kv: (signal_cash(kv[0]), str(kv[0]))))


def chunk_counts(cfg: SimConfig, start: int, n: int) -> dict:
    """Signal counts for trials ``start .. start+n-1`` alone."""
    econ = as_economy(cfg.model)
    strategy = cfg.strategy or best_response(econ, cfg.schedule).strategy
    _, _, cash = _simulate_chunk(econ, strategy, cfg.schedule.signal_kind, cfg.seed, start, n)
    out: dict = {}
    for key in _keys(cash, cfg.schedule.signal_kind):
        out[key] = out.get(key, 0) + 1
    return out
