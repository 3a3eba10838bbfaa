"""Parameter sweeps against baselines and the offline oracle survey."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .central import AssignmentRule
from .environment import substream
from .errors import ConfigError
from .harness import ExperimentConfig, SeriesOutput, run_experiment
from .model import descending_list, expected_list_reward, list_values
from .oracles import TIE_TOL, best_greedy, brute_force_optimal, greedy_profile, single_player_brute_force


def default_baselines(config: ExperimentConfig) -> tuple[str, ...]:
    return ("random", "single-real") if config.trace is not None else ("random", "single-opt")


def compare(config: ExperimentConfig, baselines=None) -> dict:
    """Run the policy and each baseline on the same streams; improvements at T."""
    baselines = tuple(baselines or default_baselines(config))
    runs: dict[str, SeriesOutput] = {config.policy: run_experiment(config)}
    for b in baselines:
        runs[b] = run_experiment(config.replace(policy=b, out_dir=None))
    mine = runs[config.policy].reward[-1]
    row = {"reward": float(mine)}
    for b in baselines:
        base = runs[b].reward[-1]
        row[f"{b}_reward"] = float(base)
        row[f"gap_vs_{b}"] = float(mine - base)
        row[f"pct_vs_{b}"] = float(100.0 * (mine - base) / base) if base else float("nan")
    return row


def sweep(config: ExperimentConfig, axis: str, values, baselines=None) -> list[dict]:
    """One summary row per value of ``tau`` or ``x`` (the uniform-range maximum)."""
    values = list(values)
    if not values:
        raise ConfigError("sweep axis is empty")
    if axis not in ("tau", "x"):
        raise ConfigError("axis must be 'tau' or 'x'")
    rows = []
    for v in values:
        cfg = config.replace(tau=float(v)) if axis == "tau" else config.replace(mu_uniform_max=float(v))
        rows.append({axis: float(v), **compare(cfg.replace(out_dir=None), baselines)})
    if config.out_dir:
        write_rows(Path(config.out_dir) / f"sweep_{axis}.csv", rows)
    return rows


def write_rows(path, rows: list[dict]) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in r.items()})
    path.write_text(buf.getvalue(), encoding="utf-8")


@dataclass
class OracleReport:
    num_arms: int
    num_players: int
    tau: float
    samples: int
    reverse_best: int = 0
    non_greedy: int = 0
    descending_optimal: int | None = None
    reverse_optimal: int | None = None
    counterexample: dict | None = None
    worst_gap: float = 0.0
    gaps: list = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        d = {k: v for k, v in self.__dict__.items() if k != "gaps"}
        d["reverse_best_fraction"] = self.reverse_best / self.samples
        d["non_greedy_fraction"] = self.non_greedy / self.samples
        return d


def oracle_check(num_arms: int, num_players: int, samples: int, seed: int = 0, tau: float = 0.0,
                 mu_max: float = 1.0, balanced: bool = True) -> OracleReport:
    """Compare greedy profiles with the exhaustive optimum over sampled instances.

    Instance ``i`` draws its means from the ``instance`` substream of
    repetition ``i``.
    """
    K, M = num_arms, num_players
    rep = OracleReport(K, M, tau, samples)
    if M == 1:
        rep.descending_optimal = 0
    if K == 2 * M:
        rep.reverse_optimal = 0
    for i in range(samples):
        mu = substream(seed, i, "instance").uniform(0.0, mu_max, K)
        _, g_best = best_greedy(mu, M, tau)
        reverse = greedy_profile(mu, M, tau, AssignmentRule.REVERSE)
        v_rev = float(list_values(reverse.as_array(), mu, tau).sum())
        rep.reverse_best += v_rev >= g_best - TIE_TOL
        opt_prof, v_opt, _ = brute_force_optimal(mu, M, tau, balanced=balanced)
        gap = v_opt - g_best
        rep.gaps.append(gap)
        rep.worst_gap = max(rep.worst_gap, gap)
        if gap > TIE_TOL:
            rep.non_greedy += 1
            if rep.counterexample is None:
                rep.counterexample = {
                    "mu": [float(m) for m in mu], "tau": tau,
                    "optimum": [list(l) for l in opt_prof.lists], "optimum_value": v_opt,
                    "best_greedy_value": g_best,
                }
        if rep.descending_optimal is not None:
            desc = expected_list_reward(descending_list(mu), mu, tau)
            _, v_bf = single_player_brute_force(mu, tau)
            rep.descending_optimal += abs(desc - v_bf) <= TIE_TOL
        if rep.reverse_optimal is not None:
            rep.reverse_optimal += abs(v_opt - v_rev) <= TIE_TOL
    return rep


def write_report(path, report: OracleReport) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def gap_quantiles(report: OracleReport, qs=(0.5, 0.9, 0.99)) -> dict:
    g = np.asarray(report.gaps)
    return {q: float(np.quantile(g, q)) for q in qs}
