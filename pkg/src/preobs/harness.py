"""Experiment configuration and the multi-repetition runner.

All R repetitions of a configuration are simulated together, one round at
a time, with arrays whose leading axis is the repetition. Repetition ``r``
draws its means, its availabilities and its policy randomness from its own
substreams (see ``environment.substream``), so results do not depend on how
repetitions are grouped into blocks or spread over processes.
"""
from __future__ import annotations

import csv
import io
import json
import platform
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .central import AssignmentRule, CentralObp
from .distributed import DistributedObp
from .environment import CollisionRule, TraceSource, UniformFeed, load_trace, resolve_batch, substream
from .errors import ConfigError, DegenerateGapError, ParameterError
from .metrics import regret_single_batch, theorem1_bound, theorem3_bound
from .model import BanditInstance, list_values
from .oracles import (RandomBaseline, SingleOpt, SingleUcb, best_greedy_value,
                      greedy_profile, greedy_random_value)
from .ucb import ObpUcb

POLICIES = ("obp-ucb", "c-mp-obp", "d-mp-obp", "d-mp-adapt-obp", "random", "single-opt", "single-real")
LOSS_TARGETS = ("best-greedy", "greedy-random", "greedy-sorted", "greedy-reverse")
_BLOCK = 256


@dataclass
class ExperimentConfig:
    num_arms: int = 9
    num_players: int = 1
    tau: float = 0.05
    mu: list[float] | None = None
    mu_uniform_max: float | None = None
    trace: str | None = None
    horizon: int = 5000
    reps: int = 100
    seed: int = 0
    policy: str = "obp-ucb"
    rule: str = "greedy-sorted"
    steering: str = "greedy-sorted"
    collision_rule: str = "zero"
    regret_target: str = "greedy-sorted"
    loss_target: str | None = None
    random_length: int | None = None
    common_random_numbers: bool = True
    out_dir: str | None = None
    parallel: int = 1
    dump_reps: bool = False

    def __post_init__(self):
        sources = [self.mu is not None, self.mu_uniform_max is not None, self.trace is not None]
        if sum(sources) != 1:
            raise ConfigError("exactly one of mu, mu_uniform_max, trace must be given")
        if self.horizon < 1 or self.reps < 1:
            raise ConfigError("horizon and reps must be >= 1")
        if self.policy not in POLICIES:
            raise ConfigError(f"unknown policy {self.policy!r}; choose from {', '.join(POLICIES)}")
        if self.policy == "obp-ucb" and self.num_players != 1:
            raise ConfigError("obp-ucb is a single-player policy; use --players 1")
        if self.mu_uniform_max is not None and not 0 < self.mu_uniform_max <= 1:
            raise ConfigError("mu_uniform_max must lie in (0, 1]")
        if self.mu is not None:
            self.mu = [float(m) for m in self.mu]
            self.num_arms = len(self.mu)
        if self.loss_target is not None and self.loss_target not in LOSS_TARGETS:
            raise ConfigError(f"loss_target must be one of {', '.join(LOSS_TARGETS)}")
        if self.parallel < 1:
            raise ConfigError("parallel must be >= 1")
        try:
            AssignmentRule(self.rule), AssignmentRule(self.steering), AssignmentRule(self.regret_target)
            CollisionRule(self.collision_rule)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.trace is None:
            try:
                BanditInstance.from_means([0.0] * self.num_arms, self.num_players, self.tau)
            except ParameterError as exc:
                raise ConfigError(str(exc)) from exc

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def load(cls, path, **overrides) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        data.update({k: v for k, v in overrides.items() if v is not None})
        if overrides.get("mu") is not None or overrides.get("mu_uniform_max") is not None \
                or overrides.get("trace") is not None:
            for key in ("mu", "mu_uniform_max", "trace"):
                if overrides.get(key) is None:
                    data.pop(key, None)
        return cls.from_dict(data)

    def replace(self, **changes) -> "ExperimentConfig":
        data = asdict(self)
        if any(k in changes for k in ("mu", "mu_uniform_max", "trace")):
            data.update(mu=None, mu_uniform_max=None, trace=None)
        data.update(changes)
        return ExperimentConfig(**data)

    @property
    def metric(self) -> str:
        return "regret" if self.policy in ("obp-ucb", "c-mp-obp") else "loss"


@dataclass
class SeriesOutput:
    """Seed-averaged cumulative series (length T) plus per-repetition data."""

    config: ExperimentConfig
    metric: str
    reward: np.ndarray
    regret: np.ndarray
    collisions: np.ndarray
    bound: np.ndarray
    per_rep_reward: np.ndarray = field(repr=False)
    per_rep_regret: np.ndarray = field(repr=False)
    per_rep_collisions: np.ndarray = field(repr=False)
    means: np.ndarray = field(repr=False)

    @property
    def horizon(self) -> int:
        return len(self.reward)

    def final(self) -> dict:
        return {
            "mean_cum_reward": float(self.reward[-1]),
            f"mean_cum_{self.metric}": float(self.regret[-1]),
            "mean_cum_collisions": float(self.collisions[-1]),
            "bound": None if np.isnan(self.bound[-1]) else float(self.bound[-1]),
        }

    def series_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "mean_cum_reward", f"mean_cum_{self.metric}", "mean_cum_collisions", "bound"])
        for t in range(self.horizon):
            w.writerow([t + 1, repr(float(self.reward[t])), repr(float(self.regret[t])),
                        repr(float(self.collisions[t])), repr(float(self.bound[t]))])
        return buf.getvalue()

    def per_rep_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["rep", "cum_reward", f"cum_{self.metric}", "cum_collisions"])
        for r in range(self.per_rep_reward.shape[0]):
            w.writerow([r, repr(float(self.per_rep_reward[r, -1])), repr(float(self.per_rep_regret[r, -1])),
                        int(self.per_rep_collisions[r, -1])])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            # execution-only settings are left out so files match across hosts
            "config": {k: v for k, v in asdict(self.config).items() if k not in ("out_dir", "parallel")},
            "final": self.final(),
            "environment": fingerprint(),
        }

    def write(self, out_dir, stem: str | None = None) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        stem = stem or self.config.policy
        (out / f"{stem}_series.csv").write_text(self.series_csv(), encoding="utf-8")
        (out / f"{stem}_per_rep.csv").write_text(self.per_rep_csv(), encoding="utf-8")
        (out / f"{stem}_summary.json").write_text(json.dumps(self.summary(), indent=2, sort_keys=True) + "\n",
                                                  encoding="utf-8")
        if self.config.dump_reps:
            np.savetxt(out / f"{stem}_rep_reward.csv", self.per_rep_reward, delimiter=",", fmt="%.17g")


def fingerprint() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__}


def _policy_code(name: str) -> int:
    return POLICIES.index(name) + 1


def draw_means(config: ExperimentConfig, reps) -> np.ndarray:
    """(len(reps), K_padded) means; padded arms have mean 0."""
    M = config.num_players
    rows = []
    for r in reps:
        if config.mu is not None:
            mu = list(config.mu)
        elif config.mu_uniform_max is not None:
            mu = list(substream(config.seed, r, "instance").uniform(0.0, config.mu_uniform_max, config.num_arms))
        else:
            mu = list(load_trace(config.trace).column_means())
        rows.append(BanditInstance.from_means(mu, M, config.tau).means)
    return np.array(rows)


def _make_policy(config: ExperimentConfig, K: int, mu: np.ndarray, gens):
    R, M = len(mu), config.num_players
    L = K // M
    p = config.policy
    if p == "obp-ucb":
        return ObpUcb(K, R)
    if p == "c-mp-obp":
        return CentralObp(K, M, R, config.rule)
    if p in ("d-mp-obp", "d-mp-adapt-obp"):
        pol = DistributedObp(K, M, R, adapt=p == "d-mp-adapt-obp", target=config.steering)
        pol.uniforms = UniformFeed(gens, (M, L), _BLOCK)
        return pol
    if p == "random":
        pol = RandomBaseline(K, M, R, length=config.random_length or L)
        pol.uniforms = UniformFeed(gens, (M, K), _BLOCK)
        return pol
    if p == "single-opt":
        return SingleOpt(mu, M)
    return SingleUcb(K, M, R)


def _loss_target(config: ExperimentConfig) -> str:
    if config.loss_target:
        return config.loss_target
    if config.policy == "d-mp-adapt-obp":
        return config.steering
    return "best-greedy"


def _reference_values(config: ExperimentConfig, mu: np.ndarray) -> np.ndarray:
    M, tau = config.num_players, config.tau
    if config.metric == "regret" and config.policy == "obp-ucb":
        return np.zeros(len(mu))
    if config.metric == "regret":
        tgt = config.regret_target
    else:
        tgt = _loss_target(config)
    out = []
    for m in mu:
        if tgt == "best-greedy":
            out.append(best_greedy_value(m, M, tau))
        elif tgt == "greedy-random":
            out.append(greedy_random_value(m, M, tau))
        else:
            prof = greedy_profile(m, M, tau, tgt)
            out.append(float(list_values(prof.as_array(), m, tau).sum()))
    return np.array(out)


def _bounds(config: ExperimentConfig, mu: np.ndarray) -> np.ndarray:
    T = np.arange(1, config.horizon + 1)
    K, M = mu.shape[1], config.num_players
    rows = []
    for m in mu:
        try:
            if config.policy == "obp-ucb":
                rows.append(theorem1_bound(m, config.tau, T))
            elif config.policy == "c-mp-obp":
                rows.append(theorem3_bound(m, config.tau, K, M, T))
            else:
                rows.append(np.full(len(T), np.nan))
        except DegenerateGapError:
            rows.append(np.full(len(T), np.nan))
    return np.mean(rows, axis=0)


def run_block(config: ExperimentConfig, reps) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Simulate the given repetitions; returns per-round (reward, metric, collisions) arrays (R, T)."""
    reps = list(reps)
    mu = draw_means(config, reps)
    R, K = mu.shape
    M, T, tau = config.num_players, config.horizon, config.tau
    extra = () if config.common_random_numbers else (_policy_code(config.policy),)
    policy_gens = [substream(config.seed, r, "policy") for r in reps]
    policy = _make_policy(config, K, mu, policy_gens)
    if config.trace is not None:
        trace = load_trace(config.trace)
        padded = np.zeros((trace.num_rounds, K), dtype=np.int8)
        padded[:, :trace.num_arms] = trace.matrix
        source = TraceSource(padded)
        source.draw_block(None, T)      # fail fast when the trace is too short
        ys = np.broadcast_to(padded[:T], (R, T, K))
        next_y = iter(ys.transpose(1, 0, 2)).__next__
    else:
        feed = UniformFeed([substream(config.seed, r, "env", *extra) for r in reps], (K,), _BLOCK)
        next_y = lambda: (feed.next() < mu).astype(np.int8)  # noqa: E731

    reference = _reference_values(config, mu)
    reward = np.zeros((R, T))
    metric = np.zeros((R, T))
    collisions = np.zeros((R, T), dtype=np.int64)
    for t in range(T):
        full = policy.full_observation
        lists = policy.propose()
        out = resolve_batch(lists, next_y(), tau, config.collision_rule, full_observation=full)
        policy.feedback(lists, out)
        reward[:, t] = out.payoffs.sum(axis=1)
        collisions[:, t] = out.collided.sum(axis=1)
        if config.policy == "obp-ucb":
            metric[:, t] = regret_single_batch(lists[:, 0], mu, tau)
        elif config.policy == "c-mp-obp":
            metric[:, t] = reference - list_values(lists, mu[:, None, :], tau).sum(axis=1)
        else:
            metric[:, t] = reference - reward[:, t]
    return reward, metric, collisions


def _run_block_star(args):
    return run_block(*args)


def run_experiment(config: ExperimentConfig) -> SeriesOutput:
    reps = list(range(config.reps))
    if config.parallel > 1 and config.reps > 1:
        n = min(config.parallel, config.reps)
        blocks = [b.tolist() for b in np.array_split(reps, n)]
        with ProcessPoolExecutor(max_workers=n) as pool:
            parts = list(pool.map(_run_block_star, [(config, b) for b in blocks]))
    else:
        parts = [run_block(config, reps)]
    reward = np.concatenate([p[0] for p in parts])
    metric = np.concatenate([p[1] for p in parts])
    collisions = np.concatenate([p[2] for p in parts])
    mu = draw_means(config, reps)
    cum_r, cum_m, cum_c = (np.cumsum(a, axis=1) for a in (reward, metric, collisions))
    output = SeriesOutput(config, config.metric, cum_r.mean(axis=0), cum_m.mean(axis=0),
                          cum_c.mean(axis=0), _bounds(config, mu), cum_r, cum_m, cum_c, mu)
    if config.out_dir:
        output.write(config.out_dir)
    return output
