"""Pseudo-regret, loss, collision counts and closed-form regret bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .central import AssignmentRule
from .errors import DegenerateGapError
from .model import descending_list, expected_list_reward, expected_profile_reward, list_values
from .oracles import best_greedy_value, greedy_profile

EXPLORATION_CONST = 1.0 + math.pi ** 2 / 3.0


@dataclass(frozen=True)
class GapTable:
    """Gap statistics of the means in decreasing order.

    ``weights[k-1]`` is W_k = (1 - k tau) * prod_{i<k} (1 - mu_(i)), the
    probability-weighted payoff factor of position k in the optimal list.
    """

    sorted_means: np.ndarray
    delta: np.ndarray
    delta_min: float
    delta_max: float
    c_mu: float
    weights: np.ndarray

    @classmethod
    def from_means(cls, mu, tau: float) -> "GapTable":
        s = np.sort(np.asarray(mu, dtype=float))[::-1]
        delta = np.triu(s[:, None] - s[None, :], k=1)
        K = len(s)
        if K > 1:
            adjacent = float(np.min(s[:-1] - s[1:]))
            pairs = delta[np.triu_indices(K, k=1)]
            # min over all ordered pairs equals the min adjacent gap
            assert math.isclose(float(pairs.min()), adjacent, abs_tol=1e-15)
            dmax = float(s[0] - s[-1])
        else:
            adjacent, dmax = math.inf, 0.0
        c_mu = s[0] / adjacent if adjacent > 0 else math.inf
        before = np.concatenate([[1.0], np.cumprod(1.0 - s)[:-1]])
        weights = (1.0 - tau * np.arange(1, K + 1)) * before
        return cls(s, delta, adjacent, dmax, c_mu, weights)


def pseudo_regret_single(arms, mu, tau: float) -> float:
    """Expected-reward shortfall of a list against the decreasing-mean list."""
    return expected_list_reward(descending_list(mu), mu, tau) - expected_list_reward(arms, mu, tau)


def regret_single_batch(lists: np.ndarray, mu: np.ndarray, tau: float) -> np.ndarray:
    """Per-repetition pseudo-regret for (R, K) lists and (R, K) means."""
    best = list_values(np.argsort(-mu, axis=-1, kind="stable"), mu, tau)
    return best - list_values(lists, mu, tau)


def target_value(mu, num_players: int, tau: float, target=AssignmentRule.SORTED) -> float:
    return expected_profile_reward(greedy_profile(mu, num_players, tau, target), mu, tau)


def pseudo_regret_central(profile, mu, tau: float, target=AssignmentRule.SORTED) -> float:
    """Target greedy profile's expected reward minus ``profile``'s; can be negative."""
    M = profile.num_players if hasattr(profile, "num_players") else len(profile)
    return target_value(mu, M, tau, target) - expected_profile_reward(profile, mu, tau)


def loss_round(realized_total_payoff: float, mu, num_players: int, tau: float) -> float:
    """Best collision-free greedy value minus the payoff actually collected this round."""
    return best_greedy_value(mu, num_players, tau) - realized_total_payoff


def _log_horizon(T):
    T = np.asarray(T, dtype=float)
    if np.any(T < 1):
        raise ValueError("horizon must be >= 1")
    return np.log(T)


def theorem1_bound(mu, tau: float, T):
    """Single-player bound: sum_i i W_i sum_{j>i} [8 ln T / d_ij + (1 + pi^2/3) d_ij]."""
    g = GapTable.from_means(mu, tau)
    K = len(g.sorted_means)
    logT = _log_horizon(T)
    if K < 2:
        return np.zeros_like(logT) if logT.ndim else 0.0
    if g.delta_min <= 0:
        raise DegenerateGapError("bound undefined for repeated means")
    inv = sum(i * g.weights[i - 1] * np.sum(1.0 / g.delta[i - 1, i:]) for i in range(1, K))
    lin = sum(i * g.weights[i - 1] * np.sum(g.delta[i - 1, i:]) for i in range(1, K))
    out = 8.0 * logT * inv + EXPLORATION_CONST * lin
    return float(out) if np.ndim(out) == 0 else out


def theorem3_bound(mu, tau: float, num_arms: int, num_players: int, T):
    """Centralised bound: c_mu K^2 (L^2 + L) (8 ln T / d_min + (1 + pi^2/3) d_max)."""
    g = GapTable.from_means(mu, tau)
    if g.delta_min <= 0:
        raise DegenerateGapError("bound undefined for repeated means")
    L = num_arms / num_players
    out = g.c_mu * num_arms ** 2 * (L ** 2 + L) * (
        8.0 * _log_horizon(T) / g.delta_min + EXPLORATION_CONST * g.delta_max)
    return float(out) if np.ndim(out) == 0 else out


def collision_stats(records):
    """Per-round count of players whose play collided, and its running total.

    Accepts ``RoundRecord`` objects or (M,) boolean arrays of collided flags.
    """
    counts = np.array([sum(r.collided) if hasattr(r, "collided") else int(np.sum(r)) for r in records],
                      dtype=np.int64)
    return counts, np.cumsum(counts)
