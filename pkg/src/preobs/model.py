"""Domain types and closed-form expected rewards.

Arms are 0-based. A player following an observation list senses arms in
order, paying ``tau`` per observation, and plays the first available one:
the payoff is ``(1 - I * tau) * Y`` where ``I`` is the number of
observations made, and zero when every listed arm is unavailable.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DisjointnessError, ParameterError, StructureError

ObservationList = tuple[int, ...]


def as_list(arms: Sequence[int], num_arms: int | None = None) -> ObservationList:
    """Validate an observation list and return it as a tuple of ints."""
    out = tuple(int(a) for a in arms)
    if len(set(out)) != len(out):
        raise StructureError(f"duplicate arm in observation list {out}")
    if any(a < 0 for a in out):
        raise StructureError(f"negative arm index in {out}")
    if num_arms is not None and any(a >= num_arms for a in out):
        raise StructureError(f"arm index out of range for K={num_arms}: {out}")
    return out


@dataclass(frozen=True)
class BanditInstance:
    """K arms, M players, per-observation cost ``tau`` and arm means.

    ``means`` is None for trace-driven instances. Player lists have length
    ``steps = K / M``, and ``steps * tau`` must lie in (0, 1) so that every
    position of a list carries a positive payoff factor.
    """

    num_arms: int
    num_players: int = 1
    tau: float = 0.05
    means: tuple[float, ...] | None = None
    num_padded: int = 0

    def __post_init__(self):
        K, M = self.num_arms, self.num_players
        if K < 1 or M < 1:
            raise ParameterError("need at least one arm and one player")
        if M > K:
            raise ParameterError(f"more players ({M}) than arms ({K})")
        if K % M:
            raise ParameterError(f"K={K} is not a multiple of M={M}; pad with zero-mean arms first")
        if not 0 < self.steps * self.tau < 1:
            raise ParameterError(f"need 0 < L*tau < 1, got L={self.steps}, tau={self.tau}")
        if self.means is not None:
            mu = tuple(float(m) for m in self.means)
            if len(mu) != K:
                raise ParameterError(f"{len(mu)} means for {K} arms")
            if not all(0.0 <= m <= 1.0 for m in mu):
                raise ParameterError("means must lie in [0, 1]")
            object.__setattr__(self, "means", mu)

    @classmethod
    def from_means(cls, means, num_players: int = 1, tau: float = 0.05, pad: bool = True):
        mu = [float(m) for m in means]
        extra = (-len(mu)) % num_players if pad else 0
        mu += [0.0] * extra
        return cls(len(mu), num_players, tau, tuple(mu), num_padded=extra)

    @property
    def steps(self) -> int:
        return self.num_arms // self.num_players

    @property
    def mu(self) -> np.ndarray:
        if self.means is None:
            raise ParameterError("trace-driven instance has no means")
        return np.asarray(self.means)


@dataclass(frozen=True)
class PolicyProfile:
    """Pairwise-disjoint observation lists, one per player."""

    lists: tuple[ObservationList, ...]
    num_arms: int | None = field(default=None, compare=False)

    def __post_init__(self):
        lists = tuple(as_list(lst, self.num_arms) for lst in self.lists)
        seen: set[int] = set()
        for lst in lists:
            if seen.intersection(lst):
                raise DisjointnessError(f"lists overlap on arms {sorted(seen.intersection(lst))}")
            seen.update(lst)
        object.__setattr__(self, "lists", lists)

    @property
    def num_players(self) -> int:
        return len(self.lists)

    def step(self, i: int) -> tuple[int, ...]:
        """Arms in position ``i`` of each player's list (players whose list is shorter are skipped)."""
        return tuple(lst[i] for lst in self.lists if len(lst) > i)

    @property
    def steps(self) -> list[tuple[int, ...]]:
        depth = max((len(lst) for lst in self.lists), default=0)
        return [self.step(i) for i in range(depth)]

    def as_array(self) -> np.ndarray:
        """(M, L) integer array; requires equal-length lists."""
        return np.array(self.lists, dtype=np.int64).reshape(len(self.lists), -1)


def _check_tau(length: int, tau: float):
    if tau < 0 or length * tau >= 1:
        raise ParameterError(f"need 0 <= tau and len*tau < 1, got len={length}, tau={tau}")


def list_values(arms, mu, tau: float) -> np.ndarray:
    """Vectorised one-round expected reward of observation lists.

    ``arms`` has shape (..., n); ``mu`` has shape (K,) or broadcasts against
    ``arms.shape[:-1] + (K,)``. Returns an array of shape ``arms.shape[:-1]``.
    """
    arms = np.asarray(arms, dtype=np.int64)
    mu = np.asarray(mu, dtype=float)
    n = arms.shape[-1]
    if n == 0:
        return np.zeros(arms.shape[:-1])
    mu = np.broadcast_to(mu, np.broadcast_shapes(mu.shape[:-1], arms.shape[:-1]) + mu.shape[-1:])
    arms = np.broadcast_to(arms, mu.shape[:-1] + (n,))
    p = np.take_along_axis(mu, arms, axis=-1)
    survive = np.cumprod(1.0 - p, axis=-1)
    before = np.concatenate([np.ones_like(p[..., :1]), survive[..., :-1]], axis=-1)
    weight = 1.0 - tau * np.arange(1, n + 1)
    return np.sum(weight * p * before, axis=-1)


def expected_list_reward(arms: Sequence[int], mu, tau: float) -> float:
    lst = as_list(arms, len(mu))
    if not lst:
        return 0.0
    _check_tau(len(lst), tau)
    return float(list_values(np.array(lst), mu, tau))


def expected_profile_reward(profile, mu, tau: float) -> float:
    """Sum of the players' expected list rewards; ``profile`` must be collision-free."""
    if not isinstance(profile, PolicyProfile):
        profile = PolicyProfile(tuple(profile), num_arms=len(mu))
    return sum(expected_list_reward(lst, mu, tau) for lst in profile.lists)


def descending_list(mu) -> ObservationList:
    """All arms by decreasing mean, ties to the smaller index."""
    order = np.argsort(-np.asarray(mu, dtype=float), kind="stable")
    return tuple(int(a) for a in order)
