"""Centralised multi-player controller.

One shared UCB state ranks all arms; the ranking is cut into L blocks of M
arms ("steps") and each block is handed out to the players by an
assignment rule, so the resulting lists are always disjoint.
"""
from __future__ import annotations

import enum

import numpy as np

from .environment import CollisionRule, RoundRecord, resolve_round
from .errors import StructureError
from .model import PolicyProfile
from .ucb import UcbState, order_by, update


class AssignmentRule(str, enum.Enum):
    SORTED = "greedy-sorted"
    REVERSE = "greedy-reverse"


def partition_steps(order, num_players: int):
    """Cut a ranking of all K arms into K/M consecutive blocks.

    Scalar input returns a list of tuples; an array with leading axes
    returns shape ``(..., L, M)``.
    """
    arr = np.asarray(order, dtype=np.int64)
    K = arr.shape[-1]
    if num_players < 1 or K % num_players:
        raise StructureError(f"cannot split {K} arms into steps of {num_players}; pad first")
    blocks = arr.reshape(arr.shape[:-1] + (K // num_players, num_players))
    if arr.ndim == 1:
        return [tuple(int(a) for a in b) for b in blocks]
    return blocks


def assign_steps(steps: np.ndarray, rule, estimates) -> np.ndarray:
    """Vectorised within-step assignment; ``steps`` (..., L, M) -> lists (..., M, L).

    Greedy-sorted gives the rank-m arm of every step to player m.
    Greedy-reverse gives the rank-j arm of step i to the player with the
    j-th largest probability of having found nothing in steps 1..i-1,
    computed from ``estimates`` clipped to [0, 1]; ties go to the smaller
    player index.
    """
    rule = AssignmentRule(rule)
    steps = np.asarray(steps, dtype=np.int64)
    lists = np.swapaxes(steps, -1, -2).copy()
    if rule is AssignmentRule.SORTED:
        return lists
    est = np.clip(np.asarray(estimates, dtype=float), 0.0, 1.0)
    est = np.broadcast_to(est, steps.shape[:-2] + est.shape[-1:])
    L, M = steps.shape[-2:]
    survival = np.ones(steps.shape[:-2] + (M,))
    for i in range(L):
        rank_to_player = np.argsort(-survival, axis=-1, kind="stable")
        col = np.empty_like(steps[..., i, :])
        np.put_along_axis(col, rank_to_player, steps[..., i, :], axis=-1)
        lists[..., i] = col
        survival = survival * (1.0 - np.take_along_axis(est, col, axis=-1))
    return lists


def assign_within_steps(steps, rule, estimates) -> PolicyProfile:
    lists = assign_steps(np.asarray(steps, dtype=np.int64), rule, estimates)
    return PolicyProfile(tuple(tuple(int(a) for a in row) for row in lists))


def initial_split(num_arms: int, num_players: int) -> np.ndarray:
    """Player m senses arms m, m+M, m+2M, ... so each arm is seen exactly once."""
    return np.arange(num_arms).reshape(num_arms // num_players, num_players).T.copy()


def controller_round(state: UcbState, rule, num_players: int, y, tau: float,
                     collision_rule=CollisionRule.ZERO):
    """Play one round for a scalar shared state; returns (profile, record, state)."""
    K = state.num_arms
    if not state.initialized:
        lists = initial_split(K, num_players)
        record = resolve_round(lists, y, tau, collision_rule, full_observation=True)
    else:
        steps = partition_steps(order_by(state.indices()), num_players)
        lists = assign_steps(np.array(steps), rule, state.means)
        record = resolve_round(lists, y, tau, collision_rule)
    update(state, [ob for obs in record.observations for ob in obs])
    profile = PolicyProfile(tuple(tuple(int(a) for a in row) for row in lists))
    return profile, record, state


class CentralObp:
    """Batched controller: one shared state per repetition."""

    def __init__(self, num_arms: int, num_players: int, reps: int = 1,
                 rule=AssignmentRule.SORTED, state: UcbState | None = None):
        if num_arms % num_players:
            raise StructureError("K must be a multiple of M")
        self.num_players = num_players
        self.rule = AssignmentRule(rule)
        self.reps = reps
        self.state = state if state is not None else UcbState(num_arms, (reps,))

    @property
    def full_observation(self) -> bool:
        return not self.state.initialized

    def propose(self) -> np.ndarray:
        K, M = self.state.num_arms, self.num_players
        if self.full_observation:
            return np.broadcast_to(initial_split(K, M), (self.reps, M, K // M)).copy()
        steps = partition_steps(order_by(self.state.indices()), M)
        return assign_steps(steps, self.rule, self.state.means)

    def feedback(self, lists, outcome) -> None:
        R = lists.shape[0]
        self.state.update(lists.reshape(R, -1), outcome.observed.reshape(R, -1), outcome.mask.reshape(R, -1))
