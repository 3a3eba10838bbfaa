"""UCB bookkeeping and the single-player observe-before-play learner.

State arrays carry arbitrary leading axes, so one ``UcbState`` can hold a
single learner (counts of shape (K,)), one learner per repetition
(shape (R, K)) or one per repetition and player (shape (R, M, K)).
"""
from __future__ import annotations

import numpy as np

from .environment import RoundRecord, resolve_round
from .errors import StateError


class UcbState:
    """Observation counts and running sums per arm, plus the round counter.

    ``t`` is the index of the round about to be played; the first
    (initialisation) round is ``t = 1``.
    """

    def __init__(self, num_arms: int, shape: tuple[int, ...] = ()):
        self.num_arms = num_arms
        self.t = 1
        self.counts = np.zeros(shape + (num_arms,), dtype=np.int64)
        self.sums = np.zeros(shape + (num_arms,))

    @classmethod
    def frozen(cls, means, pulls: int = 10**9):
        """State whose empirical means equal ``means`` and whose bonus is negligible."""
        mu = np.asarray(means, dtype=float)
        s = cls(mu.shape[-1], mu.shape[:-1])
        s.counts[...] = pulls
        s.sums[...] = mu * pulls
        return s

    @property
    def means(self) -> np.ndarray:
        return self.sums / np.maximum(self.counts, 1)

    @property
    def initialized(self) -> bool:
        return bool(np.all(self.counts >= 1))

    def indices(self) -> np.ndarray:
        if not self.initialized:
            raise StateError("UCB index undefined for an arm that was never observed")
        return self.means + np.sqrt(2.0 * np.log(self.t) / self.counts)

    def update(self, arms, values, mask=None) -> "UcbState":
        """Record observations and advance ``t``.

        ``arms`` and ``values`` have shape ``leading + (n,)``; entries where
        ``mask`` is False are ignored. A row never lists the same arm twice.
        """
        arms = np.asarray(arms, dtype=np.int64)
        values = np.asarray(values, dtype=float)
        mask = np.ones(arms.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        lead = self.counts.shape[:-1]
        counts = self.counts.reshape(-1, self.num_arms)
        sums = self.sums.reshape(-1, self.num_arms)
        rows = np.broadcast_to(np.arange(counts.shape[0]).reshape(lead + (1,) * (arms.ndim - len(lead))),
                               arms.shape)
        np.add.at(counts, (rows[mask], arms[mask]), 1)
        np.add.at(sums, (rows[mask], arms[mask]), values[mask])
        self.t += 1
        return self

    def copy(self) -> "UcbState":
        out = UcbState(self.num_arms)
        out.t, out.counts, out.sums = self.t, self.counts.copy(), self.sums.copy()
        return out


def order_by(scores) -> np.ndarray:
    """Arms by decreasing score along the last axis; ties go to the smaller index."""
    return np.argsort(-np.asarray(scores, dtype=float), axis=-1, kind="stable")


def ucb_index(state: UcbState, arm: int) -> float:
    if state.counts[..., arm].min() < 1:
        raise StateError(f"arm {arm} has not been observed")
    return float(state.means[..., arm] + np.sqrt(2.0 * np.log(state.t) / state.counts[..., arm]))


def select_list(state: UcbState) -> tuple[int, ...]:
    return tuple(int(a) for a in order_by(state.indices()))


def update(state: UcbState, observations) -> UcbState:
    """Apply a sequence of ``(arm, value)`` pairs for a scalar state."""
    observations = list(observations)
    if not observations:
        state.t += 1
        return state
    arms, values = zip(*observations)
    return state.update(np.array(arms), np.array(values))


def initialize(state: UcbState, y, tau: float) -> RoundRecord:
    """Initialisation round: sense every arm in index order, play the first available."""
    record = resolve_round([range(state.num_arms)], y, tau, full_observation=True)
    update(state, record.observations[0])
    return record


class ObpUcb:
    """Single-player learner, batched over R independent repetitions."""

    num_players = 1

    def __init__(self, num_arms: int, reps: int = 1):
        self.state = UcbState(num_arms, (reps,))
        self.reps = reps

    @property
    def full_observation(self) -> bool:
        return not self.state.initialized

    def propose(self) -> np.ndarray:
        K = self.state.num_arms
        if self.full_observation:
            return np.broadcast_to(np.arange(K), (self.reps, 1, K)).copy()
        return order_by(self.state.indices())[:, None, :]

    def feedback(self, lists, outcome) -> None:
        self.state.update(lists[:, 0], outcome.observed[:, 0], outcome.mask[:, 0])
