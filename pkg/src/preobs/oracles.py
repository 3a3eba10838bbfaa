"""Offline reference policies, exhaustive oracles and simple baselines."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .central import AssignmentRule, assign_steps, partition_steps
from .environment import RoundRecord, resolve_round
from .errors import BudgetError, ParameterError, StructureError
from .model import PolicyProfile, descending_list, list_values
from .ucb import UcbState, order_by, update

TIE_TOL = 1e-12
_CHUNK = 1 << 16


@dataclass(frozen=True)
class Allocation:
    """Owner of every arm: a player index, or -1 when the arm is unused."""

    owner: tuple[int, ...]
    num_players: int

    def __post_init__(self):
        if any(o < -1 or o >= self.num_players for o in self.owner):
            raise StructureError(f"owner entries must lie in [-1, {self.num_players})")

    def profile(self, mu) -> PolicyProfile:
        """Each player's arms observed by decreasing mean."""
        order = descending_list(mu)
        lists = tuple(tuple(a for a in order if self.owner[a] == m) for m in range(self.num_players))
        return PolicyProfile(lists)

    def value(self, mu, tau: float) -> float:
        return float(allocation_values(np.array([self.owner]), mu, tau, self.num_players)[0])


def allocation_values(owners: np.ndarray, mu, tau: float, num_players: int) -> np.ndarray:
    """Expected total reward of many allocations, each player sorting its arms by mean.

    ``owners`` has shape (A, K) with entries in [-1, M).
    """
    mu = np.asarray(mu, dtype=float)
    A = owners.shape[0]
    value = np.zeros(A)
    survive = np.ones((A, num_players))
    held = np.zeros((A, num_players), dtype=np.int64)
    rows = np.arange(A)
    for arm in descending_list(mu):
        who = owners[:, arm]
        used = who >= 0
        p = np.where(used, who, 0)
        gain = (1.0 - (held[rows, p] + 1) * tau) * mu[arm] * survive[rows, p]
        value += np.where(used, gain, 0.0)
        survive[rows, p] = np.where(used, survive[rows, p] * (1.0 - mu[arm]), survive[rows, p])
        held[rows, p] += used
    return value


def _owners(start: int, stop: int, num_arms: int, base: int, unassigned: bool) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    powers = base ** np.arange(num_arms - 1, -1, -1, dtype=np.int64)
    digits = (idx[:, None] // powers) % base
    if unassigned:
        digits = np.where(digits == base - 1, -1, digits)
    return digits


def balanced_owners(num_arms: int, num_players: int) -> np.ndarray:
    """All maps giving every player exactly K/M arms, in lexicographic order."""
    L = num_arms // num_players
    rows = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros((1, num_players), dtype=np.int64)
    for _ in range(num_arms):
        parent = np.repeat(np.arange(len(rows)), num_players)
        player = np.tile(np.arange(num_players), len(rows))
        keep = used[parent, player] < L
        parent, player = parent[keep], player[keep]
        rows = np.concatenate([rows[parent], player[:, None]], axis=1)
        used = used[parent].copy()
        used[np.arange(len(used)), player] += 1
    return rows


def brute_force_optimal(mu, num_players: int, tau: float, max_arms: int = 12,
                        max_players: int = 4, balanced: bool = True,
                        allow_unassigned: bool = False):
    """Best collision-free profile by exhaustive enumeration of arm-to-player maps.

    By default every player receives exactly K/M arms, the list length all
    greedy profiles share. ``balanced=False`` searches every map of arms to
    players instead (optionally leaving arms unused), where longer lists for
    some players can beat any equal-length profile.

    Maps are visited in lexicographic order (arm 0 most significant) and the
    first one within ``TIE_TOL`` of the maximum wins. Returns
    ``(profile, value, allocation)``.
    """
    mu = np.asarray(mu, dtype=float)
    K, M = len(mu), num_players
    if K > max_arms or M > max_players:
        raise BudgetError(f"brute force limited to K <= {max_arms}, M <= {max_players}; got K={K}, M={M}")
    if M < 1 or M > K:
        raise ParameterError("need 1 <= M <= K")
    if balanced:
        if K % M:
            raise StructureError(f"K={K} is not a multiple of M={M}; pad first")
        if (K // M) * tau >= 1:
            raise ParameterError("need L * tau < 1")
        chunks = [balanced_owners(K, M)]
    else:
        if not allow_unassigned and K * tau >= 1:
            raise ParameterError("assigning every arm is only safe when K * tau < 1")
        base = M + 1 if allow_unassigned else M
        total = base ** K
        chunks = (_owners(s, min(s + _CHUNK, total), K, base, allow_unassigned)
                  for s in range(0, total, _CHUNK))
    best_val, best_owner = -math.inf, None
    for owners in chunks:
        vals = allocation_values(owners, mu, tau, M)
        top = vals.max()
        if top > best_val + TIE_TOL:
            first = int(np.flatnonzero(vals >= top - TIE_TOL)[0])
            best_val, best_owner = float(vals[first]), owners[first]
    alloc = Allocation(tuple(int(o) for o in best_owner), M)
    return alloc.profile(mu), best_val, alloc


def single_player_brute_force(mu, tau: float, max_arms: int = 8):
    """Best full-length observation list over all K! orders."""
    mu = np.asarray(mu, dtype=float)
    K = len(mu)
    if K > max_arms:
        raise BudgetError(f"permutation search limited to K <= {max_arms}")
    perms = np.array(list(itertools.permutations(range(K))), dtype=np.int64)
    vals = list_values(perms, mu, tau)
    first = int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])
    return tuple(int(a) for a in perms[first]), float(vals[first])


def greedy_profile(mu, num_players: int, tau: float = 0.0, rule=AssignmentRule.SORTED) -> PolicyProfile:
    """Greedy step partition of the true ranking, assigned within steps by ``rule``."""
    mu = np.asarray(mu, dtype=float)
    steps = partition_steps(np.array(descending_list(mu)), num_players)
    lists = assign_steps(np.array(steps), rule, mu)
    return PolicyProfile(tuple(tuple(int(a) for a in row) for row in lists))


def greedy_allocations(mu, num_players: int, max_count: int = 24 ** 4) -> np.ndarray:
    """Every within-step assignment of the greedy partition, shape (C, M, L)."""
    steps = np.array(partition_steps(np.array(descending_list(mu)), num_players))
    L, M = steps.shape
    count = math.factorial(M) ** L
    if count > max_count:
        raise BudgetError(f"(M!)^L = {count} greedy allocations exceeds budget {max_count}")
    perms = np.array(list(itertools.permutations(range(M))), dtype=np.int64)   # (M!, M)
    combo = np.array(list(itertools.product(range(len(perms)), repeat=L)), dtype=np.int64)  # (C, L)
    # player m receives steps[i][perms[combo[c, i], m]] at step i
    return np.stack([steps[i][perms[combo[:, i]]] for i in range(L)], axis=-1)


def best_greedy(mu, num_players: int, tau: float):
    """Best collision-free greedy profile and its value."""
    allocs = greedy_allocations(mu, num_players)
    vals = list_values(allocs, mu, tau).sum(axis=-1)
    first = int(np.flatnonzero(vals >= vals.max() - TIE_TOL)[0])
    return PolicyProfile(tuple(tuple(int(a) for a in row) for row in allocs[first])), float(vals[first])


def best_greedy_value(mu, num_players: int, tau: float) -> float:
    return best_greedy(mu, num_players, tau)[1]


def greedy_random_value(mu, num_players: int, tau: float) -> float:
    """Expected value when each step's greedy arms are split uniformly at random."""
    allocs = greedy_allocations(mu, num_players)
    return float(list_values(allocs, mu, tau).sum(axis=-1).mean())


def single_opt_profile(mu, num_players: int) -> PolicyProfile:
    """The M best arms, one per player, no further observations."""
    if num_players > len(mu):
        raise ParameterError("need M <= K")
    top = descending_list(mu)[:num_players]
    return PolicyProfile(tuple((a,) for a in top))


def random_baseline_lists(num_arms: int, num_players: int, rng: np.random.Generator,
                          length: int | None = None) -> np.ndarray:
    """Independent uniform random orders for every player (may overlap across players)."""
    length = num_arms if length is None else length
    return np.argsort(rng.random((num_players, num_arms)), axis=-1)[:, :length]


def single_real_ucb_round(state: UcbState, num_players: int, y, tau: float):
    """Top-M arms by UCB index, one per player; unseen arms are taken first in index order."""
    if state.initialized:
        top = order_by(state.indices())[:num_players]
    else:
        top = np.argsort(state.counts, kind="stable")[:num_players]
    profile = PolicyProfile(tuple((int(a),) for a in top))
    record: RoundRecord = resolve_round(profile.lists, y, tau)
    update(state, [ob for obs in record.observations for ob in obs])
    return profile, record


class SingleOpt:
    """Offline single-observation policy, batched; ``mu`` has shape (R, K)."""

    full_observation = False

    def __init__(self, mu, num_players: int):
        self.mu = np.atleast_2d(np.asarray(mu, dtype=float))
        self.num_players = num_players
        self.lists = order_by(self.mu)[:, :num_players, None]

    def propose(self) -> np.ndarray:
        return self.lists

    def feedback(self, lists, outcome) -> None:
        pass


class RandomBaseline:
    """Every player senses ``length`` arms in a fresh uniform random order each round."""

    full_observation = False

    def __init__(self, num_arms: int, num_players: int, reps: int = 1, length: int | None = None):
        self.num_arms = num_arms
        self.num_players = num_players
        self.reps = reps
        self.length = num_arms if length is None else length
        self.uniforms = None

    def propose(self, u=None) -> np.ndarray:
        if u is None:
            u = self.uniforms.next()
        return np.argsort(u, axis=-1)[..., :self.length]

    def feedback(self, lists, outcome) -> None:
        pass


class SingleUcb:
    """Single-observation UCB baseline with one shared state per repetition."""

    full_observation = False

    def __init__(self, num_arms: int, num_players: int, reps: int = 1):
        self.num_players = num_players
        self.reps = reps
        self.state = UcbState(num_arms, (reps,))

    def propose(self) -> np.ndarray:
        if self.state.initialized:
            top = order_by(self.state.indices())[:, :self.num_players]
        else:
            top = np.argsort(self.state.counts, axis=-1, kind="stable")[:, :self.num_players]
        return top[..., None]

    def feedback(self, lists, outcome) -> None:
        R = lists.shape[0]
        self.state.update(lists.reshape(R, -1), outcome.observed.reshape(R, -1), outcome.mask.reshape(R, -1))
