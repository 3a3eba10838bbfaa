"""Arm availability sources and resolution of one round of joint play.

Random streams
--------------
Every experiment has one master seed. The generator for repetition ``r``
and purpose ``p`` is ``PCG64(SeedSequence(seed, spawn_key=(r, PURPOSES[p])))``,
optionally with a third key element for policy-specific environment streams
when common random numbers are switched off. This derivation is part of the
public contract: changing it changes every published result.

Only plays collide. Two players sensing the same arm in the same round do
not interfere with each other.
"""
from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .errors import EndOfTrace, ParameterError, StructureError, TraceError
from .model import as_list

PURPOSES = {"instance": 0, "env": 1, "policy": 2}


def substream(seed: int, rep: int, purpose: str, *extra: int) -> np.random.Generator:
    key = (int(rep), PURPOSES[purpose]) + tuple(int(e) for e in extra)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(int(seed), spawn_key=key)))


class CollisionRule(str, enum.Enum):
    ZERO = "zero"
    SHARE = "share"


class IidBernoulli:
    """Each arm available independently with probability ``mu[k]``.

    One uniform is consumed per arm per round, so ``draw_block(rng, n)``
    yields exactly the rows that ``n`` calls to ``sample`` would.
    """

    def __init__(self, means):
        self.means = np.asarray(means, dtype=float)
        if self.means.ndim != 1 or np.any((self.means < 0) | (self.means > 1)):
            raise ParameterError("means must be a 1-D array in [0, 1]")

    @property
    def num_arms(self) -> int:
        return len(self.means)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(self.num_arms) < self.means).astype(np.int8)

    def draw_block(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return (rng.random((n, self.num_arms)) < self.means).astype(np.int8)


class TraceSource:
    """Replays a recorded 0/1 availability matrix row by row. Never wraps."""

    def __init__(self, matrix, cursor: int = 0):
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] == 0:
            raise TraceError("trace must be a non-empty 2-D matrix")
        if not np.isin(m, (0, 1)).all():
            raise TraceError("trace entries must be 0 or 1")
        self.matrix = m.astype(np.int8)
        self.cursor = cursor

    @property
    def num_arms(self) -> int:
        return self.matrix.shape[1]

    @property
    def num_rounds(self) -> int:
        return self.matrix.shape[0]

    def column_means(self) -> np.ndarray:
        return self.matrix.mean(axis=0)

    def sample(self, rng=None) -> np.ndarray:
        return self.draw_block(rng, 1)[0]

    def draw_block(self, rng, n: int) -> np.ndarray:
        if self.cursor + n > self.num_rounds:
            raise EndOfTrace(f"trace has {self.num_rounds} rounds; requested up to round {self.cursor + n}")
        rows = self.matrix[self.cursor:self.cursor + n]
        self.cursor += n
        return rows.copy()


def sample_realization(source, rng: np.random.Generator | None = None) -> np.ndarray:
    return source.sample(rng)


def load_trace(path) -> TraceSource:
    """Read a ``round,arm_0,...,arm_{K-1}`` CSV of 0/1 cells."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8-sig")
    except OSError as exc:
        raise TraceError(f"cannot open trace {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header:
            raise TraceError(f"{path}: missing header")
        header = [h.strip() for h in header]
        expected = ["round"] + [f"arm_{k}" for k in range(len(header) - 1)]
        if len(header) < 2 or header != expected:
            raise TraceError(f"{path}:1: header must be round,arm_0,...,arm_{{K-1}}, got {','.join(header)}")
        width = len(header)
        rows = []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != width:
                raise TraceError(f"{path}:{line_no}: expected {width} cells, got {len(row)}")
            cells = [c.strip() for c in row[1:]]
            if any(c not in ("0", "1") for c in cells):
                raise TraceError(f"{path}:{line_no}: non-binary cell in {row}")
            rows.append([int(c) for c in cells])
    if not rows:
        raise TraceError(f"{path}: no data rows")
    return TraceSource(np.array(rows, dtype=np.int8))


def write_trace(path, matrix) -> None:
    m = np.asarray(matrix, dtype=np.int8)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(",".join(["round"] + [f"arm_{k}" for k in range(m.shape[1])]) + "\n")
        for t, row in enumerate(m):
            fh.write(f"{t}," + ",".join(str(int(v)) for v in row) + "\n")


@dataclass(frozen=True)
class RoundRecord:
    observations: tuple[tuple[tuple[int, int], ...], ...]
    played: tuple[int | None, ...]
    stops: tuple[int, ...]
    payoffs: tuple[float, ...]
    collisions: tuple[int, ...]

    @property
    def observed_arms(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(a for a, _ in obs) for obs in self.observations)

    @property
    def collided(self) -> tuple[bool, ...]:
        return tuple(p is not None and self.collisions[p] == 1 for p in self.played)

    @property
    def total_payoff(self) -> float:
        return float(sum(self.payoffs))


def resolve_round(lists: Sequence[Sequence[int]], y, tau: float,
                  rule: CollisionRule | str = CollisionRule.ZERO,
                  full_observation: bool = False) -> RoundRecord:
    """Resolve one round for any number of players; lists may overlap.

    With ``full_observation`` every listed arm is sensed (initialisation
    rounds); the first available arm is still the one played and the stop
    index, hence the cost charged, is still its position.
    """
    rule = CollisionRule(rule)
    y = [int(v) for v in y]
    K = len(y)
    observations, played, stops = [], [], []
    for lst in lists:
        lst = as_list(lst, K)
        seen, choice, stop = [], None, len(lst)
        for pos, arm in enumerate(lst, start=1):
            seen.append((arm, y[arm]))
            if y[arm] == 1 and choice is None:
                choice, stop = arm, pos
                if not full_observation:
                    break
        observations.append(tuple(seen))
        played.append(choice)
        stops.append(stop)
    counts = [0] * K
    for p in played:
        if p is not None:
            counts[p] += 1
    payoffs = []
    for p, stop in zip(played, stops):
        if p is None:
            payoffs.append(0.0)
            continue
        base = (1.0 - stop * tau) * y[p]
        if counts[p] >= 2:
            payoffs.append(0.0 if rule is CollisionRule.ZERO else base / counts[p])
        else:
            payoffs.append(base)
    return RoundRecord(tuple(observations), tuple(played), tuple(stops), tuple(payoffs),
                       tuple(int(c >= 2) for c in counts))


class BatchOutcome(NamedTuple):
    """Array view of many rounds at once; leading axes are (R, M)."""

    observed: np.ndarray   # (R, M, n) availability of each listed arm
    mask: np.ndarray       # (R, M, n) True where the arm was actually sensed
    stops: np.ndarray      # (R, M)
    played: np.ndarray     # (R, M), -1 when nothing was played
    payoffs: np.ndarray    # (R, M)
    collided: np.ndarray   # (R, M) bool
    collisions: np.ndarray  # (R, K) eta flags


def resolve_batch(lists: np.ndarray, y: np.ndarray, tau: float,
                  rule: CollisionRule | str = CollisionRule.ZERO,
                  full_observation: bool = False) -> BatchOutcome:
    """Vectorised ``resolve_round`` over repetitions.

    ``lists`` is an (R, M, n) array of arm indices (every player's list has
    the same length n) and ``y`` the (R, K) availability matrix.
    """
    rule = CollisionRule(rule)
    lists = np.asarray(lists, dtype=np.int64)
    y = np.asarray(y)
    if lists.ndim != 3 or y.ndim != 2 or lists.shape[0] != y.shape[0]:
        raise StructureError("expected lists (R, M, n) and y (R, K)")
    R, M, n = lists.shape
    K = y.shape[1]
    observed = np.take_along_axis(y[:, None, :], lists.reshape(R, 1, M * n), axis=-1).reshape(R, M, n)
    hit = observed.astype(bool)
    any_hit = hit.any(axis=-1)
    first = hit.argmax(axis=-1)
    played = np.where(any_hit, np.take_along_axis(lists, first[..., None], axis=-1)[..., 0], -1)
    stops = np.where(any_hit, first + 1, n)
    mask = np.arange(n) < stops[..., None]
    if full_observation:
        mask = np.ones_like(mask)

    per_arm = (played[..., None] == np.arange(K)).sum(axis=1)          # (R, K)
    safe = np.where(played >= 0, played, 0)
    count = np.where(played >= 0, np.take_along_axis(per_arm, safe, axis=-1), 0)
    collided = count >= 2
    base = np.where(played >= 0, 1.0 - stops * tau, 0.0)
    if rule is CollisionRule.ZERO:
        payoffs = np.where(collided, 0.0, base)
    else:
        payoffs = base / np.maximum(count, 1)
    return BatchOutcome(observed, mask, stops, played, payoffs, collided, (per_arm >= 2).astype(np.int8))


class UniformFeed:
    """Per-repetition uniforms of a fixed shape, one draw per round.

    Each repetition's generator is read in blocks of ``block`` rounds; the
    resulting sequence equals successive ``rng.random(shape)`` calls.
    """

    def __init__(self, gens, shape: tuple[int, ...], block: int = 256):
        self.gens = list(gens)
        self.shape = tuple(shape)
        self.block = block
        self._buf = None
        self._pos = block

    def next(self) -> np.ndarray:
        if self._pos == self.block:
            self._buf = np.stack([g.random((self.block,) + self.shape) for g in self.gens], axis=1)
            self._pos = 0
        out = self._buf[self._pos]
        self._pos += 1
        return out
