import numpy as np
import pytest

from preobs.central import (AssignmentRule, CentralObp, assign_within_steps, controller_round,
                            initial_split, partition_steps)
from preobs.environment import resolve_batch
from preobs.errors import StructureError
from preobs.ucb import UcbState

MU = [0.9, 0.8, 0.3, 0.2]


def test_partition_examples():
    assert partition_steps((0, 1, 2, 3), 2) == [(0, 1), (2, 3)]
    assert partition_steps((3, 1, 2, 0), 2) == [(3, 1), (2, 0)]
    assert partition_steps((2, 0, 1), 1) == [(2,), (0,), (1,)]
    with pytest.raises(StructureError):
        partition_steps((0, 1, 2), 2)


def test_sorted_rule():
    p = assign_within_steps([(0, 1), (2, 3)], AssignmentRule.SORTED, MU)
    assert p.lists == ((0, 2), (1, 3))


def test_reverse_rule():
    # player 1 has the larger chance (0.2) of reaching step 2 empty-handed
    p = assign_within_steps([(0, 1), (2, 3)], AssignmentRule.REVERSE, MU)
    assert p.lists == ((0, 3), (1, 2))


def test_initial_split_covers_each_arm_once():
    lists = initial_split(9, 3)
    assert lists.tolist() == [[0, 3, 6], [1, 4, 7], [2, 5, 8]]


def test_controller_round_is_collision_free():
    rng = np.random.default_rng(0)
    s = UcbState(6)
    for _ in range(50):
        y = (rng.random(6) < 0.7).astype(int)
        prof, rec, s = controller_round(s, "greedy-reverse", 3, y, 0.1)
        assert not any(rec.collided)
        assert sorted(a for lst in prof.lists for a in lst) == list(range(6))


@pytest.mark.parametrize("rule", list(AssignmentRule))
def test_batched_controller_matches_scalar(rule):
    rng = np.random.default_rng(11)
    R, K, M, T, tau = 4, 6, 2, 200, 0.1
    mu = rng.random((R, K))
    pol = CentralObp(K, M, R, rule)
    scalars = [UcbState(K) for _ in range(R)]
    for _ in range(T):
        y = (rng.random((R, K)) < mu).astype(np.int8)
        full = pol.full_observation
        lists = pol.propose()
        out = resolve_batch(lists, y, tau, full_observation=full)
        pol.feedback(lists, out)
        for r in range(R):
            prof, rec, _ = controller_round(scalars[r], rule, M, y[r], tau)
            assert prof.lists == tuple(tuple(int(a) for a in row) for row in lists[r])
            assert np.allclose(rec.payoffs, out.payoffs[r])
