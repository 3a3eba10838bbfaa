import itertools

import numpy as np
import pytest

from preobs.central import AssignmentRule
from preobs.distributed import (AgentState, DistributedObp, adapt_choose, agent_lists, choose_step_arm,
                                distributed_round)
from preobs.environment import resolve_batch
from preobs.errors import StateError, StructureError
from preobs.ucb import UcbState


def _agent(mu, M):
    return AgentState(len(mu), M, UcbState.frozen(mu))


def test_uniform_redraw_frequencies():
    a = AgentState(12, 3)
    rng = np.random.default_rng(0)
    picks = []
    for _ in range(10**5):
        a.sticky[0] = None
        picks.append(choose_step_arm(a, 0, (4, 7, 9), rng))
    freq = np.bincount(picks, minlength=10)[[4, 7, 9]] / len(picks)
    assert np.all(np.abs(freq - 1 / 3) < 0.01)


def test_sticky_kept_and_reset():
    a = AgentState(12, 3)
    a.sticky[0] = 7
    assert choose_step_arm(a, 0, (4, 7, 9), 0.99) == 7
    assert choose_step_arm(a, 0, (1, 2, 3), 0.5) == 2
    with pytest.raises(StructureError):
        choose_step_arm(a, 0, (), 0.5)


def test_all_unavailable_observes_one_arm_per_step():
    agents = [_agent([0.9, 0.8, 0.5, 0.4, 0.2, 0.1], 2)]
    agents[0].num_players = 2
    rec = distributed_round(agents, (0,) * 6, 0.1, np.random.default_rng(0))
    assert len(rec.observations[0]) == 3 and rec.played == (None,)


def test_first_step_hit():
    agents = [_agent([0.9, 0.8, 0.5, 0.4], 2)]
    rec = distributed_round(agents, (1, 1, 1, 1), 0.1, np.random.default_rng(0))
    assert len(rec.observations[0]) == 1 and rec.payoffs[0] == pytest.approx(0.9)


def test_shared_sticky_collides_and_resets():
    mu = [0.9, 0.8, 0.5, 0.4]
    agents = [_agent(mu, 2), _agent(mu, 2)]
    for a in agents:
        a.sticky[0] = 0
    rec = distributed_round(agents, (1, 1, 1, 1), 0.1, np.random.default_rng(0))
    assert rec.played == (0, 0) and rec.payoffs == (0.0, 0.0)
    assert agents[0].sticky[0] is None and agents[1].sticky[0] is None


def test_adapt_sorted_rank_map():
    mu = [0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1]
    a = _agent(mu, 3)
    # arm 1 has rank 2 of 3 in step 1, so the rank-2 arm of every later step follows
    assert [adapt_choose(a, i, 1, AssignmentRule.SORTED) for i in (1, 2)] == [4, 7]
    with pytest.raises(StateError):
        adapt_choose(a, 1, 5)


def test_adapt_single_player_is_descending():
    mu = [0.3, 0.9, 0.5]
    a = _agent(mu, 1)
    assert agent_lists(a, [0.5, 0.5, 0.5], adapt=True) == (1, 2, 0)


@pytest.mark.parametrize("M", [2, 3, 4])
@pytest.mark.parametrize("target", list(AssignmentRule))
def test_adapt_distinct_ranks_disjoint(M, target):
    rng = np.random.default_rng(M)
    mu = rng.random(3 * M)
    first = np.argsort(-mu, kind="stable")[:M]
    for perm in itertools.permutations(range(M)):
        lists = []
        for m in range(M):
            a = _agent(mu, M)
            a.sticky[0] = int(first[perm[m]])
            lists.append(agent_lists(a, [0.0] * 3, adapt=True, target=target))
        flat = [x for lst in lists for x in lst]
        assert len(set(flat)) == len(flat)


@pytest.mark.parametrize("adapt", [False, True])
def test_batched_agents_match_scalar(adapt):
    K, M, T, tau = 6, 3, 300, 0.05
    rng = np.random.default_rng(5)
    mu = rng.random(K)
    y_all = (rng.random((T, K)) < mu).astype(np.int8)
    agents = [AgentState(K, M) for _ in range(M)]
    pol = DistributedObp(K, M, 1, adapt=adapt)
    g_scalar, g_batch = np.random.default_rng(9), np.random.default_rng(9)
    for t in range(T):
        rec = distributed_round(agents, y_all[t], tau, g_scalar, adapt=adapt)
        full = pol.full_observation
        lists = pol.propose(None if full else g_batch.random((M, K // M))[None])
        out = resolve_batch(lists, y_all[t][None], tau, full_observation=full)
        pol.feedback(lists, out)
        assert np.allclose(rec.payoffs, out.payoffs[0])
        assert tuple(out.collided[0]) == rec.collided
        for m, a in enumerate(agents):
            assert [None if x < 0 else int(x) for x in pol.sticky[0, m]] == a.sticky
            assert np.array_equal(a.state.counts, pol.state.counts[0, m])


def test_frozen_ordering_absorbs():
    mu = np.linspace(0.9, 0.1, 9)
    R, M = 20, 3
    pol = DistributedObp(9, M, R, state=UcbState.frozen(np.broadcast_to(mu, (R, M, 9))), learn=False)
    rng = np.random.default_rng(1)
    y = np.ones((R, 9), dtype=np.int8)
    hist = []
    for _ in range(300):
        lists = pol.propose(rng.random((R, M, 3)))
        out = resolve_batch(lists, y, 0.1)
        pol.feedback(lists, out)
        hist.append(out.collided.any(axis=1))
    hist = np.array(hist)
    assert not hist[-100:].any()
