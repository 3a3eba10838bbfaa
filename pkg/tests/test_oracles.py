import numpy as np
import pytest

from preobs.central import AssignmentRule
from preobs.errors import BudgetError, ParameterError
from preobs.model import descending_list, expected_list_reward, expected_profile_reward
from preobs.oracles import (RandomBaseline, SingleUcb, allocation_values, balanced_owners, best_greedy,
                            best_greedy_value, brute_force_optimal, greedy_allocations, greedy_profile,
                            random_baseline_lists, single_opt_profile, single_player_brute_force,
                            single_real_ucb_round)
from preobs.ucb import UcbState

MU4 = [0.9, 0.8, 0.3, 0.2]


def test_brute_force_single_player_is_descending():
    mu = [0.3, 0.8, 0.1, 0.5]
    prof, v, _ = brute_force_optimal(mu, 1, 0.1)
    assert prof.lists == (descending_list(mu),)
    assert v == pytest.approx(expected_list_reward(descending_list(mu), mu, 0.1), abs=1e-12)


def test_brute_force_two_players_matches_reverse():
    _, v, _ = brute_force_optimal(MU4, 2, 0.05)
    rev = greedy_profile(MU4, 2, 0.05, AssignmentRule.REVERSE)
    # 0.95*0.9 + 0.9*0.1*0.2 + 0.95*0.8 + 0.9*0.2*0.3
    assert v == pytest.approx(1.687, abs=1e-12)
    assert v == pytest.approx(expected_profile_reward(rev, MU4, 0.05), abs=1e-12)


def test_brute_force_equal_means():
    mu, tau = [0.4] * 6, 0.1
    _, v, _ = brute_force_optimal(mu, 2, tau)
    closed = 2 * sum((1 - k * tau) * 0.4 * 0.6 ** (k - 1) for k in (1, 2, 3))
    assert v == pytest.approx(closed, abs=1e-12)


def test_brute_force_budget_and_parameters():
    with pytest.raises(BudgetError):
        brute_force_optimal([0.5] * 13, 1, 0.01)
    with pytest.raises(ParameterError):
        brute_force_optimal([0.5] * 4, 2, 0.5)


def test_balanced_owner_count():
    assert len(balanced_owners(6, 2)) == 20
    assert len(balanced_owners(6, 3)) == 90


def test_unrestricted_search_never_worse():
    rng = np.random.default_rng(2)
    for _ in range(10):
        mu = rng.random(6)
        _, vb, _ = brute_force_optimal(mu, 2, 0.05)
        _, vu, _ = brute_force_optimal(mu, 2, 0.05, balanced=False)
        assert vu >= vb - 1e-12


def test_single_player_brute_force_examples():
    assert single_player_brute_force((0.2, 0.9, 0.5), 0.1)[0] == (1, 2, 0)
    assert single_player_brute_force((0.7,), 0.1)[0] == (0,)


def test_greedy_profiles():
    assert greedy_profile(MU4, 2, 0.05, AssignmentRule.SORTED).lists == ((0, 2), (1, 3))
    assert greedy_profile(MU4, 2, 0.05, AssignmentRule.REVERSE).lists == ((0, 3), (1, 2))
    for rule in AssignmentRule:
        assert greedy_profile([0.1, 0.5, 0.3], 3, 0.1, rule).lists == ((1,), (2,), (0,))


def test_best_greedy_value_special_cases():
    mu = [0.3, 0.8, 0.1, 0.5]
    assert best_greedy_value(mu, 1, 0.1) == pytest.approx(expected_list_reward(descending_list(mu), mu, 0.1))
    rng = np.random.default_rng(4)
    for _ in range(20):
        m = rng.random(6)
        rev = greedy_profile(m, 3, 0.1, AssignmentRule.REVERSE)
        assert best_greedy_value(m, 3, 0.1) == pytest.approx(expected_profile_reward(rev, m, 0.1), abs=1e-12)


def test_greedy_allocations_are_all_within_step_assignments():
    allocs = greedy_allocations(np.linspace(0.9, 0.1, 6), 2)
    assert allocs.shape == (8, 2, 3)
    assert len({a.tobytes() for a in allocs}) == 8


def test_allocation_values_vs_profiles():
    mu = np.array([0.6, 0.2, 0.9, 0.4])
    owners = np.array([[0, 1, 1, 0], [1, 0, -1, 0]])
    v = allocation_values(owners, mu, 0.1, 2)
    assert v[0] == pytest.approx(expected_profile_reward([(0, 3), (2, 1)], mu, 0.1))
    assert v[1] == pytest.approx(expected_profile_reward([(3, 1), (0,)], mu, 0.1))


def test_single_opt_profile():
    assert single_opt_profile([0.9, 0.8, 0.3], 2).lists == ((0,), (1,))
    assert sorted(single_opt_profile([0.2, 0.4, 0.1], 3).lists) == [(0,), (1,), (2,)]
    assert single_opt_profile([0.5, 0.5, 0.5], 1).lists == ((0,),)


def test_random_lists():
    rng = np.random.default_rng(0)
    assert random_baseline_lists(1, 3, rng).tolist() == [[0], [0], [0]]
    first = np.array([random_baseline_lists(5, 1, rng)[0, 0] for _ in range(10**5)])
    freq = np.bincount(first, minlength=5) / len(first)
    assert np.all(np.abs(freq - 0.2) < 0.01)
    pol = RandomBaseline(6, 2, reps=3, length=3)
    assert pol.propose(rng.random((3, 2, 6))).shape == (3, 2, 3)


def test_single_real_round():
    s = UcbState(3)
    prof, _ = single_real_ucb_round(s, 3, (1, 0, 1), 0.1)
    assert sorted(prof.lists) == [(0,), (1,), (2,)]
    mu = [0.3, 0.7, 0.5, 0.1]
    prof, _ = single_real_ucb_round(UcbState.frozen(mu), 2, (1, 1, 1, 1), 0.1)
    assert prof.lists == single_opt_profile(mu, 2).lists
    s = UcbState(3)
    s.counts[:] = [4, 1, 2]
    s.sums[:] = [2, 0, 1]
    s.t = 8
    bonus = s.means + np.sqrt(2 * np.log(8) / s.counts)
    prof, _ = single_real_ucb_round(s, 1, (0, 0, 0), 0.1)
    assert prof.lists == ((int(np.argmax(bonus)),),)


def test_single_ucb_batch_initializes_every_arm():
    pol = SingleUcb(4, 2, reps=1)
    seen = set()
    for _ in range(2):
        lists = pol.propose()
        seen.update(lists[0, :, 0].tolist())
        pol.state.update(lists.reshape(1, -1), np.zeros((1, 2)))
    assert seen == {0, 1, 2, 3}


def test_best_greedy_returns_profile():
    prof, v = best_greedy(MU4, 2, 0.05)
    assert v == pytest.approx(expected_profile_reward(prof, MU4, 0.05))
