# coding: utf-8

# # One player, many channels
#
# Each round the player may sense channels one at a time before using one.
# Every sense costs a fraction tau of the round, and the player uses the
# first channel found free. The best order to sense in is simply by
# decreasing availability.

import numpy as np

from preobs import descending_list, expected_list_reward, single_player_brute_force

mu = np.array([0.2, 0.9, 0.5, 0.35])
tau = 0.1
order = descending_list(mu)
print(order, expected_list_reward(order, mu, tau))

# Checking every permutation agrees.

print(single_player_brute_force(mu, tau))

# A bad order loses reward each round.

print(expected_list_reward((0, 3, 2, 1), mu, tau))

# # Learning the order
#
# With unknown availabilities the learner sorts channels by UCB index and
# walks that list. The regret curve flattens out quickly.

from preobs import ExperimentConfig, run_experiment

cfg = ExperimentConfig(num_arms=9, tau=0.05, mu_uniform_max=0.5, horizon=2000, reps=20, seed=1)
out = run_experiment(cfg)
for t in (10, 100, 500, 1000, 2000):
    print(t, round(out.regret[t - 1], 3), round(out.bound[t - 1], 1))
