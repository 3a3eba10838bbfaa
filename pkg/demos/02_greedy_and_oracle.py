# coding: utf-8

# # Several players sharing the channels
#
# A collision-free profile hands every player its own list. Greedy profiles
# cut the channels, sorted by availability, into blocks of M and give one
# channel of each block to each player.

import numpy as np

from preobs import AssignmentRule, brute_force_optimal, expected_profile_reward, greedy_profile

mu = np.array([0.9, 0.8, 0.3, 0.2])
tau = 0.05
for rule in AssignmentRule:
    p = greedy_profile(mu, 2, tau, rule)
    print(rule.value, p.lists, expected_profile_reward(p, mu, tau))

# Greedy-reverse hands the better later channel to the player who is more
# likely to still be looking. With two channels per player it is optimal.

print(brute_force_optimal(mu, 2, tau)[1])

# With three channels per player that stops being guaranteed. The survey
# below counts how often a non-greedy split wins.

from preobs.experiments import oracle_check

rep = oracle_check(9, 3, 100, seed=0, tau=0.05)
print(rep.reverse_best, rep.non_greedy, rep.counterexample)
