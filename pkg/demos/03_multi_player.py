# coding: utf-8

# # Central controller versus independent agents
#
# The controller learns one shared ranking and never lets players collide.
# Agents acting alone pick uniformly inside each block until they stop
# bumping into each other.

from preobs import ExperimentConfig, run_experiment

base = dict(num_arms=9, num_players=3, tau=0.05, mu_uniform_max=0.5, horizon=2000, reps=20, seed=3)
for policy in ("c-mp-obp", "d-mp-obp", "d-mp-adapt-obp"):
    out = run_experiment(ExperimentConfig(policy=policy, **base))
    print(policy, out.metric, round(out.regret[-1], 1), "collisions", out.collisions[-1])

# Sharing the reward on a collision instead of voiding it helps the agents.

out = run_experiment(ExperimentConfig(policy="d-mp-obp", collision_rule="share", **base))
print("share", round(out.reward[-1], 1))
