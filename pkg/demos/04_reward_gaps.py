# coding: utf-8

# # When does sensing first pay off?
#
# Compare against a player that grabs a channel blindly, and against the
# best single channel per player known in advance. Cheap sensing helps a
# lot, expensive sensing less so.

from preobs import ExperimentConfig, sweep

cfg = ExperimentConfig(num_arms=9, tau=0.05, mu_uniform_max=0.5, horizon=1000, reps=10, seed=4)
for row in sweep(cfg, "tau", [0.01, 0.05, 0.1]):
    print(row["tau"], round(row["pct_vs_random"], 1), round(row["pct_vs_single-opt"], 1))

# Scaling the availability range changes the absolute gap.

for row in sweep(cfg.replace(tau=0.1), "x", [0.1, 0.3, 0.5, 0.7, 0.9]):
    print(row["x"], round(row["gap_vs_random"], 1), round(row["gap_vs_single-opt"], 1))
