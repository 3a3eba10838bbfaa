"""Bandits with pre-observation costs: single, centralised and distributed players."""
from .central import AssignmentRule, CentralObp, assign_within_steps, controller_round, partition_steps
from .distributed import AgentState, DistributedObp, adapt_choose, choose_step_arm, distributed_round
from .environment import (CollisionRule, IidBernoulli, RoundRecord, TraceSource, load_trace,
                          resolve_batch, resolve_round, sample_realization, substream, write_trace)
from .errors import (BudgetError, ConfigError, DegenerateGapError, DisjointnessError, EndOfTrace,
                     ParameterError, PreobsError, StateError, StructureError, TraceError)
from .experiments import oracle_check, sweep
from .harness import ExperimentConfig, SeriesOutput, run_experiment
from .metrics import (GapTable, collision_stats, pseudo_regret_central, pseudo_regret_single,
                      theorem1_bound, theorem3_bound)
from .model import (BanditInstance, PolicyProfile, descending_list, expected_list_reward,
                    expected_profile_reward)
from .oracles import (best_greedy, brute_force_optimal, greedy_profile, single_opt_profile,
                      single_player_brute_force)
from .ucb import ObpUcb, UcbState

__version__ = "0.1.0"
