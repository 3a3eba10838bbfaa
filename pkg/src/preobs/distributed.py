"""Communication-free multi-player agents.

Each agent keeps its own UCB state, ranks the arms itself and cuts the
ranking into steps of M arms. At every step it keeps the arm it used last
time (its "sticky" arm) unless that arm collided or left the step's set, in
which case it draws a new arm uniformly from the set. The only feedback an
agent receives beyond its own observations is whether its own play
collided.

The steered variant randomises only the first step. Later steps follow the
rank of the first-step arm inside the agent's own greedy profile, so agents
with a common ranking and distinct first-step arms end up with disjoint
lists.
"""
from __future__ import annotations

import numpy as np

from .central import AssignmentRule, assign_steps, partition_steps
from .environment import CollisionRule, RoundRecord, resolve_round
from .errors import StateError, StructureError
from .ucb import UcbState, order_by

NONE = -1


class AgentState:
    """Scalar agent: own UCB state plus one sticky arm per step (``None`` if unset)."""

    def __init__(self, num_arms: int, num_players: int, state: UcbState | None = None):
        if num_arms % num_players:
            raise StructureError("K must be a multiple of M")
        self.num_players = num_players
        self.state = state if state is not None else UcbState(num_arms)
        self.sticky: list[int | None] = [None] * (num_arms // num_players)
        self.last_played_step: int | None = None

    @property
    def steps(self) -> list[tuple[int, ...]]:
        return partition_steps(order_by(self.state.indices()), self.num_players)


def choose_step_arm(agent: AgentState, i: int, step_set, rng) -> int:
    """Keep the sticky arm of step ``i`` if it is still in ``step_set``, else redraw uniformly.

    ``rng`` is a Generator or an already drawn uniform in [0, 1).
    """
    step_set = [int(a) for a in step_set]
    if not step_set:
        raise StructureError("empty step set")
    current = agent.sticky[i]
    if current is not None and current in step_set:
        return current
    u = rng.random() if isinstance(rng, np.random.Generator) else float(rng)
    arm = step_set[int(u * len(step_set))]
    agent.sticky[i] = arm
    return arm


def adapt_choose(agent: AgentState, step_index: int, first_arm: int,
                 target=AssignmentRule.SORTED) -> int:
    """Arm for ``step_index`` (0-based, >= 1) implied by the first-step arm.

    The first-step arm's rank r inside the agent's own first step selects
    virtual player r of the agent's own greedy profile for ``target``.
    """
    steps = np.array(agent.steps)
    where = np.flatnonzero(steps[0] == first_arm)
    if where.size == 0:
        raise StateError(f"arm {first_arm} is not in the agent's first step {tuple(steps[0])}")
    lists = assign_steps(steps, target, agent.state.means)
    return int(lists[where[0], step_index])


def agent_lists(agent: AgentState, u, adapt: bool = False, target=AssignmentRule.SORTED) -> tuple[int, ...]:
    """Full list the agent would walk this round, given one uniform per step.

    Sticky entries are tentatively updated here; ``distributed_round``
    restores those for steps the agent never reached.
    """
    steps = agent.steps
    first = choose_step_arm(agent, 0, steps[0], u[0])
    if adapt:
        return (first,) + tuple(adapt_choose(agent, i, first, target) for i in range(1, len(steps)))
    return (first,) + tuple(choose_step_arm(agent, i, steps[i], u[i]) for i in range(1, len(steps)))


def distributed_round(agents, y, tau: float, rng: np.random.Generator, adapt: bool = False,
                      target=AssignmentRule.SORTED, collision_rule=CollisionRule.ZERO) -> RoundRecord:
    """One round for scalar agents; ``rng`` supplies an (M, L) block of uniforms per round.

    All first-step choices are fixed before any second-step choice; since a
    choice never depends on other agents this equals simultaneous play.
    """
    M = len(agents)
    L = len(agents[0].sticky)
    if not agents[0].state.initialized:
        K = agents[0].state.num_arms
        record = resolve_round([range(K)] * M, y, tau, collision_rule, full_observation=True)
        for agent, obs in zip(agents, record.observations):
            agent.state.update(*map(np.array, zip(*obs)))
        return record
    u = rng.random((M, L))
    saved = [list(a.sticky) for a in agents]
    lists = [agent_lists(a, u[m], adapt, target) for m, a in enumerate(agents)]
    record = resolve_round(lists, y, tau, collision_rule)
    for m, agent in enumerate(agents):
        reached = record.stops[m]
        # steps not reached keep last round's sticky arm
        for i in range(reached, L):
            agent.sticky[i] = saved[m][i]
        if adapt:
            agent.sticky[1:] = saved[m][1:]
        obs = record.observations[m]
        agent.state.update(*map(np.array, zip(*obs)))
        agent.last_played_step = reached - 1 if record.played[m] is not None else None
        if record.collided[m]:
            agent.sticky[0 if adapt else reached - 1] = None
    return record


class DistributedObp:
    """Batched agents: states of shape (R, M, K), sticky arms (R, M, L).

    ``propose`` needs one (R, M, L) block of uniforms per round, read from
    each repetition's policy stream. With ``learn=False`` the estimates are
    never updated (used to study the assignment dynamics on a fixed
    ranking).
    """

    def __init__(self, num_arms: int, num_players: int, reps: int = 1, adapt: bool = False,
                 target=AssignmentRule.SORTED, state: UcbState | None = None, learn: bool = True):
        if num_arms % num_players:
            raise StructureError("K must be a multiple of M")
        self.num_players = num_players
        self.reps = reps
        self.adapt = adapt
        self.target = AssignmentRule(target)
        self.learn = learn
        self.state = state if state is not None else UcbState(num_arms, (reps, num_players))
        self.sticky = np.full((reps, num_players, num_arms // num_players), NONE, dtype=np.int64)
        self.uniforms = None

    @property
    def steps_per_list(self) -> int:
        return self.sticky.shape[-1]

    @property
    def full_observation(self) -> bool:
        return not self.state.initialized

    def propose(self, u=None) -> np.ndarray:
        K, M = self.state.num_arms, self.num_players
        if self.full_observation:
            return np.broadcast_to(np.arange(K), (self.reps, M, K)).copy()
        if u is None:
            u = self.uniforms.next()
        steps = partition_steps(order_by(self.state.indices()), M)   # (R, M, L, M)
        draw_pos = np.minimum((u * M).astype(np.int64), M - 1)
        drawn = np.take_along_axis(steps, draw_pos[..., None], axis=-1)[..., 0]
        member = (steps == self.sticky[..., None]).any(axis=-1)
        chosen = np.where(member, self.sticky, drawn)
        if not self.adapt:
            return chosen
        first = chosen[..., 0]
        rank = (steps[..., 0, :] == first[..., None]).argmax(axis=-1)
        virtual = assign_steps(steps, self.target, self.state.means)    # (R, M, M', L)
        lists = np.take_along_axis(virtual, rank[..., None, None], axis=-2)[..., 0, :]
        lists[..., 0] = first
        return lists

    def feedback(self, lists, outcome) -> None:
        initial = self.full_observation
        if self.learn or initial:
            self.state.update(lists, outcome.observed, outcome.mask)
        if initial:
            return
        if self.adapt:
            self.sticky[..., 0] = lists[..., 0]
            reset_step = np.zeros_like(outcome.stops)
        else:
            self.sticky = np.where(outcome.mask, lists, self.sticky)
            reset_step = outcome.stops - 1
        hit = outcome.collided
        r, m = np.nonzero(hit)
        self.sticky[r, m, reset_step[r, m]] = NONE
