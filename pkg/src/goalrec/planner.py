"""Solvability-aware adaptive lookahead planner.

The planner models an online actor: at each decision step it runs one
bounded best-first lookahead (priority f = depth + h) from the current
state, commits the whole path when the lookahead reaches a goal state,
and otherwise samples the next action by softmax over the best f seen
per first action. Node expansions are the planner's "thinking time".

A closed set of every state generated anywhere in the episode persists
across decision steps. The planner declares the goal unsolvable when a
lookahead exhausts its frontier without finding the goal (the space
reachable from the current state contains no goal state), or when no
state outside the closed set is encountered for a fixed number of
consecutive decision steps.

The per-step lookahead budget adapts: it multiplies by budget_growth
whenever the lookahead fails to surface any state with a better h than
the current one (capped at max_budget), and resets to base_budget after
a committed move that improves h.

Randomness comes from random.Random (Mersenne Twister), which is
portable across platforms; episode i of a batch uses seed + i.
"""

import heapq
import json
import math
import random
from collections import deque
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache

from .grid import Action, Cell, Goal, GridMap, MoveError, WorldState, apply, is_goal


class InfeasibleForcedMoves(Exception):
    """The forced move prefix cannot be executed from the start state."""


@dataclass(frozen=True)
class PlannerConfig:
    base_budget: int = 32
    budget_growth: float = 2.0
    max_budget: int = 4096
    temperature: float = 5.0
    stall_threshold: int = 3
    max_steps: int = 200
    seed: int = 0

    def __post_init__(self):
        if min(self.base_budget, self.max_budget, self.stall_threshold, self.max_steps) < 1:
            raise ValueError("budget, stall threshold and step counts must be >= 1")
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")
        if self.budget_growth < 1:
            raise ValueError("budget growth must be >= 1")


class Outcome(str, Enum):
    SOLVED = "Solved"
    DECLARED_UNSOLVABLE = "DeclaredUnsolvable"
    BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass(frozen=True)
class TraceStep:
    """One committed step (or the terminal declaration pseudo-step).

    action is None only on a final step where the planner declared the
    goal unsolvable after spending iterations without committing a move.
    closed_size is the cumulative size of the episode's closed set.
    """

    state: WorldState
    action: Action | None
    iterations: int
    novel_states: int
    closed_size: int


@dataclass(frozen=True)
class PlannerTrace:
    steps: tuple[TraceStep, ...]
    outcome: Outcome
    total_iterations: int

    @property
    def actions(self) -> tuple[Action, ...]:
        return tuple(s.action for s in self.steps if s.action is not None)

    def iterations_at(self, step_index: int) -> int | None:
        """Iterations spent on the decision at step_index, if committed."""
        if step_index < len(self.steps) and self.steps[step_index].action is not None:
            return self.steps[step_index].iterations
        return None


_DELTAS = tuple((a, a.delta) for a in Action)


def _neighbors(m: GridMap, state: WorldState):
    """Legal (action, successor) pairs without exception overhead."""
    pr, pc = state.player
    walls = m.walls
    box = state.box
    for action, (dr, dc) in _DELTAS:
        dest = (pr + dr, pc + dc)
        if dest in walls:
            continue
        if dest == box:
            box_dest = (dest[0] + dr, dest[1] + dc)
            if box_dest in walls:
                continue
            yield action, WorldState(dest, box_dest)
        else:
            yield action, WorldState(dest, box)


@lru_cache(maxsize=4096)
def _distance_field(m: GridMap, origin: Cell) -> dict:
    """Wall-aware BFS distances from origin, ignoring movable pieces."""
    dist = {origin: 0}
    queue = deque([origin])
    walls = m.walls
    while queue:
        r, c = queue.popleft()
        d = dist[(r, c)] + 1
        for _, (dr, dc) in _DELTAS:
            nxt = (r + dr, c + dc)
            if nxt not in dist and nxt not in walls:
                dist[nxt] = d
                queue.append(nxt)
    return dist


def heuristic(m: GridMap, state: WorldState, goal: Goal) -> float:
    """Lookahead guidance: geometric box distance plus player approach.

    h = wall-aware BFS distance (box -> goal, ignoring the player)
        + max(0, wall-aware BFS distance (player -> box) - 1),
    and +inf when no box path exists at all ignoring the player. This is
    guidance, not a solvability test: a box in a corner still has a
    finite geometric path and is only ruled out by search.
    """
    box_d = _distance_field(m, m.goal_cell(goal)).get(state.box)
    if box_d is None:
        return math.inf
    player_d = _distance_field(m, state.box).get(state.player)
    if player_d is None:
        return math.inf
    return float(box_d + max(0, player_d - 1))


@dataclass
class LookaheadResult:
    expansions: int
    novel_states: int
    goal_path: tuple[Action, ...] | None
    action_scores: dict[Action, float]  # best f per first action
    best_generated_h: float
    frontier_exhausted: bool

    @property
    def goal_found(self) -> bool:
        return self.goal_path is not None


def _lookahead(
    m: GridMap,
    goal: Goal,
    root: WorldState,
    budget: int,
    closed: set[WorldState],
) -> LookaheadResult:
    """One bounded best-first lookahead from root.

    The search keeps its own duplicate set; the episode-wide closed set
    is only consulted (and extended) to count novel states. Stops as
    soon as a goal state is generated, the expansion budget is spent, or
    the frontier empties (everything reachable from root expanded).
    """
    novel = 0
    goal_cell = m.goal_cell(goal)
    counter = 0
    open_heap = [(heuristic(m, root, goal), counter, root, 0, ())]
    expanded: set[WorldState] = set()
    scores: dict[Action, float] = {}
    best_h = math.inf
    expansions = 0
    goal_path = None

    while open_heap and expansions < budget and goal_path is None:
        _, _, state, depth, path = heapq.heappop(open_heap)
        if state in expanded:
            continue
        expanded.add(state)
        expansions += 1
        for action, nxt in _neighbors(m, state):
            first = path[0] if path else action
            h = heuristic(m, nxt, goal)
            f = depth + 1 + h
            if f < scores.get(first, math.inf):
                scores[first] = f
            if h < best_h:
                best_h = h
            if nxt not in closed:
                closed.add(nxt)
                novel += 1
            if nxt.box == goal_cell:
                goal_path = path + (action,)
                break
            if nxt not in expanded:
                counter += 1
                heapq.heappush(open_heap, (f, counter, nxt, depth + 1, path + (action,)))

    exhausted = goal_path is None and all(
        state in expanded for _, _, state, _, _ in open_heap
    )
    return LookaheadResult(
        expansions=expansions,
        novel_states=novel,
        goal_path=goal_path,
        action_scores=scores,
        best_generated_h=best_h,
        frontier_exhausted=exhausted,
    )


def declare_check(lookahead: LookaheadResult, stall_counter: int, threshold: int) -> bool:
    """True when the episode should end with DeclaredUnsolvable."""
    if lookahead.frontier_exhausted and not lookahead.goal_found:
        return True
    return stall_counter >= threshold


def softmax_choice_probabilities(
    scores: dict[Action, float], temperature: float
) -> dict[Action, float]:
    """P(a) proportional to exp(-Q(a)/temperature), in canonical order.

    Scores are shifted by their minimum before exponentiation, so adding
    a constant to every Q leaves the probabilities unchanged. Actions
    with infinite Q get probability 0 unless every action is infinite,
    in which case the choice is uniform.
    """
    ordered = [a for a in Action if a in scores]
    finite = [a for a in ordered if math.isfinite(scores[a])]
    if not finite:
        return {a: 1.0 / len(ordered) for a in ordered}
    low = min(scores[a] for a in finite)
    weights = {
        a: math.exp(-(scores[a] - low) / temperature) if math.isfinite(scores[a]) else 0.0
        for a in ordered
    }
    total = sum(weights.values())
    return {a: w / total for a, w in weights.items()}


def _sample(probabilities: dict[Action, float], rng: random.Random) -> Action:
    roll = rng.random()
    acc = 0.0
    actions = list(probabilities)
    for action in actions:
        acc += probabilities[action]
        if roll < acc:
            return action
    return actions[-1]


def plan_episode(
    m: GridMap,
    goal: Goal,
    config: PlannerConfig = PlannerConfig(),
    forced_moves: tuple[Action, ...] | None = None,
) -> PlannerTrace:
    """Run one actor episode toward the goal hypothesis.

    Forced moves are executed verbatim as zero-iteration steps before
    the first decision step. The trace is a pure function of
    (map, goal, config, forced_moves).
    """
    forced = m.meta.forced_moves if forced_moves is None else tuple(forced_moves)
    rng = random.Random(config.seed)
    closed: set[WorldState] = set()
    steps: list[TraceStep] = []
    state = m.start_state
    closed.add(state)

    def record(action, iterations, novel):
        steps.append(
            TraceStep(
                state=state,
                action=action,
                iterations=iterations,
                novel_states=novel,
                closed_size=len(closed),
            )
        )

    def finish(outcome: Outcome) -> PlannerTrace:
        total = sum(s.iterations for s in steps)
        return PlannerTrace(steps=tuple(steps), outcome=outcome, total_iterations=total)

    for action in forced:
        try:
            nxt = apply(m, state, action)
        except MoveError as exc:
            raise InfeasibleForcedMoves(str(exc)) from exc
        record(action, 0, 1 if nxt not in closed else 0)
        state = nxt
        closed.add(state)
        if is_goal(m, state, goal):
            return finish(Outcome.SOLVED)
        if len(steps) >= config.max_steps:
            return finish(Outcome.BUDGET_EXHAUSTED)

    if is_goal(m, state, goal):
        return finish(Outcome.SOLVED)

    budget = config.base_budget
    stall_counter = 0

    while len(steps) < config.max_steps:
        look = _lookahead(m, goal, state, budget, closed)
        if look.novel_states == 0:
            stall_counter += 1
        else:
            stall_counter = 0

        if declare_check(look, stall_counter, config.stall_threshold):
            record(None, look.expansions, look.novel_states)
            return finish(Outcome.DECLARED_UNSOLVABLE)

        if look.goal_path is not None:
            # Commit the whole path found by this lookahead; only the
            # first step carries the lookahead's cost.
            first = True
            for action in look.goal_path:
                record(action, look.expansions if first else 0,
                       look.novel_states if first else 0)
                state = apply(m, state, action)
                closed.add(state)
                first = False
                if is_goal(m, state, goal):
                    return finish(Outcome.SOLVED)
                if len(steps) >= config.max_steps:
                    return finish(Outcome.BUDGET_EXHAUSTED)
            continue

        if not look.action_scores:
            # No legal move at all: nothing is reachable from here.
            record(None, look.expansions, look.novel_states)
            return finish(Outcome.DECLARED_UNSOLVABLE)

        current_h = heuristic(m, state, goal)
        if look.best_generated_h >= current_h:
            budget = min(config.max_budget, int(budget * config.budget_growth))

        probs = softmax_choice_probabilities(look.action_scores, config.temperature)
        action = _sample(probs, rng)
        record(action, look.expansions, look.novel_states)
        state = apply(m, state, action)
        closed.add(state)
        if is_goal(m, state, goal):
            return finish(Outcome.SOLVED)
        if heuristic(m, state, goal) < current_h:
            budget = config.base_budget

    return finish(Outcome.BUDGET_EXHAUSTED)


@dataclass(frozen=True)
class IterationStats:
    count: int
    mean: float
    std: float

    @classmethod
    def of(cls, values) -> "IterationStats":
        values = list(values)
        if not values:
            return cls(0, 0.0, 0.0)
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        return cls(len(values), mean, math.sqrt(var))


class NoTraceReachesStep(Exception):
    def __init__(self, step_index: int):
        super().__init__(f"no simulated trace commits an action at step {step_index}")
        self.step_index = step_index


@dataclass(frozen=True)
class SimulationBatch:
    """Aggregate view over n seeded episodes of one (map, goal) pair."""

    traces: tuple[PlannerTrace, ...]
    key_step_index: int
    action_counts: tuple[dict, ...]
    step_iterations: tuple[IterationStats, ...]
    key_step_iterations: IterationStats
    total_iterations: IterationStats
    outcome_counts: dict

    @property
    def size(self) -> int:
        return len(self.traces)

    def decisions_at(self, step_index: int) -> int:
        """Number of traces that committed an action at step_index."""
        if step_index >= len(self.action_counts):
            return 0
        return sum(self.action_counts[step_index].values())

    def action_frequency(self, step_index: int, action: Action) -> float:
        total = self.decisions_at(step_index)
        if total == 0:
            raise NoTraceReachesStep(step_index)
        return self.action_counts[step_index].get(action, 0) / total

    def iteration_stats_at(self, step_index: int) -> IterationStats:
        if self.decisions_at(step_index) == 0:
            raise NoTraceReachesStep(step_index)
        return self.step_iterations[step_index]


def simulate_batch(
    m: GridMap,
    goal: Goal,
    config: PlannerConfig = PlannerConfig(),
    n: int = 100,
    forced_moves: tuple[Action, ...] | None = None,
) -> SimulationBatch:
    """Run n independent episodes with seeds seed+0 ... seed+(n-1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    forced = m.meta.forced_moves if forced_moves is None else tuple(forced_moves)
    traces = [
        plan_episode(m, goal, replace(config, seed=config.seed + i), forced)
        for i in range(n)
    ]

    depth = max(len(t.steps) for t in traces)
    action_counts = []
    step_stats = []
    for idx in range(depth):
        counts: dict[Action, int] = {}
        iters = []
        for t in traces:
            if idx < len(t.steps) and t.steps[idx].action is not None:
                step = t.steps[idx]
                counts[step.action] = counts.get(step.action, 0) + 1
                iters.append(step.iterations)
        action_counts.append(counts)
        step_stats.append(IterationStats.of(iters))

    key = len(forced)
    key_stats = step_stats[key] if key < depth else IterationStats.of([])
    outcomes: dict[Outcome, int] = {}
    for t in traces:
        outcomes[t.outcome] = outcomes.get(t.outcome, 0) + 1

    return SimulationBatch(
        traces=tuple(traces),
        key_step_index=key,
        action_counts=tuple(action_counts),
        step_iterations=tuple(step_stats),
        key_step_iterations=key_stats,
        total_iterations=IterationStats.of(t.total_iterations for t in traces),
        outcome_counts=outcomes,
    )


def trace_to_jsonl(trace: PlannerTrace) -> str:
    """Line-delimited trace export.

    One record per step: {"step", "action", "iterations", "novel_states",
    "closed_size"} with action null on a terminal declaration step,
    followed by one summary record {"outcome", "total_iterations"}.
    """
    lines = []
    for i, step in enumerate(trace.steps):
        lines.append(
            json.dumps(
                {
                    "step": i,
                    "action": step.action.value if step.action else None,
                    "iterations": step.iterations,
                    "novel_states": step.novel_states,
                    "closed_size": step.closed_size,
                },
                sort_keys=True,
            )
        )
    lines.append(
        json.dumps(
            {"outcome": trace.outcome.value, "total_iterations": trace.total_iterations},
            sort_keys=True,
        )
    )
    return "\n".join(lines) + "\n"
