"""Ground-truth optimal planning by exhaustive breadth-first search.

Costs count actions: player moves and box pushes both cost 1.
Unsolvability is decided exactly, by exhausting the reachable state
space; no heuristics or deadlock patterns are involved.
"""

import math
from collections import deque
from dataclasses import dataclass

from .grid import Action, Goal, GridMap, MoveError, WorldState, apply, is_goal, run


class InfeasibleObservation(Exception):
    """The observed action sequence cannot be executed from the start."""


@dataclass(frozen=True)
class OptCost:
    """Optimal plan length, or unsolvable when no plan exists."""

    steps: int | None

    @classmethod
    def finite(cls, steps: int) -> "OptCost":
        if steps < 0:
            raise ValueError("cost must be non-negative")
        return cls(steps)

    @classmethod
    def unsolvable(cls) -> "OptCost":
        return cls(None)

    @property
    def solvable(self) -> bool:
        return self.steps is not None

    def as_float(self) -> float:
        """Finite value, or +inf for unsolvable (for cost arithmetic)."""
        return math.inf if self.steps is None else float(self.steps)

    def __str__(self) -> str:
        return "Unsolvable" if self.steps is None else f"Finite {self.steps}"


@dataclass(frozen=True)
class Plan:
    actions: tuple[Action, ...]

    def __len__(self) -> int:
        return len(self.actions)


def _successors(m: GridMap, state: WorldState):
    # Canonical U, D, L, R order keeps every search deterministic.
    for action in Action:
        try:
            yield action, apply(m, state, action)
        except MoveError:
            continue


def _bfs(m: GridMap, goal: Goal, start: WorldState):
    """Shortest goal distance and a witness plan from ``start``.

    Ties at equal depth are broken by expansion order with actions tried
    U, D, L, R, which yields the lexicographically least optimal plan.
    Returns (None, None) when the goal is unreachable.
    """
    if is_goal(m, start, goal):
        return 0, ()
    seen = {start}
    queue = deque([(start, ())])
    while queue:
        state, path = queue.popleft()
        for action, nxt in _successors(m, state):
            if nxt in seen:
                continue
            seen.add(nxt)
            new_path = path + (action,)
            if is_goal(m, nxt, goal):
                return len(new_path), new_path
            queue.append((nxt, new_path))
    return None, None


def opt_cost(m: GridMap, goal: Goal, start: WorldState | None = None) -> OptCost:
    """Minimum number of actions to put the box on the goal cell."""
    cost, _ = _bfs(m, goal, m.start_state if start is None else start)
    return OptCost(cost)


def optimal_plan(m: GridMap, goal: Goal) -> Plan | None:
    """A witness plan of length opt_cost, or None when unsolvable."""
    _, path = _bfs(m, goal, m.start_state)
    return None if path is None else Plan(path)


def reachable_state_count(m: GridMap) -> int:
    """Number of world states reachable from the start state."""
    start = m.start_state
    seen = {start}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for _, nxt in _successors(m, state):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return len(seen)


_DIVERGED = -1


def constrained_costs(
    m: GridMap, goal: Goal, obs_actions
) -> tuple[OptCost, OptCost]:
    """Costs of the best plans complying with / defying an observed prefix.

    A plan complies when obs_actions is a prefix of it; any other plan
    (including every plan shorter than the prefix) defies. With an empty
    prefix defiance is impossible and cost_defy is unsolvable by
    definition; the likelihood layer smooths that case.
    """
    obs = tuple(obs_actions)
    try:
        after = run(m, obs)
    except MoveError as exc:
        raise InfeasibleObservation(str(exc)) from exc

    tail = opt_cost(m, goal, start=after)
    comply = (
        OptCost.finite(len(obs) + tail.steps) if tail.solvable else OptCost.unsolvable()
    )

    if not obs:
        return comply, OptCost.unsolvable()

    # Defy: BFS over (state, progress) where progress counts how much of
    # the prefix has been followed exactly; _DIVERGED marks plans that
    # already departed from it. Continuations that complete the prefix
    # comply forever and are pruned.
    start = m.start_state
    init = (start, 0)
    seen = {init}
    queue = deque([(init, 0)])
    defy_steps = None
    if is_goal(m, start, goal):
        defy_steps = 0  # the empty plan is shorter than the prefix
    while queue and defy_steps is None:
        (state, progress), depth = queue.popleft()
        for action, nxt in _successors(m, state):
            if progress == _DIVERGED:
                nxt_progress = _DIVERGED
            elif action == obs[progress]:
                nxt_progress = progress + 1
                if nxt_progress == len(obs):
                    continue  # complies from here on
            else:
                nxt_progress = _DIVERGED
            node = (nxt, nxt_progress)
            if node in seen:
                continue
            seen.add(node)
            if is_goal(m, nxt, goal):
                defy_steps = depth + 1
                break
            queue.append((node, depth + 1))

    return comply, OptCost(defy_steps)
