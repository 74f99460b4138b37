"""Priors over the two goal hypotheses.

Three families: uniform, the easiness prior (each goal weighted by the
other goal's difficulty score, so easier goals get more mass), and an
empirical prior estimated from recorded human solving times.
"""

from dataclasses import dataclass
from fractions import Fraction

from .grid import Goal, GridMap
from .planner import Outcome
from .solver import OptCost, opt_cost


class MissingData(Exception):
    """The dataset lacks records needed for the requested estimate."""

    def __init__(self, map_id: str, goal=None):
        detail = f"no solve records for map {map_id!r}"
        if goal is not None:
            detail += f", goal {goal.value}"
        super().__init__(detail)
        self.map_id = map_id
        self.goal = goal


@dataclass(frozen=True)
class GoalPriorDistribution:
    p_a: float
    p_b: float

    def __post_init__(self):
        if self.p_a < 0 or self.p_b < 0:
            raise ValueError("probabilities must be non-negative")
        if abs(self.p_a + self.p_b - 1.0) > 1e-12:
            raise ValueError("prior must sum to 1")

    def p(self, goal: Goal) -> float:
        return self.p_a if goal is Goal.A else self.p_b


@dataclass(frozen=True)
class EasinessParams:
    """Difficulty score parameters: score = offset + min(cap, optimal cost).

    offset is the baseline cognitive effort of any instance; cap is the
    score assigned to unsolvable goals (and to any goal at least that
    hard), treating unsolvability as an extreme of difficulty.
    """

    offset: int = 5
    cap: int = 26

    def __post_init__(self):
        if self.offset <= 0 or self.cap <= 0:
            raise ValueError("offset and cap must be positive")


def uniform_prior() -> GoalPriorDistribution:
    return GoalPriorDistribution(0.5, 0.5)


def difficulty_score(cost: OptCost, params: EasinessParams = EasinessParams()) -> int:
    """offset + min(cap, optimal cost); unsolvable goals score offset + cap."""
    if not cost.solvable:
        return params.offset + params.cap
    return params.offset + min(params.cap, cost.steps)


def easiness_prior(
    m: GridMap, params: EasinessParams = EasinessParams()
) -> GoalPriorDistribution:
    """Prior weighting each goal by the *other* goal's difficulty score.

    Scores are small integers, so the ratio is computed exactly and only
    converted to floating point at the boundary.
    """
    score_a = difficulty_score(opt_cost(m, Goal.A), params)
    score_b = difficulty_score(opt_cost(m, Goal.B), params)
    total = score_a + score_b
    return GoalPriorDistribution(
        float(Fraction(score_b, total)), float(Fraction(score_a, total))
    )


def empirical_prior(dataset, map_id: str) -> GoalPriorDistribution:
    """Prior from human solving times: weight 1 / mean episode seconds.

    Episodes that ended in an unsolvability declaration count as the
    longest solving time observed anywhere in the dataset.
    """
    ceiling = dataset.max_total_seconds()
    means = {}
    for goal in (Goal.A, Goal.B):
        episodes = dataset.episodes(map_id, goal)
        if not episodes:
            raise MissingData(map_id, goal)
        totals = [
            ceiling if ep.outcome is Outcome.DECLARED_UNSOLVABLE else ep.total_seconds
            for ep in episodes
        ]
        means[goal] = sum(totals) / len(totals)
    weight_a = 1.0 / means[Goal.A]
    weight_b = 1.0 / means[Goal.B]
    total = weight_a + weight_b
    return GoalPriorDistribution(weight_a / total, weight_b / total)
