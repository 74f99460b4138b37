"""Observation likelihoods: offline cost-difference, online simulation,
and empirical (human-data) estimators, each with an action component and
an optional Gaussian timing component.

Values are unnormalized likelihoods; they are combined across goals and
smoothed once per goal so no posterior ever collapses to exactly 0 or 1.
"""

import math
from dataclasses import dataclass

from .grid import Action, Goal, GridMap
from .planner import NoTraceReachesStep, SimulationBatch
from .priors import MissingData
from .solver import InfeasibleObservation, constrained_costs, opt_cost

UNSOLVABLE_GOAL_LIKELIHOOD = 0.025
DEFAULT_SMOOTHING = 0.025

ONLINE_STD_FLOOR_ITERATIONS = 1.0
EMPIRICAL_STD_FLOOR_SECONDS = 0.25


class EmptyOverlap(Exception):
    """Human data and simulation batches share no map."""


@dataclass(frozen=True)
class TimingScale:
    """Conversion between planner iterations and wall-clock seconds."""

    seconds_per_iteration: float

    def __post_init__(self):
        if self.seconds_per_iteration <= 0:
            raise ValueError("seconds_per_iteration must be positive")

    def to_iterations(self, seconds: float) -> float:
        return seconds / self.seconds_per_iteration

    def to_seconds(self, iterations: float) -> float:
        return iterations * self.seconds_per_iteration


@dataclass(frozen=True)
class GaussianTimingModel:
    """Gaussian over thinking effort; std is floored to stay non-degenerate."""

    mean: float
    std: float

    def __post_init__(self):
        if self.std <= 0:
            raise ValueError("std must be positive")

    @classmethod
    def from_iteration_stats(cls, mean: float, std: float) -> "GaussianTimingModel":
        return cls(mean, max(std, ONLINE_STD_FLOOR_ITERATIONS))

    @classmethod
    def from_second_samples(cls, samples) -> "GaussianTimingModel":
        samples = list(samples)
        mean = sum(samples) / len(samples)
        var = sum((s - mean) ** 2 for s in samples) / len(samples)
        return cls(mean, max(math.sqrt(var), EMPIRICAL_STD_FLOOR_SECONDS))

    def density(self, x: float) -> float:
        z = (x - self.mean) / self.std
        return math.exp(-0.5 * z * z) / (self.std * math.sqrt(2 * math.pi))


@dataclass(frozen=True)
class LikelihoodValue:
    """Per-goal likelihood split into action and optional timing parts."""

    ll_action: float
    ll_timing: float | None = None

    @property
    def combined(self) -> float:
        if self.ll_timing is None:
            return self.ll_action
        return self.ll_action * self.ll_timing


def offline_likelihood(
    m: GridMap, goal: Goal, obs_actions, beta: float = 1.0
) -> LikelihoodValue:
    """Cost-difference likelihood from optimal planning.

    With cost_comply and cost_defy the best plan lengths that embed /
    avoid the observed prefix, the likelihood is the logistic
    1 / (1 + exp(beta * (cost_comply - cost_defy))), treating an
    unsolvable side as infinitely expensive. An unsolvable hypothesis
    gets the flat floor 0.025: optimal planning generates no plans for
    it at all, and the floor keeps solvable goals strictly preferred
    without zeroing the posterior.
    """
    if not opt_cost(m, goal).solvable:
        return LikelihoodValue(ll_action=UNSOLVABLE_GOAL_LIKELIHOOD)
    comply, defy = constrained_costs(m, goal, obs_actions)
    delta = comply.as_float() - defy.as_float()
    if math.isinf(delta):
        value = 0.0 if delta > 0 else 1.0
    else:
        value = 1.0 / (1.0 + math.exp(beta * delta))
    return LikelihoodValue(ll_action=value)


def online_action_likelihood(
    batch: SimulationBatch, key_step: int, observed_action: Action
) -> float:
    """Share of simulated traces choosing the observed action at the step."""
    return batch.action_frequency(key_step, observed_action)


def online_timing_likelihood(
    batch: SimulationBatch,
    key_step: int,
    observed_seconds: float,
    scale: TimingScale,
) -> float:
    """Gaussian density of the observed thinking time, in iteration units.

    The Gaussian's mean and std come from the batch's iteration counts at
    the step (std floored at 1 iteration); the observation is converted
    to iterations through the calibrated scale.
    """
    stats = batch.iteration_stats_at(key_step)
    model = GaussianTimingModel.from_iteration_stats(stats.mean, stats.std)
    return model.density(scale.to_iterations(observed_seconds))


def empirical_action_likelihood(
    dataset, map_id: str, goal: Goal, key_step: int, observed_action: Action
) -> float:
    """Share of human episodes choosing the observed action at the step."""
    episodes = dataset.episodes(map_id, goal)
    if not episodes:
        raise MissingData(map_id, goal)
    at_step = [ep.action_at(key_step) for ep in episodes]
    at_step = [a for a in at_step if a is not None]
    if not at_step:
        raise NoTraceReachesStep(key_step)
    return at_step.count(observed_action) / len(at_step)


def empirical_timing_likelihood(
    dataset, map_id: str, goal: Goal, key_step: int, observed_seconds: float
) -> float:
    """Gaussian density of the observed time under human key-step times."""
    episodes = dataset.episodes(map_id, goal)
    if not episodes:
        raise MissingData(map_id, goal)
    times = [ep.think_seconds_at(key_step) for ep in episodes]
    times = [t for t in times if t is not None]
    if not times:
        raise NoTraceReachesStep(key_step)
    return GaussianTimingModel.from_second_samples(times).density(observed_seconds)


def empirical_likelihood(
    dataset,
    map_id: str,
    goal: Goal,
    key_step: int,
    observed_action: Action,
    observed_seconds: float | None = None,
) -> LikelihoodValue:
    action = empirical_action_likelihood(dataset, map_id, goal, key_step, observed_action)
    timing = None
    if observed_seconds is not None:
        timing = empirical_timing_likelihood(
            dataset, map_id, goal, key_step, observed_seconds
        )
    return LikelihoodValue(ll_action=action, ll_timing=timing)


def combine(per_goal, smoothing: float = DEFAULT_SMOOTHING) -> list[float]:
    """Smoothed combined likelihood per goal.

    Adds the smoothing constant to each goal's combined (action x timing)
    value, so downstream posteriors never hit an exact 0 or 1. Accepts
    LikelihoodValue instances or plain numbers.
    """
    out = []
    for value in per_goal:
        combined = value.combined if isinstance(value, LikelihoodValue) else float(value)
        out.append(combined + smoothing)
    return out


def calibrate_scale(dataset, batches) -> TimingScale:
    """Seconds per iteration that matches total human and model effort.

    batches maps (map_id, Goal) to a SimulationBatch; only maps present
    on both sides count. The scale makes total planning seconds equal
    between the humans and the simulated actor across those maps.
    """
    batch_maps = {map_id for map_id, _ in batches}
    shared = sorted(batch_maps & set(dataset.map_ids()))
    if not shared:
        raise EmptyOverlap("no map is covered by both the dataset and the batches")
    human_seconds = 0.0
    model_iterations = 0.0
    for map_id in shared:
        for goal in (Goal.A, Goal.B):
            for ep in dataset.episodes(map_id, goal):
                human_seconds += ep.total_seconds
            batch = batches.get((map_id, goal))
            if batch is not None:
                model_iterations += sum(t.total_iterations for t in batch.traces)
    if model_iterations == 0:
        raise EmptyOverlap("simulation batches contain no iterations on shared maps")
    return TimingScale(human_seconds / model_iterations)
