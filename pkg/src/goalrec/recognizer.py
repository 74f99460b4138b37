"""Bayesian fusion of a prior with per-goal observation likelihoods.

The posterior over the two goals is P(G|O) proportional to
Prior(G) * LL(O, G). Observations stream in step by step; only the key
step (the first free choice after any forced moves) carries timing
evidence, every other step contributes action evidence alone.

Smoothing semantics: per-goal likelihood components multiply across
steps as raw probabilities/densities, and the smoothing constant is
added once to each goal's cumulative product at every report point.
With components bounded by 1 this keeps every posterior strictly inside
(0, 1) and within the documented smoothing bound under a uniform prior.
"""

from dataclasses import dataclass, field

from .grid import Goal, GridMap, MoveError, Observation, WorldState, apply, print_map
from .likelihoods import (
    DEFAULT_SMOOTHING,
    LikelihoodValue,
    TimingScale,
    combine,
    empirical_likelihood,
    offline_likelihood,
    online_action_likelihood,
    online_timing_likelihood,
)
from .planner import PlannerConfig, SimulationBatch, simulate_batch
from .priors import (
    EasinessParams,
    GoalPriorDistribution,
    easiness_prior,
    empirical_prior,
    uniform_prior,
)
from .solver import InfeasibleObservation

PRIOR_KINDS = ("uniform", "easiness", "empirical")
LIKELIHOOD_KINDS = (
    "offline",
    "online",
    "online-action",
    "empirical",
    "empirical-action",
)

GOALS = (Goal.A, Goal.B)


class AllZeroMass(Exception):
    """Every goal has zero posterior mass; the update is undefined."""


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """One cell of the prior x likelihood model grid, with its parameters."""

    prior_kind: str = "uniform"
    likelihood_kind: str = "offline"
    beta: float = 1.0
    easiness: EasinessParams = field(default_factory=EasinessParams)
    planner: PlannerConfig = field(default_factory=PlannerConfig)
    n_sims: int = 100
    smoothing: float = DEFAULT_SMOOTHING
    # Uncalibrated fallback: ~10 planner iterations per second of human
    # thinking. Grid runs and the service recalibrate from solve data.
    scale: TimingScale = field(default_factory=lambda: TimingScale(0.1))

    def __post_init__(self):
        if self.prior_kind not in PRIOR_KINDS:
            raise InvalidConfig(f"unknown prior kind {self.prior_kind!r}")
        if self.likelihood_kind not in LIKELIHOOD_KINDS:
            raise InvalidConfig(f"unknown likelihood kind {self.likelihood_kind!r}")
        if self.n_sims < 1:
            raise InvalidConfig("n_sims must be >= 1")
        if self.smoothing < 0:
            raise InvalidConfig("smoothing must be non-negative")
        if self.beta <= 0:
            raise InvalidConfig("beta must be positive")

    @property
    def needs_dataset(self) -> bool:
        return self.prior_kind == "empirical" or self.likelihood_kind.startswith(
            "empirical"
        )

    @property
    def uses_timing(self) -> bool:
        return self.likelihood_kind in ("online", "empirical")

    @property
    def needs_batches(self) -> bool:
        return self.likelihood_kind.startswith("online")


def posterior(prior: GoalPriorDistribution, combined_lls) -> GoalPriorDistribution:
    """Normalize prior times likelihood over the two goals."""
    lls = list(combined_lls)
    mass_a = prior.p_a * lls[0]
    mass_b = prior.p_b * lls[1]
    total = mass_a + mass_b
    if total <= 0:
        raise AllZeroMass("posterior mass is zero for every goal")
    return GoalPriorDistribution(mass_a / total, mass_b / total)


@dataclass(frozen=True)
class StepReport:
    observation: Observation
    state_before: WorldState
    per_goal: dict
    smoothed: tuple[float, float]
    posterior: GoalPriorDistribution


@dataclass(frozen=True)
class PosteriorReport:
    prior: GoalPriorDistribution
    steps: tuple[StepReport, ...]

    @property
    def final(self) -> GoalPriorDistribution:
        return self.steps[-1].posterior if self.steps else self.prior

    def to_dict(self) -> dict:
        return {
            "prior": {"p_a": self.prior.p_a, "p_b": self.prior.p_b},
            "steps": [
                {
                    "action": step.observation.action.value,
                    "think_seconds": step.observation.think_seconds,
                    "per_goal": {
                        goal.value: {
                            "ll_action": value.ll_action,
                            "ll_timing": value.ll_timing,
                        }
                        for goal, value in step.per_goal.items()
                    },
                    "smoothed": list(step.smoothed),
                    "posterior": {
                        "p_a": step.posterior.p_a,
                        "p_b": step.posterior.p_b,
                    },
                }
                for step in self.steps
            ],
            "final": {"p_a": self.final.p_a, "p_b": self.final.p_b},
        }


class BatchCache:
    """Process-lifetime cache of simulation batches.

    Keyed by the map's printed form, the goal, the planner configuration
    and the batch size, so identical configurations share work across
    recognitions, grid cells and service sessions.
    """

    def __init__(self):
        self._store: dict = {}

    def get(
        self, m: GridMap, goal: Goal, planner: PlannerConfig, n: int
    ) -> SimulationBatch:
        key = (print_map(m), goal, planner, n)
        batch = self._store.get(key)
        if batch is None:
            batch = simulate_batch(m, goal, planner, n)
            self._store[key] = batch
        return batch


def build_prior(m: GridMap, config: ModelConfig, dataset=None) -> GoalPriorDistribution:
    if config.prior_kind == "uniform":
        return uniform_prior()
    if config.prior_kind == "easiness":
        return easiness_prior(m, config.easiness)
    return empirical_prior(dataset, m.meta.id)


def recognize(
    m: GridMap,
    observations,
    config: ModelConfig = ModelConfig(),
    dataset=None,
    batch_cache: BatchCache | None = None,
) -> PosteriorReport:
    """Evaluate the full observation sequence under one model config.

    Observations must be executable from the start state (forced moves
    included, with their recorded times). The report carries one entry
    per step; with no observations the final posterior is the prior.
    Deterministic given the config: simulation seeds are fixed by it.
    """
    observations = list(observations)
    prior = build_prior(m, config, dataset)
    cache = batch_cache or BatchCache()
    key_step = m.meta.key_step_index

    batches = {}
    if config.needs_batches:
        for goal in GOALS:
            batches[goal] = cache.get(m, goal, config.planner, config.n_sims)

    steps: list[StepReport] = []
    state = m.start_state
    running = {goal: 1.0 for goal in GOALS}
    prefix = []

    for index, obs in enumerate(observations):
        try:
            next_state = apply(m, state, obs.action)
        except MoveError as exc:
            raise InfeasibleObservation(f"step {index}: {exc}") from exc
        prefix.append(obs.action)

        timed = config.uses_timing and index == key_step
        per_goal: dict[Goal, LikelihoodValue] = {}
        for goal in GOALS:
            per_goal[goal] = _step_likelihood(
                m, goal, index, obs, timed, prefix, config, dataset, batches
            )

        if config.likelihood_kind == "offline":
            # The offline likelihood scores the whole observed prefix at
            # once; it replaces the running value instead of multiplying.
            for goal in GOALS:
                running[goal] = per_goal[goal].combined
        else:
            for goal in GOALS:
                running[goal] *= per_goal[goal].combined

        smoothed = combine([running[goal] for goal in GOALS], config.smoothing)
        steps.append(
            StepReport(
                observation=obs,
                state_before=state,
                per_goal=per_goal,
                smoothed=(smoothed[0], smoothed[1]),
                posterior=posterior(prior, smoothed),
            )
        )
        state = next_state

    return PosteriorReport(prior=prior, steps=tuple(steps))


def _step_likelihood(
    m: GridMap,
    goal: Goal,
    index: int,
    obs: Observation,
    timed: bool,
    prefix,
    config: ModelConfig,
    dataset,
    batches,
) -> LikelihoodValue:
    kind = config.likelihood_kind
    if kind == "offline":
        return offline_likelihood(m, goal, prefix, config.beta)
    if kind.startswith("online"):
        batch = batches[goal]
        action_ll = online_action_likelihood(batch, index, obs.action)
        timing_ll = None
        if timed:
            timing_ll = online_timing_likelihood(
                batch, index, obs.think_seconds, config.scale
            )
        return LikelihoodValue(ll_action=action_ll, ll_timing=timing_ll)
    # empirical kinds
    return empirical_likelihood(
        dataset,
        m.meta.id,
        goal,
        index,
        obs.action,
        obs.think_seconds if timed else None,
    )
