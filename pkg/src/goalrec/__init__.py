"""Goal recognition for single-box Sokoban.

Infers which of two candidate goals an actor is pursuing from observed
actions and thinking times, using Bayesian fusion of solvability-aware
priors with planning-based likelihoods.
"""

from .grid import (
    Action,
    Goal,
    GridMap,
    InstanceMeta,
    Observation,
    WorldState,
    apply,
    is_goal,
    legal_actions,
    parse_map,
    print_map,
)
from .planner import PlannerConfig, PlannerTrace, SimulationBatch, plan_episode, simulate_batch
from .priors import EasinessParams, GoalPriorDistribution, easiness_prior, uniform_prior
from .recognizer import BatchCache, ModelConfig, PosteriorReport, recognize
from .solver import OptCost, Plan, constrained_costs, opt_cost, optimal_plan

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BatchCache",
    "EasinessParams",
    "Goal",
    "GoalPriorDistribution",
    "GridMap",
    "InstanceMeta",
    "ModelConfig",
    "Observation",
    "OptCost",
    "Plan",
    "PlannerConfig",
    "PlannerTrace",
    "PosteriorReport",
    "SimulationBatch",
    "WorldState",
    "apply",
    "constrained_costs",
    "easiness_prior",
    "is_goal",
    "legal_actions",
    "opt_cost",
    "optimal_plan",
    "parse_map",
    "plan_episode",
    "print_map",
    "recognize",
    "simulate_batch",
    "uniform_prior",
    "__version__",
]
