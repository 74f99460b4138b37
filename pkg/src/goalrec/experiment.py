"""Instance suites, Likert handling, and the prior x likelihood model grid.

A suite is a directory of map files plus a manifest.json listing the
instances: prior instances (no observations), observation instances
(forced moves plus one key-step observation, linked to their prior
instance through a pair id), and filler instances, which are loadable
and replayable but excluded from all scoring.

Key-step think times in the manifest are either explicit milliseconds or
the symbols "short"/"long", which resolve to the mean key-step
iterations of the designated goal's simulation batch, converted to
seconds through the timing scale. This mirrors how observed short and
long pauses correspond to the effort the actor model spends on the easy
and hard goal respectively.
"""

import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path

from .datasets import DanglingReference, ResponseDataset, SolveDataset, load_solve_data
from .grid import Action, Goal, GridMap, Observation, parse_map
from .likelihoods import TimingScale, calibrate_scale
from .recognizer import (
    GOALS,
    BatchCache,
    ModelConfig,
    PosteriorReport,
    recognize,
)

FORCED_STEP_THINK_MS = 500

LIKERT_LABELS = {
    1: "very confident B",
    2: "fairly confident B",
    3: "slightly confident B",
    4: "slightly confident A",
    5: "fairly confident A",
    6: "very confident A",
}


class InvalidLevel(ValueError):
    pass


class EmptyInput(ValueError):
    pass


class CoverageGap(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


class SuiteError(ValueError):
    pass


def likert_to_prob(level: int) -> float:
    """Map the six confidence levels to {0, 0.2, 0.4, 0.6, 0.8, 1}.

    Level 6 ("very confident A") maps to 1.0, the probability of goal A.
    """
    if level not in LIKERT_LABELS:
        raise InvalidLevel(f"likert level must be 1..6, got {level}")
    return float(Fraction(level - 1, 5))


def mean_response(levels) -> float:
    """Mean mapped probability of a batch of Likert responses.

    Computed in exact rational arithmetic so textbook cases (e.g. three
    level-6 plus two level-3 responses = 0.76) come out exactly.
    """
    levels = list(levels)
    if not levels:
        raise EmptyInput("no responses to average")
    total = sum(likert_to_prob_exact(level) for level in levels)
    return float(total / len(levels))


def likert_to_prob_exact(level: int) -> Fraction:
    if level not in LIKERT_LABELS:
        raise InvalidLevel(f"likert level must be 1..6, got {level}")
    return Fraction(level - 1, 5)


def score_model(predictions: dict, responses: ResponseDataset) -> float:
    """Total soft cross-entropy of human responses under model predictions.

    Each response contributes p_h*ln(q) + (1 - p_h)*ln(1 - q), where p_h
    is the mapped Likert probability and q the model's posterior for
    goal A on that instance. Predictions must cover every responded
    instance and stay strictly inside (0, 1).
    """
    total = 0.0
    for rec in responses.records:
        if rec.instance_id not in predictions:
            raise CoverageGap(f"no prediction for instance {rec.instance_id!r}")
        q = predictions[rec.instance_id]
        p_h = likert_to_prob(rec.likert)
        total += p_h * math.log(q) + (1.0 - p_h) * math.log(1.0 - q)
    return total


def pearson_r(xs, ys) -> float:
    """Sample Pearson correlation coefficient."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise DegenerateInput("sequences differ in length")
    if len(xs) < 2:
        raise DegenerateInput("need at least two points")
    n = len(xs)
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    var_x = sum((x - mean_x) ** 2 for x in xs)
    var_y = sum((y - mean_y) ** 2 for y in ys)
    if var_x == 0 or var_y == 0:
        raise DegenerateInput("zero variance input")
    cov = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return cov / math.sqrt(var_x * var_y)


@dataclass(frozen=True)
class KeyObservation:
    """How a variant fills in the key step: an action plus a think time.

    think_ms is explicit milliseconds; think_symbol defers to simulation
    batches ("short"/"long" of the designated goal).
    """

    action: str
    think_ms: int | None = None
    think_symbol: str | None = None
    symbol_goal: Goal | None = None


@dataclass(frozen=True)
class Instance:
    id: str
    map: GridMap
    map_file: str
    role: str  # "prior" | "observation" | "filler"
    pair_id: str | None = None
    variant: str | None = None  # "consistent" | "inconsistent"
    key_observation: KeyObservation | None = None

    @property
    def instance_type(self) -> str:
        return self.map.meta.instance_type

    @property
    def scored(self) -> bool:
        return self.instance_type != "filler"


@dataclass
class InstanceSuite:
    name: str
    root: Path
    instances: list[Instance]
    solve_data: SolveDataset | None = None
    responses_path: Path | None = None

    def instance(self, instance_id: str) -> Instance:
        for inst in self.instances:
            if inst.id == instance_id:
                return inst
        raise KeyError(instance_id)

    def ids(self) -> set[str]:
        return {inst.id for inst in self.instances}

    def maps_by_id(self) -> dict[str, GridMap]:
        return {inst.id: inst.map for inst in self.instances}

    def scored_instances(self) -> list[Instance]:
        return [inst for inst in self.instances if inst.scored]


def load_suite(path) -> InstanceSuite:
    """Load a suite directory: manifest.json plus referenced map files.

    Bundled solve data (solve_data.csv) is picked up when present, so
    empirical grid cells work out of the box on the shipped corpus.
    """
    root = Path(path)
    manifest_path = root / "manifest.json"
    if not manifest_path.exists():
        raise SuiteError(f"no manifest.json under {root}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))

    maps: dict[str, GridMap] = {}
    instances: list[Instance] = []
    for entry in manifest["instances"]:
        map_file = entry["map"]
        if map_file not in maps:
            maps[map_file] = parse_map((root / map_file).read_text(encoding="utf-8"))
        m = maps[map_file]
        role = entry["role"]
        if role not in ("prior", "observation", "filler"):
            raise SuiteError(f"instance {entry['id']!r}: unknown role {role!r}")
        key_obs = None
        if role == "observation":
            symbol = entry.get("think")
            key_obs = KeyObservation(
                action=entry["key_action"],
                think_ms=entry.get("think_ms"),
                think_symbol=symbol,
                symbol_goal=Goal(entry["symbol_goal"]) if symbol else None,
            )
            if key_obs.think_ms is None and key_obs.think_symbol is None:
                raise SuiteError(f"instance {entry['id']!r}: no think time given")
        instances.append(
            Instance(
                id=entry["id"],
                map=m,
                map_file=map_file,
                role=role,
                pair_id=entry.get("pair"),
                variant=entry.get("variant"),
                key_observation=key_obs,
            )
        )

    ids = {inst.id for inst in instances}
    if len(ids) != len(instances):
        raise SuiteError("duplicate instance ids in manifest")
    prior_pairs = {
        inst.pair_id for inst in instances if inst.role == "prior" and inst.pair_id
    }
    for inst in instances:
        if inst.role == "observation":
            if not inst.pair_id:
                raise SuiteError(f"observation instance {inst.id!r} has no pair id")
            if inst.pair_id not in prior_pairs:
                raise DanglingReference(
                    f"observation instance {inst.id!r} references pair "
                    f"{inst.pair_id!r} with no prior instance"
                )

    solve_data = None
    solve_path = root / "solve_data.csv"
    if solve_path.exists():
        solve_data = load_solve_data(solve_path)
    responses_path = root / "responses.csv"

    return InstanceSuite(
        name=manifest.get("suite", root.name),
        root=root,
        instances=instances,
        solve_data=solve_data,
        responses_path=responses_path if responses_path.exists() else None,
    )


def resolve_observations(
    instance: Instance,
    config: ModelConfig,
    cache: BatchCache,
    scale: TimingScale | None = None,
) -> list[Observation]:
    """Concrete observation sequence for an instance.

    Prior instances observe nothing. Observation instances replay the
    map's forced moves (with a nominal think time; non-key steps carry
    no timing evidence) followed by the key-step observation, resolving
    symbolic think times against the simulated actor's effort.
    """
    if instance.role != "observation":
        return []
    m = instance.map
    scale = scale or config.scale
    obs = [
        Observation(action, FORCED_STEP_THINK_MS / 1000.0)
        for action in m.meta.forced_moves
    ]
    key = instance.key_observation
    action = Action(key.action)
    if key.think_ms is not None:
        seconds = key.think_ms / 1000.0
    else:
        batch = cache.get(m, key.symbol_goal, config.planner, config.n_sims)
        seconds = scale.to_seconds(batch.key_step_iterations.mean)
    obs.append(Observation(action, seconds))
    return obs


@dataclass(frozen=True)
class GridCell:
    prior_kind: str
    likelihood_kind: str
    total_log_likelihood: float
    offset: float
    predictions: dict

    @property
    def label(self) -> str:
        return f"{self.prior_kind}+{self.likelihood_kind}"


@dataclass(frozen=True)
class GridReport:
    cells: tuple[GridCell, ...]
    baseline: str
    response_count: int

    def to_dict(self) -> dict:
        return {
            "baseline": self.baseline,
            "response_count": self.response_count,
            "cells": [
                {
                    "prior": cell.prior_kind,
                    "likelihood": cell.likelihood_kind,
                    "log_likelihood": cell.total_log_likelihood,
                    "offset": cell.offset,
                    "predictions": dict(sorted(cell.predictions.items())),
                }
                for cell in self.cells
            ],
        }

    def to_table(self) -> str:
        """Flat CSV export: one row per cell."""
        lines = ["prior,likelihood,log_likelihood,offset"]
        for cell in self.cells:
            lines.append(
                f"{cell.prior_kind},{cell.likelihood_kind},"
                f"{cell.total_log_likelihood!r},{cell.offset!r}"
            )
        return "\n".join(lines) + "\n"

    def best(self) -> GridCell:
        return max(self.cells, key=lambda c: c.total_log_likelihood)


def default_grid(base: ModelConfig = ModelConfig()) -> list[ModelConfig]:
    """The full 3 priors x 5 likelihoods grid around a base configuration."""
    return [
        replace(base, prior_kind=prior, likelihood_kind=likelihood)
        for prior in ("uniform", "easiness", "empirical")
        for likelihood in (
            "offline",
            "online",
            "online-action",
            "empirical",
            "empirical-action",
        )
    ]


def cell_predictions(
    suite: InstanceSuite,
    config: ModelConfig,
    solve_data: SolveDataset | None,
    cache: BatchCache,
    scale: TimingScale | None = None,
) -> dict:
    """Posterior p(goal A) for every scored instance under one config."""
    predictions = {}
    for inst in suite.scored_instances():
        obs = resolve_observations(inst, config, cache, scale)
        report = recognize(inst.map, obs, config, dataset=solve_data, batch_cache=cache)
        predictions[inst.id] = report.final.p_a
    return predictions


def run_grid(
    suite: InstanceSuite,
    solve_data: SolveDataset | None,
    responses: ResponseDataset,
    grid: list[ModelConfig] | None = None,
    batch_cache: BatchCache | None = None,
) -> GridReport:
    """Score every grid cell against the same set of human responses.

    Filler instances (and any responses to them) are excluded. Offsets
    are reported against the uniform+offline cell when present, else
    against the first cell. The timing scale is calibrated from the
    solve data when available; otherwise each config's own scale is used.
    """
    grid = grid if grid is not None else default_grid()
    if not grid:
        raise ValueError("grid needs at least one cell")
    cache = batch_cache or BatchCache()
    solve_data = solve_data if solve_data is not None else suite.solve_data

    known = suite.ids()
    for rec in responses.records:
        if rec.instance_id not in known:
            raise DanglingReference(
                f"response references unknown instance {rec.instance_id!r}"
            )
    scored_ids = {inst.id for inst in suite.scored_instances()}
    scored_responses = ResponseDataset(
        [rec for rec in responses.records if rec.instance_id in scored_ids]
    )

    scale = None
    if solve_data is not None:
        batches = {}
        planner = grid[0].planner
        n = grid[0].n_sims
        for inst in suite.scored_instances():
            if inst.map.meta.id in solve_data.map_ids():
                for goal in GOALS:
                    batches[(inst.map.meta.id, goal)] = cache.get(
                        inst.map, goal, planner, n
                    )
        try:
            scale = calibrate_scale(solve_data, batches)
        except Exception:
            scale = None

    totals = []
    for config in grid:
        predictions = cell_predictions(suite, config, solve_data, cache, scale)
        totals.append(
            (config, predictions, score_model(predictions, scored_responses))
        )

    baseline_ll = None
    baseline_label = None
    for config, _, total in totals:
        if config.prior_kind == "uniform" and config.likelihood_kind == "offline":
            baseline_ll = total
            baseline_label = "uniform+offline"
            break
    if baseline_ll is None:
        config, _, baseline_ll = totals[0]
        baseline_label = f"{config.prior_kind}+{config.likelihood_kind}"

    cells = tuple(
        GridCell(
            prior_kind=config.prior_kind,
            likelihood_kind=config.likelihood_kind,
            total_log_likelihood=total,
            offset=total - baseline_ll,
            predictions=predictions,
        )
        for config, predictions, total in totals
    )
    return GridReport(
        cells=cells,
        baseline=baseline_label,
        response_count=len(scored_responses.records),
    )
