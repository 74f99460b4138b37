"""Tabular datasets from the human experiment pipeline.

Both files are plain CSV with a header row and times in integer
milliseconds:

solve data:    participant_id,map_id,goal,step_index,action,think_ms,outcome
response data: participant_id,instance_id,likert

Solve records group into episodes keyed by (participant, map, goal);
step indices must be contiguous from 0 within an episode.
"""

import csv
from dataclasses import dataclass
from pathlib import Path

from .grid import Action, Goal
from .planner import Outcome


class ParseError(ValueError):
    def __init__(self, path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class DanglingReference(ValueError):
    pass


@dataclass(frozen=True)
class SolveRecord:
    participant: str
    map_id: str
    goal: Goal
    step_index: int
    action: Action
    think_ms: int
    outcome: Outcome


@dataclass(frozen=True)
class SolveEpisode:
    participant: str
    map_id: str
    goal: Goal
    actions: tuple[Action, ...]
    think_ms: tuple[int, ...]
    outcome: Outcome

    @property
    def total_seconds(self) -> float:
        return sum(self.think_ms) / 1000.0

    def action_at(self, step_index: int) -> Action | None:
        if step_index < len(self.actions):
            return self.actions[step_index]
        return None

    def think_seconds_at(self, step_index: int) -> float | None:
        if step_index < len(self.think_ms):
            return self.think_ms[step_index] / 1000.0
        return None


class SolveDataset:
    """Episode-indexed access to problem-solving records."""

    def __init__(self, records: list[SolveRecord]):
        self.records = list(records)
        grouped: dict[tuple[str, str, Goal], list[SolveRecord]] = {}
        for rec in self.records:
            grouped.setdefault((rec.participant, rec.map_id, rec.goal), []).append(rec)
        self._episodes: dict[tuple[str, Goal], list[SolveEpisode]] = {}
        for (participant, map_id, goal), recs in grouped.items():
            recs.sort(key=lambda r: r.step_index)
            if [r.step_index for r in recs] != list(range(len(recs))):
                raise ValueError(
                    f"episode ({participant}, {map_id}, {goal.value}) has "
                    "non-contiguous step indices"
                )
            episode = SolveEpisode(
                participant=participant,
                map_id=map_id,
                goal=goal,
                actions=tuple(r.action for r in recs),
                think_ms=tuple(r.think_ms for r in recs),
                outcome=recs[-1].outcome,
            )
            self._episodes.setdefault((map_id, goal), []).append(episode)

    def episodes(self, map_id: str, goal: Goal) -> list[SolveEpisode]:
        return self._episodes.get((map_id, goal), [])

    def map_ids(self) -> list[str]:
        return sorted({map_id for map_id, _ in self._episodes})

    def max_total_seconds(self) -> float:
        totals = [
            ep.total_seconds for eps in self._episodes.values() for ep in eps
        ]
        if not totals:
            raise ValueError("dataset is empty")
        return max(totals)


@dataclass(frozen=True)
class ResponseRecord:
    participant: str
    instance_id: str
    likert: int


class ResponseDataset:
    def __init__(self, records: list[ResponseRecord]):
        self.records = list(records)

    def by_instance(self) -> dict[str, list[int]]:
        out: dict[str, list[int]] = {}
        for rec in self.records:
            out.setdefault(rec.instance_id, []).append(rec.likert)
        return out


def _read_rows(path, expected_header: list[str]):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(path, 1, "empty file") from None
        if [h.strip() for h in header] != expected_header:
            raise ParseError(path, 1, f"expected header {','.join(expected_header)}")
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(expected_header):
                raise ParseError(path, line_no, f"expected {len(expected_header)} columns")
            yield line_no, [cell.strip() for cell in row]


def load_solve_data(path) -> SolveDataset:
    records = []
    columns = ["participant_id", "map_id", "goal", "step_index", "action", "think_ms", "outcome"]
    for line_no, row in _read_rows(path, columns):
        participant, map_id, goal, step, action, think_ms, outcome = row
        try:
            rec = SolveRecord(
                participant=participant,
                map_id=map_id,
                goal=Goal(goal),
                step_index=int(step),
                action=Action(action),
                think_ms=int(think_ms),
                outcome=Outcome(outcome),
            )
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from exc
        if rec.think_ms < 0:
            raise ParseError(path, line_no, "think_ms must be non-negative")
        if rec.step_index < 0:
            raise ParseError(path, line_no, "step_index must be non-negative")
        records.append(rec)
    return SolveDataset(records)


def load_responses(path, known_instances=None) -> ResponseDataset:
    records = []
    for line_no, row in _read_rows(path, ["participant_id", "instance_id", "likert"]):
        participant, instance_id, likert = row
        try:
            level = int(likert)
        except ValueError as exc:
            raise ParseError(path, line_no, str(exc)) from exc
        if not 1 <= level <= 6:
            raise ParseError(path, line_no, f"likert level {level} outside 1..6")
        if known_instances is not None and instance_id not in known_instances:
            raise DanglingReference(
                f"{path}:{line_no}: response references unknown instance {instance_id!r}"
            )
        records.append(ResponseRecord(participant, instance_id, level))
    return ResponseDataset(records)
