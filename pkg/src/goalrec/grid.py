"""Sokoban world model: maps, states, legality, deterministic transitions.

Single-box Sokoban on a rectangular grid with two candidate goal cells,
A and B. Cells are (row, col), 0-indexed, row 0 at the top; U/D change
the row, L/R the column. Goal cells behave like ordinary floor for
movement; a goal is satisfied exactly when the box sits on its cell.

Map text format (UTF-8):
  optional header lines starting with ';' carrying one key=value pair
  each (id, type, pair_id, forced_moves as a string over UDLR, key_step),
  followed by the grid body: '#' wall, '.' floor, '@' player, '$' box,
  'A' goal A, 'B' goal B. All rows must have equal length and the outer
  border must consist of '#' only.
"""

from dataclasses import dataclass, field
from enum import Enum

Cell = tuple[int, int]

INSTANCE_TYPES = ("prior", "action", "easy-goal", "competing-path", "filler")


class Goal(str, Enum):
    A = "A"
    B = "B"

    @property
    def other(self) -> "Goal":
        return Goal.B if self is Goal.A else Goal.A


class Action(str, Enum):
    # Definition order is the canonical action order (U, D, L, R).
    UP = "U"
    DOWN = "D"
    LEFT = "L"
    RIGHT = "R"

    @property
    def delta(self) -> Cell:
        return _DELTAS[self]


_DELTAS = {
    Action.UP: (-1, 0),
    Action.DOWN: (1, 0),
    Action.LEFT: (0, -1),
    Action.RIGHT: (0, 1),
}


def parse_actions(text: str) -> tuple[Action, ...]:
    """Parse a compact action string like "UUL" into a tuple of actions."""
    try:
        return tuple(Action(ch) for ch in text.strip())
    except ValueError as exc:
        raise ValueError(f"invalid action string {text!r}") from exc


class MapError(ValueError):
    """Raised when map text violates the format."""


class NonRectangularGrid(MapError):
    pass


class MissingMarker(MapError):
    def __init__(self, which: str):
        super().__init__(f"missing marker: {which}")
        self.which = which


class DuplicateMarker(MapError):
    def __init__(self, which: str):
        super().__init__(f"duplicate marker: {which}")
        self.which = which


class UnsealedBorder(MapError):
    pass


class UnknownCharacter(MapError):
    def __init__(self, position: Cell, char: str):
        super().__init__(f"unknown character {char!r} at {position}")
        self.position = position
        self.char = char


class MoveError(Exception):
    """An action is illegal in the given state."""


class BlockedByWall(MoveError):
    pass


class BoxBlocked(MoveError):
    pass


@dataclass(frozen=True)
class InstanceMeta:
    """Experiment metadata attached to a map.

    The key step is the first free choice: its index always equals the
    number of forced moves.
    """

    id: str = ""
    instance_type: str = "prior"
    pair_id: str | None = None
    forced_moves: tuple[Action, ...] = ()

    def __post_init__(self):
        if self.instance_type not in INSTANCE_TYPES:
            raise ValueError(f"unknown instance type {self.instance_type!r}")
        if self.instance_type == "prior" and self.forced_moves:
            raise ValueError("prior instances cannot carry forced moves")

    @property
    def key_step_index(self) -> int:
        return len(self.forced_moves)


@dataclass(frozen=True)
class WorldState:
    player: Cell
    box: Cell

    def __post_init__(self):
        if self.player == self.box:
            raise ValueError("player and box cannot share a cell")


@dataclass(frozen=True)
class Observation:
    """One observed step: an action and the time spent choosing it."""

    action: Action
    think_seconds: float = 0.0

    def __post_init__(self):
        if self.think_seconds < 0:
            raise ValueError("think time must be non-negative")


@dataclass(frozen=True)
class GridMap:
    width: int
    height: int
    walls: frozenset[Cell]
    goal_a: Cell
    goal_b: Cell
    player_start: Cell
    box_start: Cell
    meta: InstanceMeta = field(default_factory=InstanceMeta)

    def is_wall(self, cell: Cell) -> bool:
        return cell in self.walls

    def goal_cell(self, goal: Goal) -> Cell:
        return self.goal_a if goal is Goal.A else self.goal_b

    @property
    def start_state(self) -> WorldState:
        return WorldState(self.player_start, self.box_start)

    def floor_cells(self) -> list[Cell]:
        return [
            (r, c)
            for r in range(self.height)
            for c in range(self.width)
            if (r, c) not in self.walls
        ]


_MARKERS = {"@": "player", "$": "box", "A": "goal_a", "B": "goal_b"}


def parse_map(text: str) -> GridMap:
    """Parse map text into a GridMap, validating format and markers."""
    headers: dict[str, str] = {}
    rows: list[str] = []
    for raw in text.splitlines():
        if raw.startswith(";"):
            body = raw[1:].strip()
            if not body:
                continue
            key, sep, value = body.partition("=")
            if not sep:
                raise MapError(f"malformed header line {raw!r}")
            headers[key.strip()] = value.strip()
        elif raw.strip():
            rows.append(raw)

    if not rows:
        raise MapError("map has no grid body")
    width = len(rows[0])
    if any(len(row) != width for row in rows):
        raise NonRectangularGrid("grid rows have unequal lengths")
    height = len(rows)
    if height < 3 or width < 3:
        raise MapError("grid too small to have an interior")

    walls: set[Cell] = set()
    found: dict[str, Cell] = {}
    for r, row in enumerate(rows):
        for c, ch in enumerate(row):
            if ch == "#":
                walls.add((r, c))
            elif ch == ".":
                pass
            elif ch in _MARKERS:
                name = _MARKERS[ch]
                if name in found:
                    raise DuplicateMarker(name)
                found[name] = (r, c)
            else:
                raise UnknownCharacter((r, c), ch)

    for r in range(height):
        for c in range(width):
            on_border = r in (0, height - 1) or c in (0, width - 1)
            if on_border and (r, c) not in walls:
                raise UnsealedBorder(f"border cell {(r, c)} is not a wall")

    for name in ("player", "box", "goal_a", "goal_b"):
        if name not in found:
            raise MissingMarker(name)

    meta = InstanceMeta(
        id=headers.get("id", ""),
        instance_type=headers.get("type", "prior"),
        pair_id=headers.get("pair_id") or None,
        forced_moves=parse_actions(headers.get("forced_moves", "")),
    )
    if "key_step" in headers:
        declared = int(headers["key_step"])
        if declared != meta.key_step_index:
            raise MapError(
                f"key_step={declared} contradicts forced_moves of length "
                f"{meta.key_step_index}"
            )

    return GridMap(
        width=width,
        height=height,
        walls=frozenset(walls),
        goal_a=found["goal_a"],
        goal_b=found["goal_b"],
        player_start=found["player"],
        box_start=found["box"],
        meta=meta,
    )


def print_map(m: GridMap) -> str:
    """Render a GridMap back to text. parse_map(print_map(m)) == m."""
    lines: list[str] = []
    meta = m.meta
    if meta.id:
        lines.append(f"; id={meta.id}")
    if meta.instance_type != "prior" or meta.id:
        lines.append(f"; type={meta.instance_type}")
    if meta.pair_id:
        lines.append(f"; pair_id={meta.pair_id}")
    if meta.forced_moves:
        lines.append("; forced_moves=" + "".join(a.value for a in meta.forced_moves))
        lines.append(f"; key_step={meta.key_step_index}")
    cells = {m.goal_a: "A", m.goal_b: "B", m.player_start: "@", m.box_start: "$"}
    for r in range(m.height):
        row = []
        for c in range(m.width):
            if (r, c) in m.walls:
                row.append("#")
            else:
                row.append(cells.get((r, c), "."))
        lines.append("".join(row))
    return "\n".join(lines) + "\n"


def apply(m: GridMap, state: WorldState, action: Action) -> WorldState:
    """Apply one action. Pushes the box when walking into it.

    Raises BlockedByWall when the player's destination is a wall and
    BoxBlocked when the box would be pushed into a wall.
    """
    dr, dc = action.delta
    dest = (state.player[0] + dr, state.player[1] + dc)
    if m.is_wall(dest):
        raise BlockedByWall(f"{action.value} into wall at {dest}")
    if dest == state.box:
        box_dest = (dest[0] + dr, dest[1] + dc)
        if m.is_wall(box_dest):
            raise BoxBlocked(f"box pushed into wall at {box_dest}")
        return WorldState(player=dest, box=box_dest)
    return WorldState(player=dest, box=state.box)


def legal_actions(m: GridMap, state: WorldState) -> list[Action]:
    """Actions for which apply succeeds, in canonical U, D, L, R order."""
    out = []
    for action in Action:
        try:
            apply(m, state, action)
        except MoveError:
            continue
        out.append(action)
    return out


def is_goal(m: GridMap, state: WorldState, goal: Goal) -> bool:
    return state.box == m.goal_cell(goal)


def run(m: GridMap, actions, start: WorldState | None = None) -> WorldState:
    """Execute a sequence of actions from start (default: map start)."""
    state = m.start_state if start is None else start
    for action in actions:
        state = apply(m, state, action)
    return state
