import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goalrec.grid import (
    Action,
    BlockedByWall,
    BoxBlocked,
    DuplicateMarker,
    Goal,
    InstanceMeta,
    MapError,
    MissingMarker,
    MoveError,
    NonRectangularGrid,
    UnknownCharacter,
    UnsealedBorder,
    WorldState,
    apply,
    is_goal,
    legal_actions,
    parse_map,
    print_map,
    run,
)

from conftest import CORNER_TEXT, T1_TEXT


def test_parse_t1_marker_placement(t1):
    assert t1.player_start == (3, 2)
    assert t1.box_start == (2, 2)
    assert t1.goal_a == (1, 1)
    assert t1.goal_b == (1, 3)
    assert t1.width == 5 and t1.height == 5


def test_parse_missing_player():
    with pytest.raises(MissingMarker) as exc:
        parse_map("#####\n#A.B#\n#.$.#\n#...#\n#####\n")
    assert exc.value.which == "player"


def test_parse_duplicate_box():
    with pytest.raises(DuplicateMarker) as exc:
        parse_map("#####\n#A.B#\n#$$.#\n#.@.#\n#####\n")
    assert exc.value.which == "box"


def test_parse_non_rectangular():
    with pytest.raises(NonRectangularGrid):
        parse_map("#####\n#A.B#\n#.$.#\n#.@#\n#####\n")


def test_parse_unsealed_border():
    with pytest.raises(UnsealedBorder):
        parse_map("#####\n#A.B#\n..$.#\n#.@.#\n#####\n")


def test_parse_unknown_character():
    with pytest.raises(UnknownCharacter) as exc:
        parse_map("#####\n#A.B#\n#.$x#\n#.@.#\n#####\n")
    assert exc.value.position == (2, 3)


def test_header_parsing():
    text = "; id=x1\n; type=action\n; pair_id=x\n; forced_moves=UR\n; key_step=2\n" + T1_TEXT.splitlines()[1] + "\n" + "\n".join(T1_TEXT.splitlines()[2:]) + "\n"
    m = parse_map(text)
    assert m.meta.id == "x1"
    assert m.meta.instance_type == "action"
    assert m.meta.pair_id == "x"
    assert m.meta.forced_moves == (Action.UP, Action.RIGHT)
    assert m.meta.key_step_index == 2


def test_key_step_contradiction_rejected():
    lines = T1_TEXT.splitlines()[1:]
    text = "; forced_moves=U\n; key_step=3\n; type=action\n" + "\n".join(lines) + "\n"
    with pytest.raises(MapError):
        parse_map(text)


def test_prior_with_forced_moves_rejected():
    lines = T1_TEXT.splitlines()[1:]
    text = "; type=prior\n; forced_moves=U\n" + "\n".join(lines) + "\n"
    with pytest.raises(ValueError):
        parse_map(text)


def test_apply_push(t1):
    after = apply(t1, t1.start_state, Action.UP)
    assert after == WorldState(player=(2, 2), box=(1, 2))


def test_apply_wall_blocked(t1):
    with pytest.raises(BlockedByWall):
        apply(t1, t1.start_state, Action.DOWN)


def test_apply_box_blocked(t1):
    pushed = apply(t1, t1.start_state, Action.UP)
    with pytest.raises(BoxBlocked):
        apply(t1, pushed, Action.UP)


def test_goal_cells_behave_as_floor(t1):
    # Walk the player onto goal B.
    state = run(t1, [Action.RIGHT, Action.UP, Action.UP])
    assert state.player == t1.goal_b


def test_legal_actions_start(t1):
    assert legal_actions(t1, t1.start_state) == [Action.UP, Action.LEFT, Action.RIGHT]


def test_legal_actions_match_apply(t1, corner):
    for m in (t1, corner):
        for state in _all_reachable(m):
            legal = legal_actions(m, state)
            for action in Action:
                ok = True
                try:
                    apply(m, state, action)
                except MoveError:
                    ok = False
                assert (action in legal) == ok


def test_is_goal(t1):
    on_a = WorldState(player=(2, 2), box=t1.goal_a)
    assert is_goal(t1, on_a, Goal.A)
    assert not is_goal(t1, on_a, Goal.B)
    assert not is_goal(t1, t1.start_state, Goal.A)
    assert not is_goal(t1, t1.start_state, Goal.B)


def test_print_parse_round_trip(t1, corner, lopsided):
    for m in (t1, corner, lopsided):
        assert parse_map(print_map(m)) == m


def test_round_trip_with_meta():
    lines = T1_TEXT.splitlines()[1:]
    text = "; id=rt\n; type=action\n; pair_id=p9\n; forced_moves=U\n" + "\n".join(lines) + "\n"
    m = parse_map(text)
    assert parse_map(print_map(m)) == m


def _all_reachable(m):
    from collections import deque

    seen = {m.start_state}
    queue = deque(seen)
    while queue:
        state = queue.popleft()
        for action in legal_actions(m, state):
            nxt = apply(m, state, action)
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return seen


@settings(max_examples=60)
@given(st.lists(st.sampled_from(list(Action)), max_size=12))
def test_transitions_deterministic_and_conserving(moves):
    m = parse_map(T1_TEXT)
    state = m.start_state
    for action in moves:
        try:
            once = apply(m, state, action)
            twice = apply(m, state, action)
        except MoveError:
            break
        assert once == twice
        assert once.player != once.box
        assert not m.is_wall(once.player) and not m.is_wall(once.box)
        state = once


@settings(max_examples=30)
@given(st.lists(st.sampled_from(list(Action)), max_size=10))
def test_corner_box_never_moves(moves):
    m = parse_map(CORNER_TEXT)
    state = m.start_state
    for action in moves:
        try:
            state = apply(m, state, action)
        except MoveError:
            break
    assert state.box == m.box_start
