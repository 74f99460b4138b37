import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from goalrec.grid import parse_map

T1_TEXT = """\
; id=t1
#####
#A.B#
#.$.#
#.@.#
#####
"""

CORNER_TEXT = """\
; id=corner
#####
#$.B#
#.A.#
#..@#
#####
"""

# opt(A) = 6; goal B unsolvable: every push lane into B is blocked.
LOPSIDED_TEXT = """\
; id=lopsided
#######
####.B#
#.....#
#A.$.##
#@....#
#######
"""


@pytest.fixture
def t1():
    return parse_map(T1_TEXT)


@pytest.fixture
def corner():
    return parse_map(CORNER_TEXT)


@pytest.fixture
def lopsided():
    return parse_map(LOPSIDED_TEXT)
