import random

import pytest

from tsogames.program import parse_program

SKIP_LOOP = """tsogame v1
domain 0 1
vars x
process P
  init s0
  final s0
  s0 -> s0 : skip
"""

# A can only get past the fence by committing B's write; without updates she deadlocks
NEEDS_UPDATE = """tsogame v1
domain 0 1
vars x
process W
  init a0
  a0 -> a1 : w x 1
  a1 -> a2 : mf
  a2 -> a2 : skip
"""


@pytest.fixture
def rng():
    return random.Random(1234)


@pytest.fixture
def skip_loop():
    return parse_program(SKIP_LOOP)


@pytest.fixture
def needs_update():
    return parse_program(NEEDS_UPDATE)
