import random

import pytest
from hypothesis import strategies as st

from bnctl import Universe, admissible_space, compute_attractors, parse_network
from bnctl.oracle import encode, random_network

EXAMPLE = """targets, factors
x1, x2
x2, x1
x3, x2 & x3
"""


@pytest.fixture
def example():
    return parse_network(EXAMPLE)


@pytest.fixture
def example_path(tmp_path):
    path = tmp_path / "example.bnet"
    path.write_text(EXAMPLE)
    return path


def analyse(bn):
    universe = Universe(bn.n)
    adm = admissible_space(bn, universe)
    return universe, adm, compute_attractors(bn, adm)


def codes(states):
    return sorted(encode(s) for s in states)


def bits(pattern):
    return tuple(int(ch) for ch in pattern)


@st.composite
def networks(draw, min_n=1, max_n=8):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_network(n, random.Random(seed))
