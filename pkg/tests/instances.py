"""Seeded instance builders and hypothesis strategies shared by the tests."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from rsdcalc.generate import names, random_strict_list, random_weak_order
from rsdcalc.profiles import (
    AssignmentProfile,
    VotingProfile,
    WeakOrder,
    parse_assignment_profile,
    parse_voting_profile,
)

EXAMPLE1 = """\
alternatives: a b c d
1: a ~ b ~ c > d
2: b ~ d > a > c
3: c > a ~ b ~ d
"""

EXAMPLE2 = """\
houses: a b c
1: a > b > c
2: a > b > c
3: b > a > c
"""


def example1() -> VotingProfile:
    return parse_voting_profile(EXAMPLE1)


def example2() -> AssignmentProfile:
    return parse_assignment_profile(EXAMPLE2)


def voting_instance(rng: random.Random, n: int, m: int) -> VotingProfile:
    """n agents drawn from a random number of weak-order types (ties allowed)."""
    alts = names(m)
    pool = [random_weak_order(alts, rng) for _ in range(rng.randint(1, n))]
    orders = [rng.choice(pool) for _ in range(n)]
    return VotingProfile.from_orders(alts, orders)


def assignment_instance(rng: random.Random, n: int, m: int) -> AssignmentProfile:
    """n agents drawn from a random pool of partial strict rankings (possibly empty)."""
    houses = names(m)
    pool = [random_strict_list(houses, rng) for _ in range(rng.randint(1, n))]
    return AssignmentProfile.from_rankings(houses, [rng.choice(pool) for _ in range(n)])


def grid_cases(count: int, seed: int, n_max: int = 7, m_max: int = 5):
    """``count`` (rng, n, m) triples cycling over the whole n x m grid."""
    rng = random.Random(seed)
    shapes = [(n, m) for n in range(1, n_max + 1) for m in range(1, m_max + 1)]
    for k in range(count):
        n, m = shapes[k % len(shapes)]
        yield rng, n, m


@st.composite
def weak_orders(draw, alternatives: list[str]) -> WeakOrder:
    perm = draw(st.permutations(alternatives))
    cuts = draw(st.lists(st.booleans(), min_size=len(perm) - 1, max_size=len(perm) - 1))
    classes, current = [], [perm[0]]
    for alt, cut in zip(perm[1:], cuts):
        if cut:
            classes.append(current)
            current = []
        current.append(alt)
    classes.append(current)
    return WeakOrder.from_lists(classes)


@st.composite
def voting_profiles(draw, max_agents: int = 5, max_alternatives: int = 4) -> VotingProfile:
    m = draw(st.integers(1, max_alternatives))
    alts = names(m)
    n = draw(st.integers(1, max_agents))
    orders = draw(st.lists(weak_orders(alts), min_size=n, max_size=n))
    return VotingProfile.from_orders(alts, orders)


@st.composite
def assignment_profiles(draw, max_agents: int = 5, max_houses: int = 4) -> AssignmentProfile:
    m = draw(st.integers(1, max_houses))
    houses = names(m)
    n = draw(st.integers(1, max_agents))
    ranking = st.permutations(houses).flatmap(
        lambda p: st.integers(0, len(p)).map(lambda k: tuple(p[:k]))
    )
    rankings = draw(st.lists(ranking, min_size=n, max_size=n))
    return AssignmentProfile.from_rankings(houses, rankings)
