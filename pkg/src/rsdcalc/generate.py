"""Seeded random instances, emitted in the profile text format."""

from __future__ import annotations

import math
import random
import string
import warnings
from functools import lru_cache

from rsdcalc.profiles import (
    AssignmentProfile,
    VotingProfile,
    WeakOrder,
    parse_assignment_profile,
    parse_voting_profile,
)


def names(m: int) -> list[str]:
    if m <= 26:
        return list(string.ascii_lowercase[:m])
    return [f"x{k}" for k in range(1, m + 1)]


@lru_cache(maxsize=None)
def weak_order_count(m: int) -> int:
    """Number of weak orders on m labelled items (ordered Bell / Fubini number)."""
    if m == 0:
        return 1
    return sum(math.comb(m, k) * weak_order_count(m - k) for k in range(1, m + 1))


def strict_list_count(m: int) -> int:
    """Number of strict rankings of any subset (including the empty one) of m houses."""
    return sum(math.perm(m, k) for k in range(m + 1))


def random_weak_order(alternatives: list[str], rng: random.Random) -> WeakOrder:
    """Shuffle, then cut between neighbours with probability 1/2."""
    order = alternatives[:]
    rng.shuffle(order)
    classes, current = [], [order[0]]
    for alt in order[1:]:
        if rng.random() < 0.5:
            classes.append(current)
            current = []
        current.append(alt)
    classes.append(current)
    return WeakOrder.from_lists(classes)


def random_strict_list(houses: list[str], rng: random.Random) -> tuple[str, ...]:
    return tuple(rng.sample(houses, rng.randint(0, len(houses))))


def _split(n: int, t: int, rng: random.Random) -> list[int]:
    sizes = [1] * t
    for _ in range(n - t):
        sizes[rng.randrange(t)] += 1
    return sizes


def _check(n: int, m: int, t: int, available: int) -> None:
    if n < 1 or m < 1 or t < 1:
        raise ValueError("agents, alternatives/houses and types must all be positive")
    if t > n:
        raise ValueError(f"cannot have {t} agent types among {n} agents")
    if t > available:
        raise ValueError(f"only {available} distinct preference orders exist over {m} items")


def _distinct(draw, t: int, rng: random.Random) -> list:
    seen: list = []
    while len(seen) < t:
        candidate = draw(rng)
        if candidate not in seen:
            seen.append(candidate)
    return seen


def voting_text(n: int, m: int, t: int, seed: int) -> str:
    _check(n, m, t, weak_order_count(m))
    rng = random.Random(seed)
    alts = names(m)
    orders = _distinct(lambda r: random_weak_order(alts, r), t, rng)
    lines = [f"# random voting profile: n={n} m={m} types={t} seed={seed}",
             "alternatives: " + " ".join(alts)]
    for k, (order, size) in enumerate(zip(orders, _split(n, t, rng)), 1):
        lines.append(f"t{k} *{size}: {order.format(alts)}")
    return "\n".join(lines) + "\n"


def assignment_text(n: int, m: int, t: int, seed: int) -> str:
    _check(n, m, t, strict_list_count(m))
    rng = random.Random(seed)
    houses = names(m)
    rankings = _distinct(lambda r: random_strict_list(houses, r), t, rng)
    lines = [f"# random assignment profile: n={n} m={m} types={t} seed={seed}",
             "houses: " + " ".join(houses)]
    for k, (ranking, size) in enumerate(zip(rankings, _split(n, t, rng)), 1):
        lines.append(f"t{k} *{size}: {' > '.join(ranking)}".rstrip())
    return "\n".join(lines) + "\n"


def random_voting_profile(n: int, m: int, t: int, seed: int) -> VotingProfile:
    return parse_voting_profile(voting_text(n, m, t, seed))


def random_assignment_profile(n: int, m: int, t: int, seed: int) -> AssignmentProfile:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return parse_assignment_profile(assignment_text(n, m, t, seed))
