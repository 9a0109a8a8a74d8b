"""Ground truth by enumeration: serial dictatorship on every agent ordering.

Everything here follows the mechanism's definition directly and shares no
code with the dynamic programs, so the two can be checked against each other.
"""

from __future__ import annotations

import itertools
import math
import random
from collections.abc import Sequence
from fractions import Fraction
from typing import Union

from rsdcalc.errors import EnumerationCapError, ProfileError
from rsdcalc.profiles import AssignmentProfile, FractionalAssignment, Lottery, VotingProfile

DEFAULT_CAP = 10

Permutation = Sequence[str]


def _check_permutation(agent_ids: Sequence[str], pi: Permutation) -> None:
    if len(pi) != len(agent_ids) or set(pi) != set(agent_ids):
        raise ProfileError(f"not a permutation of the profile's agents: {list(pi)!r}")


def prio_vote(profile: VotingProfile, pi: Permutation) -> frozenset[str]:
    """Serial dictatorship: each agent in turn keeps only its favourites among what is left."""
    _check_permutation(profile.agent_ids, pi)
    orders = dict(profile.agents)
    remaining = frozenset(profile.alternatives)
    for agent in pi:
        remaining = orders[agent].best_of(remaining)
    return remaining


def prio_assign(profile: AssignmentProfile, pi: Permutation) -> dict[str, str | None]:
    """Each agent in turn takes its best acceptable house still free, or nothing."""
    _check_permutation(profile.agent_ids, pi)
    rankings = dict(profile.agents)
    taken: set[str] = set()
    outcome: dict[str, str | None] = {}
    for agent in pi:
        choice = next((h for h in rankings[agent] if h not in taken), None)
        if choice is not None:
            taken.add(choice)
        outcome[agent] = choice
    return outcome


def _guard(n: int, cap: int) -> None:
    if n > cap:
        raise EnumerationCapError(n, cap)


class _VotingKernel:
    """Bitmask form of a voting profile for fast repeated serial dictatorship."""

    def __init__(self, profile: VotingProfile):
        self.alternatives = profile.alternatives
        index = {a: k for k, a in enumerate(self.alternatives)}
        self.full = (1 << profile.m) - 1
        self.classes = []
        for order in profile.orders:
            masks = []
            for cls in order.classes:
                mask = 0
                for a in cls:
                    mask |= 1 << index[a]
                masks.append(mask)
            self.classes.append(masks)

    def run(self, order: Sequence[int]) -> int:
        remaining = self.full
        for i in order:
            for mask in self.classes[i]:
                if mask & remaining:
                    remaining &= mask
                    break
        return remaining


def _accumulate_votes(kernel: _VotingKernel, orders, weight: Fraction) -> tuple[dict[str, Fraction], int]:
    # tallies[mask] counts how often the final set was exactly `mask`
    tallies: dict[int, int] = {}
    visited = 0
    for order in orders:
        final = kernel.run(order)
        tallies[final] = tallies.get(final, 0) + 1
        visited += 1
    totals = {a: Fraction(0) for a in kernel.alternatives}
    for mask, count in tallies.items():
        members = [a for k, a in enumerate(kernel.alternatives) if mask >> k & 1]
        share = weight * count / len(members)
        for a in members:
            totals[a] += share
    return totals, visited


def brute_force_lottery(profile: VotingProfile, cap: int = DEFAULT_CAP) -> Lottery:
    """Average the uniform lottery over each ordering's outcome, across all n! orderings."""
    _guard(profile.n, cap)
    kernel = _VotingKernel(profile)
    total = math.factorial(profile.n)
    totals, visited = _accumulate_votes(
        kernel, itertools.permutations(range(profile.n)), Fraction(1, total)
    )
    assert visited == total, (visited, total)
    return Lottery(totals)


def brute_force_matrix(profile: AssignmentProfile, cap: int = DEFAULT_CAP) -> FractionalAssignment:
    """Exact average of the serial dictatorship matching over all n! orderings."""
    _guard(profile.n, cap)
    house_index = {h: k for k, h in enumerate(profile.houses)}
    rankings = [[house_index[h] for h in r] for r in profile.rankings]
    n, m = profile.n, profile.m
    counts = [[0] * m for _ in range(n)]
    visited = 0
    for order in itertools.permutations(range(n)):
        taken = 0
        for i in order:
            for k in rankings[i]:
                if not taken >> k & 1:
                    taken |= 1 << k
                    counts[i][k] += 1
                    break
        visited += 1
    total = math.factorial(n)
    assert visited == total, (visited, total)
    rows = tuple(tuple(Fraction(c, total) for c in row) for row in counts)
    return FractionalAssignment(profile.agent_ids, profile.houses, rows)


def monte_carlo_estimate(
    profile: Union[VotingProfile, AssignmentProfile], samples: int, seed: int = 0
) -> Union[Lottery, FractionalAssignment]:
    """Empirical outcome frequencies over ``samples`` uniformly drawn orderings.

    Orderings come from a Fisher-Yates shuffle seeded with ``seed``, so the
    result is reproducible. No accuracy guarantee is implied.
    """
    if samples < 1:
        raise ValueError("samples must be at least 1")
    rng = random.Random(seed)
    order = list(range(profile.n))

    def draws():
        for _ in range(samples):
            rng.shuffle(order)
            yield order

    if isinstance(profile, VotingProfile):
        totals, _ = _accumulate_votes(_VotingKernel(profile), draws(), Fraction(1, samples))
        return Lottery(totals)

    house_index = {h: k for k, h in enumerate(profile.houses)}
    rankings = [[house_index[h] for h in r] for r in profile.rankings]
    counts = [[0] * profile.m for _ in range(profile.n)]
    for perm in draws():
        taken = 0
        for i in perm:
            for k in rankings[i]:
                if not taken >> k & 1:
                    taken |= 1 << k
                    counts[i][k] += 1
                    break
    rows = tuple(tuple(Fraction(c, samples) for c in row) for row in counts)
    return FractionalAssignment(profile.agent_ids, profile.houses, rows)
