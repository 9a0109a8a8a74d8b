"""RSD lotteries in the voting setting via a subset DP over agent signatures.

Fix a target alternative ``a``. An agent's signature is the pair ``(C, D)`` of
alternatives it ranks level with ``a`` and strictly above ``a``. Agents with
equal signatures are interchangeable for the question "does serial
dictatorship end at ``a``?", so the permutations are counted per subset of
signatures instead of enumerated. The cost is exponential only in the number
of distinct signatures, which is bounded by the number of agents, the number
of agent types, and ``3**m``.
"""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from fractions import Fraction

from rsdcalc.errors import CapacityError, UnknownIdentifierError
from rsdcalc.profiles import (
    Lottery,
    VotingProfile,
    contract_alternative_types,
    expand_lottery_ordered,
)

MAX_SIGNATURES = 64

# subset of signatures -> number of lucky permutations of its residual problem
LuckyTable = dict[int, int]


@dataclass(frozen=True)
class Signature:
    """Agents' view of the target: ``c_mask`` ties with it, ``d_mask`` beats it.

    Masks index the alternatives of the owning :class:`SignatureSet`.
    """

    c_mask: int
    d_mask: int
    count: int


@dataclass(frozen=True)
class SignatureSet:
    target: str
    alternatives: tuple[str, ...]
    signatures: tuple[Signature, ...]

    @property
    def size(self) -> int:
        return len(self.signatures)

    @property
    def total(self) -> int:
        return sum(s.count for s in self.signatures)

    @property
    def full(self) -> int:
        """Subset key of the whole signature set."""
        return (1 << len(self.signatures)) - 1

    @property
    def all_alternatives(self) -> int:
        return (1 << len(self.alternatives)) - 1

    def names(self, mask: int) -> frozenset[str]:
        return frozenset(a for k, a in enumerate(self.alternatives) if mask >> k & 1)

    def C(self, i: int) -> frozenset[str]:
        return self.names(self.signatures[i].c_mask)

    def D(self, i: int) -> frozenset[str]:
        return self.names(self.signatures[i].d_mask)

    def members(self, subset: int) -> Iterator[int]:
        i = 0
        while subset:
            if subset & 1:
                yield i
            subset >>= 1
            i += 1

    def agents_in(self, subset: int) -> int:
        return sum(self.signatures[i].count for i in self.members(subset))

    def residual_alternatives(self, subset: int) -> int:
        """Intersection of ``C`` over the signatures outside ``subset``.

        For the full subset the intersection is empty-indexed and read as every
        alternative.
        """
        alive = self.all_alternatives
        for i in self.members(self.full & ~subset):
            alive &= self.signatures[i].c_mask
        return alive


def compute_signatures(profile: VotingProfile, target: str) -> SignatureSet:
    """Group the agents of a simplified profile by their signature towards ``target``."""
    if target not in profile.alternatives:
        raise UnknownIdentifierError(f"unknown alternative {target!r}")
    index = {a: k for k, a in enumerate(profile.alternatives)}
    counts: dict[tuple[int, int], int] = {}
    for order in profile.orders:
        level = order.rank(target)
        c_mask = d_mask = 0
        for cls_index in range(level + 1):
            mask = 0
            for alt in order.classes[cls_index]:
                mask |= 1 << index[alt]
            if cls_index < level:
                d_mask |= mask
            else:
                c_mask = mask
        key = (c_mask, d_mask)
        counts[key] = counts.get(key, 0) + 1
    if len(counts) > MAX_SIGNATURES:
        raise CapacityError("number of signatures |S|", len(counts), MAX_SIGNATURES)
    signatures = tuple(Signature(c, d, t) for (c, d), t in counts.items())
    return SignatureSet(target, profile.alternatives, signatures)


def admissible(subset: int, sigset: SignatureSet, residual: int | None = None) -> int:
    """Signatures in ``subset`` whose better-than-target set misses the residual alternatives.

    Only an agent with such a signature can move first in a permutation that
    still ends at the target. ``residual`` may be passed when the caller
    already tracks it.
    """
    if residual is None:
        residual = sigset.residual_alternatives(subset)
    result = 0
    for i in sigset.members(subset):
        if not sigset.signatures[i].d_mask & residual:
            result |= 1 << i
    return result


class _Counter:
    def __init__(self, sigset: SignatureSet, table: LuckyTable):
        self.sigset = sigset
        self.table = table
        n = sigset.total
        self.fact = [1] * (n + 1)
        for k in range(1, n + 1):
            self.fact[k] = self.fact[k - 1] * k

    def count(self, subset: int, residual: int) -> int:
        table = self.table
        if subset in table:
            return table[subset]
        sigs = self.sigset.signatures
        fact = self.fact
        phi = admissible(subset, self.sigset, residual)
        agents = self.sigset.agents_in(subset)
        if phi == subset:
            value = fact[agents]
        elif not phi:
            value = 0
        else:
            value = 0
            for i in self.sigset.members(phi):
                t = sigs[i].count
                # first agent fixed to signature i; its t-1 peers go anywhere after it
                ways = fact[t] * math.comb(agents - 1, t - 1)
                value += ways * self.count(subset & ~(1 << i), residual & sigs[i].c_mask)
        assert value <= fact[agents]
        table[subset] = value
        return value


def count_lucky(subset: int, sigset: SignatureSet, table: LuckyTable | None = None) -> int:
    """Number of permutations of the residual problem for ``subset`` that select the target."""
    if subset & ~sigset.full:
        raise ValueError("subset mentions signatures outside the set")
    counter = _Counter(sigset, {} if table is None else table)
    return counter.count(subset, sigset.residual_alternatives(subset))


def rsd_probability(profile: VotingProfile, target: str, table: LuckyTable | None = None) -> Fraction:
    """Probability that RSD selects ``target`` on a simplified profile."""
    sigset = compute_signatures(profile, target)
    everyone = sigset.all_alternatives
    for s in sigset.signatures:
        everyone &= s.c_mask
    if everyone != 1 << profile.alternatives.index(target):
        tied = sorted(sigset.names(everyone) - {target})
        raise ValueError(
            f"profile is not simplified: every agent is indifferent between {target!r} and {tied}"
        )
    table = {} if table is None else table
    lucky = count_lucky(sigset.full, sigset, table)
    assert len(table) <= 1 << sigset.size
    return Fraction(lucky, math.factorial(profile.n))


def rsd_lottery(profile: VotingProfile) -> Lottery:
    """The full RSD lottery of any voting profile.

    Alternatives that no agent distinguishes are merged first; the merged
    alternative's probability is then shared equally among its members.
    """
    simplified, mapping = contract_alternative_types(profile)
    contracted = {a: rsd_probability(simplified, a) for a in simplified.alternatives}
    return expand_lottery_ordered(contracted, mapping, profile.alternatives)


@dataclass
class VotingStats:
    """Structural sizes observed while computing a lottery (for benchmarking)."""

    n: int
    m: int
    alternative_types: int
    max_signatures: int
    memo_entries: int


def rsd_lottery_with_stats(profile: VotingProfile) -> tuple[Lottery, VotingStats]:
    simplified, mapping = contract_alternative_types(profile)
    contracted: dict[str, Fraction] = {}
    max_sigs = memo = 0
    for a in simplified.alternatives:
        table: LuckyTable = {}
        contracted[a] = rsd_probability(simplified, a, table)
        max_sigs = max(max_sigs, compute_signatures(simplified, a).size)
        memo += len(table)
    lottery = expand_lottery_ordered(contracted, mapping, profile.alternatives)
    return lottery, VotingStats(profile.n, profile.m, simplified.m, max_sigs, memo)
