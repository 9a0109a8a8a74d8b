"""RSD fractional assignments via a DP over agent-type counts and frontier houses.

State ``(s, b)``: ``s[j]`` agents of type ``j`` have not yet moved, and
``b[j]`` is type ``j``'s favourite house that is still free, stored as a rank
into that type's list. Rank ``len(list)`` plays the role of *nil* (nothing
acceptable is left). Houses some type ranks strictly above its frontier are
exactly the houses already taken, so the frontier vector alone describes which
houses are gone.

Frontiers are always normalised with :func:`closure` before a state is looked
up, so the memo holds only non-degenerate vectors. Agents whose type is at nil
never receive a house; they are factored out of the count as interleavings
rather than zeroed in the state, so every stored state has exactly as many
moved agents as taken houses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from rsdcalc.errors import UnknownIdentifierError
from rsdcalc.profiles import AssignmentProfile, FractionalAssignment, StrictList

CountVector = tuple[int, ...]
FrontierVector = tuple[int, ...]
AssignTable = dict[tuple[CountVector, FrontierVector], object]


@dataclass(frozen=True)
class AgentTypeSet:
    """Distinct rankings of a profile with their multiplicities, in first-appearance order."""

    houses: tuple[str, ...]
    rankings: tuple[StrictList, ...]
    counts: tuple[int, ...]
    agent_type: dict[str, int] = field(compare=False, repr=False)
    # ranked[j][r] is the house index at rank r of type j
    ranked: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)
    # above[j][r] is the mask of houses type j ranks strictly above rank r;
    # at r = len (nil) it is every house type j accepts
    above: tuple[tuple[int, ...], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        index = {h: k for k, h in enumerate(self.houses)}
        ranked = tuple(tuple(index[h] for h in r) for r in self.rankings)
        above = []
        for row in ranked:
            masks = [0]
            for k in row:
                masks.append(masks[-1] | 1 << k)
            above.append(tuple(masks))
        object.__setattr__(self, "ranked", ranked)
        object.__setattr__(self, "above", tuple(above))

    @property
    def T(self) -> int:
        return len(self.rankings)

    @property
    def m(self) -> int:
        return len(self.houses)

    @property
    def n(self) -> int:
        return sum(self.counts)

    def type_of(self, agent: str) -> int:
        try:
            return self.agent_type[agent]
        except KeyError:
            raise UnknownIdentifierError(f"unknown agent {agent!r}") from None

    def house_index(self, house: str) -> int:
        try:
            return self.houses.index(house)
        except ValueError:
            raise UnknownIdentifierError(f"unknown house {house!r}") from None

    def is_nil(self, j: int, rank: int) -> bool:
        return rank >= len(self.ranked[j])

    def start(self) -> FrontierVector:
        """Every type pointing at its top house (nil for empty lists)."""
        return tuple(0 for _ in self.rankings)

    def house_at(self, j: int, rank: int) -> str | None:
        return None if self.is_nil(j, rank) else self.houses[self.ranked[j][rank]]


def compute_agent_types(profile: AssignmentProfile) -> AgentTypeSet:
    """Bucket agents by identical ranking; hashing the ranking tuples plays the role of a trie."""
    position: dict[StrictList, int] = {}
    counts: list[int] = []
    agent_type: dict[str, int] = {}
    for agent, ranking in profile.agents:
        j = position.get(ranking)
        if j is None:
            j = position[ranking] = len(counts)
            counts.append(0)
        counts[j] += 1
        agent_type[agent] = j
    return AgentTypeSet(profile.houses, tuple(position), tuple(counts), agent_type)


def _dominated_mask(b: FrontierVector, types: AgentTypeSet) -> int:
    mask = 0
    for j, r in enumerate(b):
        mask |= types.above[j][r]
    return mask


def dominated(b: FrontierVector, types: AgentTypeSet) -> frozenset[str]:
    """Houses that some type ranks strictly above its frontier (or accepts at all, if nil)."""
    mask = _dominated_mask(b, types)
    return frozenset(h for k, h in enumerate(types.houses) if mask >> k & 1)


def increment(j: int, rank: int, types: AgentTypeSet) -> int:
    """Next rank on type ``j``'s list; stepping past the last house gives nil."""
    if types.is_nil(j, rank):
        raise ValueError(f"type {j} is already at nil")
    return rank + 1


def _close(b: list[int], types: AgentTypeSet) -> int:
    """Advance ``b`` in place to its closure; returns the dominated mask."""
    ranked = types.ranked
    above = types.above
    dom = 0
    for j, r in enumerate(b):
        dom |= above[j][r]
    changed = True
    while changed:
        changed = False
        for j, row in enumerate(ranked):
            r = b[j]
            while r < len(row) and dom >> row[r] & 1:
                r += 1
            if r != b[j]:
                b[j] = r
                dom |= above[j][r]
                changed = True
    return dom


def closure(b: FrontierVector, types: AgentTypeSet) -> FrontierVector:
    """Move every frontier entry that points at a taken house down its list until none does."""
    out = list(b)
    _close(out, types)
    return tuple(out)


def _factorials(n: int) -> list[int]:
    fact = [1] * (n + 1)
    for k in range(1, n + 1):
        fact[k] = fact[k - 1] * k
    return fact


class _Engine:
    """Memoised lucky-permutation counter for one target type.

    ``count`` returns, for a canonical state, the number of orderings of the
    state's *active* agents (types not at nil) that are lucky. When ``house``
    is ``None`` the value is a list with one count per house, sharing one
    memo across all target houses.
    """

    def __init__(self, types: AgentTypeSet, target_type: int, house: int | None,
                 table: AssignTable, root: tuple[CountVector, FrontierVector]):
        self.types = types
        self.j_star = target_type
        self.house = house
        self.table = table
        self.fact = _factorials(types.n)
        self.lengths = [len(r) for r in types.ranked]
        s, b = root
        # moved agents minus taken houses is constant along the recursion
        self.offset = sum(d - x for d, x in zip(types.counts, s)) - bin(_dominated_mask(b, types)).count("1")
        self.zero = 0 if house is not None else (0,) * types.m

    def active(self, s: CountVector, b: FrontierVector) -> int:
        lengths = self.lengths
        return sum(x for x, r, L in zip(s, b, lengths) if r < L)

    def _check(self, s: CountVector, dom: int) -> None:
        moved = sum(d - x for d, x in zip(self.types.counts, s))
        assert moved - bin(dom).count("1") == self.offset, (s, dom)
        if self.offset == 0:
            assert moved <= self.types.m, (s, self.types.m)

    def count(self, s: CountVector, b: FrontierVector, dom: int):
        key = (s, b)
        table = self.table
        hit = table.get(key)
        if hit is not None:
            return hit

        j_star = self.j_star
        house = self.house
        lengths = self.lengths
        if s[j_star] == 0 or b[j_star] >= lengths[j_star] or (house is not None and dom >> house & 1):
            value = self.zero
        else:
            fact = self.fact
            ranked = self.types.ranked
            live = self.active(s, b)
            value = 0 if house is not None else [0] * self.types.m
            for j, x in enumerate(s):
                if x == 0 or b[j] >= lengths[j]:
                    continue
                # the leader is one of x agents of type j, or one of x - 1 if j is the target
                # type and the leader is not the target agent itself
                weight = x - 1 if j == j_star else x
                if weight == 0:
                    continue
                child_b = list(b)
                child_b[j] += 1
                child_dom = _close(child_b, self.types)
                child_s = s[:j] + (x - 1,) + s[j + 1:]
                child_b = tuple(child_b)
                child_live = self.active(child_s, child_b)
                # agents newly at nil can sit anywhere among the remaining live - 1
                spread = weight * (fact[live - 1] // fact[child_live])
                sub = self.count(child_s, child_b, child_dom)
                if house is not None:
                    value += spread * sub
                else:
                    for k, c in enumerate(sub):
                        if c:
                            value[k] += spread * c
            leaf = ranked[j_star][b[j_star]]
            if house is None:
                value[leaf] += fact[live - 1]
                value = tuple(value)
            elif leaf == house:
                value += fact[live - 1]
        self._check(s, dom)
        table[key] = value
        return value


def count_lucky_assign(
    s: CountVector,
    b: FrontierVector,
    query: tuple[int, str],
    types: AgentTypeSet,
    table: AssignTable | None = None,
) -> int:
    """Lucky permutations of the residual problem ``(s, b)`` for target type and house ``query``.

    ``b`` need not be canonical. The memo ``table`` stores active-agent counts
    keyed by canonical states; the value returned here also counts where the
    agents at nil are placed.
    """
    j_star, house_name = query
    house = types.house_index(house_name)
    s = tuple(s)
    b_list = list(b)
    dom = _close(b_list, types)
    b = tuple(b_list)
    if s[j_star] == 0 or dom >> house & 1:
        return 0
    engine = _Engine(types, j_star, house, {} if table is None else table, (s, b))
    live = engine.active(s, b)
    lucky = engine.count(s, b, dom)
    total = sum(s)
    return lucky * (engine.fact[total] // engine.fact[live])


def _memo_bound(types: AgentTypeSet) -> int:
    m, T = types.m, types.T
    return math.comb(m + T, T) * (m + 1) ** T


def rsd_assignment_probability(profile: AssignmentProfile, agent: str, house: str) -> Fraction:
    """Probability that RSD gives ``house`` to ``agent``."""
    types = compute_agent_types(profile)
    j_star = types.type_of(agent)
    types.house_index(house)
    table: AssignTable = {}
    lucky = count_lucky_assign(types.counts, types.start(), (j_star, house), types, table)
    assert len(table) <= _memo_bound(types)
    return Fraction(lucky, math.factorial(profile.n))


@dataclass
class AssignmentStats:
    n: int
    m: int
    T: int
    memo_entries: int
    memo_bound: int
    tables: list[AssignTable] = field(default_factory=list, repr=False)


def rsd_assignment_matrix_with_stats(
    profile: AssignmentProfile, keep_tables: bool = False
) -> tuple[FractionalAssignment, AssignmentStats]:
    types = compute_agent_types(profile)
    bound = _memo_bound(types)
    root_b = list(types.start())
    dom = _close(root_b, types)
    root = (types.counts, tuple(root_b))
    type_rows: list[tuple[Fraction, ...]] = []
    stats = AssignmentStats(profile.n, profile.m, types.T, 0, bound)
    for j_star in range(types.T):
        table: AssignTable = {}
        engine = _Engine(types, j_star, None, table, root)
        counts = engine.count(*root, dom)
        live = engine.active(*root)
        denom = math.factorial(live)
        type_rows.append(tuple(Fraction(c, denom) for c in counts))
        assert len(table) <= bound, (len(table), bound)
        stats.memo_entries += len(table)
        if keep_tables:
            stats.tables.append(table)
    rows = tuple(type_rows[types.agent_type[a]] for a in profile.agent_ids)
    return FractionalAssignment(profile.agent_ids, profile.houses, rows), stats


def rsd_assignment_matrix(profile: AssignmentProfile) -> FractionalAssignment:
    """The full RSD fractional assignment, one memo table per agent type."""
    matrix, _ = rsd_assignment_matrix_with_stats(profile)
    return matrix
