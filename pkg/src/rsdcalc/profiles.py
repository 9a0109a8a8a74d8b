"""Preference profiles, outcome containers, the text format, and alternative-type contraction.

Both settings share one line-oriented text format::

    # comment
    alternatives: a b c d        (``houses:`` in the assignment setting)
    1: a ~ b ~ c > d
    voters *3: b > a ~ c ~ d

``>`` separates indifference classes (most preferred first) and ``~`` joins
alternatives inside a class. Assignment rankings use ``>`` only and may be
empty. A ``*k`` suffix on the agent identifier stands for ``k`` agents with
identical preferences; they are named ``<id>.1`` ... ``<id>.k``.
"""

from __future__ import annotations

import io
import re
import warnings
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO, Union

from rsdcalc.errors import ProfileError, ProfileSyntaxError, UnknownIdentifierError

IDENTIFIER = re.compile(r"[A-Za-z0-9_-]+\Z")
AGENT_IDENTIFIER = re.compile(r"[A-Za-z0-9_.-]+\Z")

_AGENT_LINE = re.compile(
    r"\s*(?P<id>[A-Za-z0-9_.-]+)\s*(?:\*\s*(?P<count>\d+))?\s*:(?P<body>.*)\Z"
)
_TOKEN = re.compile(r"(?P<ident>[A-Za-z0-9_-]+)|(?P<op>[>~])|(?P<bad>\S)")

Source = Union[str, TextIO]


# --------------------------------------------------------------------------
# Voting setting


@dataclass(frozen=True)
class WeakOrder:
    """A complete preorder given as indifference classes, best class first."""

    classes: tuple[frozenset[str], ...]
    _rank: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        classes = tuple(frozenset(c) for c in self.classes)
        object.__setattr__(self, "classes", classes)
        rank: dict[str, int] = {}
        for index, cls in enumerate(classes):
            if not cls:
                raise ProfileError("weak order contains an empty indifference class")
            for alt in cls:
                if alt in rank:
                    raise ProfileError(f"alternative {alt!r} appears in two indifference classes")
                rank[alt] = index
        object.__setattr__(self, "_rank", rank)

    @classmethod
    def from_lists(cls, classes: Iterable[Iterable[str]]) -> WeakOrder:
        return cls(tuple(frozenset(c) for c in classes))

    @classmethod
    def linear(cls, ranking: Iterable[str]) -> WeakOrder:
        return cls(tuple(frozenset([a]) for a in ranking))

    @property
    def alternatives(self) -> frozenset[str]:
        return frozenset(self._rank)

    @property
    def top(self) -> frozenset[str]:
        return self.classes[0]

    def rank(self, alternative: str) -> int:
        """Index of the indifference class holding ``alternative`` (0 is best)."""
        return self._rank[alternative]

    def prefers(self, a: str, b: str) -> bool:
        return self._rank[a] < self._rank[b]

    def indifferent(self, a: str, b: str) -> bool:
        return self._rank[a] == self._rank[b]

    def is_linear(self) -> bool:
        return all(len(c) == 1 for c in self.classes)

    def best_of(self, available: Iterable[str]) -> frozenset[str]:
        """The most preferred members of ``available``."""
        available = list(available)
        if not available:
            return frozenset()
        best = min(self._rank[a] for a in available)
        return frozenset(a for a in available if self._rank[a] == best)

    def format(self, order: Iterable[str] | None = None) -> str:
        key = _position_key(order)
        return " > ".join(" ~ ".join(sorted(c, key=key)) for c in self.classes)

    def __str__(self) -> str:
        return self.format()


def _position_key(order: Iterable[str] | None):
    if order is None:
        return lambda x: x
    position = {x: i for i, x in enumerate(order)}
    return lambda x: position.get(x, len(position))


def _check_agents(agents: tuple, what: str) -> None:
    if not agents:
        raise ProfileError(f"a {what} profile needs at least one agent")
    seen: set[str] = set()
    for agent, _ in agents:
        if agent in seen:
            raise ProfileError(f"duplicate agent identifier {agent!r}")
        seen.add(agent)


@dataclass(frozen=True)
class VotingProfile:
    """Agents with complete weak orders over a common set of alternatives."""

    alternatives: tuple[str, ...]
    agents: tuple[tuple[str, WeakOrder], ...]

    def __post_init__(self) -> None:
        alternatives = tuple(self.alternatives)
        agents = tuple((str(i), o) for i, o in self.agents)
        object.__setattr__(self, "alternatives", alternatives)
        object.__setattr__(self, "agents", agents)
        if not alternatives:
            raise ProfileError("a voting profile needs at least one alternative")
        if len(set(alternatives)) != len(alternatives):
            raise ProfileError("duplicate alternative identifier")
        _check_agents(agents, "voting")
        universe = frozenset(alternatives)
        for agent, order in agents:
            have = order.alternatives
            if have != universe:
                missing = [a for a in alternatives if a not in have]
                if missing:
                    raise ProfileError(
                        f"agent {agent!r}: incomplete weak order, missing {' '.join(missing)}"
                    )
                extra = sorted(have - universe)
                raise ProfileError(f"agent {agent!r}: unknown alternative(s) {' '.join(extra)}")

    @classmethod
    def from_orders(cls, alternatives: Iterable[str], orders: Iterable[WeakOrder]) -> VotingProfile:
        """Build a profile whose agents are numbered 1, 2, ... in order."""
        return cls(tuple(alternatives), tuple((str(i), o) for i, o in enumerate(orders, 1)))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.alternatives)

    @property
    def agent_ids(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.agents)

    @property
    def orders(self) -> tuple[WeakOrder, ...]:
        return tuple(o for _, o in self.agents)

    def order_of(self, agent: str) -> WeakOrder:
        for a, o in self.agents:
            if a == agent:
                return o
        raise UnknownIdentifierError(f"unknown agent {agent!r}")

    def is_simplified(self) -> bool:
        """True when every pair of alternatives is strictly separated by some agent."""
        keys = {tuple(o.rank(a) for o in self.orders) for a in self.alternatives}
        return len(keys) == self.m


# --------------------------------------------------------------------------
# Assignment setting

StrictList = tuple[str, ...]


@dataclass(frozen=True)
class AssignmentProfile:
    """Agents with strict rankings over their acceptable houses."""

    houses: tuple[str, ...]
    agents: tuple[tuple[str, StrictList], ...]

    def __post_init__(self) -> None:
        houses = tuple(self.houses)
        agents = tuple((str(i), tuple(r)) for i, r in self.agents)
        object.__setattr__(self, "houses", houses)
        object.__setattr__(self, "agents", agents)
        if not houses:
            raise ProfileError("an assignment profile needs at least one house")
        if len(set(houses)) != len(houses):
            raise ProfileError("duplicate house identifier")
        _check_agents(agents, "assignment")
        known = frozenset(houses)
        for agent, ranking in agents:
            if len(set(ranking)) != len(ranking):
                raise ProfileError(f"agent {agent!r}: duplicate house in ranking")
            for h in ranking:
                if h not in known:
                    raise ProfileError(f"agent {agent!r}: unknown house {h!r}")

    @classmethod
    def from_rankings(cls, houses: Iterable[str], rankings: Iterable[Iterable[str]]) -> AssignmentProfile:
        return cls(tuple(houses), tuple((str(i), tuple(r)) for i, r in enumerate(rankings, 1)))

    @property
    def n(self) -> int:
        return len(self.agents)

    @property
    def m(self) -> int:
        return len(self.houses)

    @property
    def agent_ids(self) -> tuple[str, ...]:
        return tuple(a for a, _ in self.agents)

    @property
    def rankings(self) -> tuple[StrictList, ...]:
        return tuple(r for _, r in self.agents)

    def ranking_of(self, agent: str) -> StrictList:
        for a, r in self.agents:
            if a == agent:
                return r
        raise UnknownIdentifierError(f"unknown agent {agent!r}")


# --------------------------------------------------------------------------
# Outcomes


class Lottery(Mapping):
    """Probability distribution over alternatives with exact rational weights.

    Iteration follows insertion order, which producers keep equal to the
    profile's alternative order.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[str, Fraction] | Iterable[tuple[str, Fraction]]):
        items = entries.items() if isinstance(entries, Mapping) else entries
        data = {str(k): Fraction(v) for k, v in items}
        for k, p in data.items():
            if not 0 <= p <= 1:
                raise ValueError(f"probability of {k!r} is outside [0, 1]: {p}")
        if sum(data.values()) != 1:
            raise ValueError(f"lottery sums to {sum(data.values())}, not 1")
        self._entries = data

    def __getitem__(self, key: str) -> Fraction:
        return self._entries[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self) -> str:
        body = ", ".join(f"{k}: {v}" for k, v in self._entries.items())
        return f"Lottery([{body}])"

    def support(self) -> list[str]:
        return [k for k, v in self._entries.items() if v]


@dataclass(frozen=True)
class FractionalAssignment:
    """Agent by house matrix of assignment probabilities.

    ``rows[i][k]`` is the probability that ``agents[i]`` receives ``houses[k]``.
    """

    agents: tuple[str, ...]
    houses: tuple[str, ...]
    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(tuple(Fraction(x) for x in row) for row in self.rows)
        object.__setattr__(self, "agents", tuple(self.agents))
        object.__setattr__(self, "houses", tuple(self.houses))
        object.__setattr__(self, "rows", rows)
        if len(rows) != len(self.agents) or any(len(r) != len(self.houses) for r in rows):
            raise ValueError("matrix shape does not match agents x houses")
        for agent, row in zip(self.agents, rows):
            if any(not 0 <= x <= 1 for x in row):
                raise ValueError(f"row of agent {agent!r} has an entry outside [0, 1]")
            if sum(row) > 1:
                raise ValueError(f"row of agent {agent!r} sums to more than 1")
        for k, house in enumerate(self.houses):
            if sum(row[k] for row in rows) > 1:
                raise ValueError(f"column of house {house!r} sums to more than 1")

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        agent, house = key
        try:
            return self.rows[self.agents.index(agent)][self.houses.index(house)]
        except ValueError:
            raise UnknownIdentifierError(f"unknown agent/house pair {key!r}") from None

    def row(self, agent: str) -> tuple[Fraction, ...]:
        try:
            return self.rows[self.agents.index(agent)]
        except ValueError:
            raise UnknownIdentifierError(f"unknown agent {agent!r}") from None

    def row_sums(self) -> list[Fraction]:
        return [sum(r, Fraction(0)) for r in self.rows]

    def column_sums(self) -> list[Fraction]:
        return [sum((r[k] for r in self.rows), Fraction(0)) for k in range(len(self.houses))]


# --------------------------------------------------------------------------
# Alternative-type contraction


@dataclass(frozen=True)
class TypeContractionMap:
    """Super-alternatives and the original alternatives each one stands for."""

    super_alternatives: tuple[tuple[str, frozenset[str]], ...]

    def members(self, super_id: str) -> frozenset[str]:
        for sid, group in self.super_alternatives:
            if sid == super_id:
                return group
        raise UnknownIdentifierError(f"unknown super-alternative {super_id!r}")

    def is_identity(self) -> bool:
        return all(len(g) == 1 for _, g in self.super_alternatives)


def contract_alternative_types(profile: VotingProfile) -> tuple[VotingProfile, TypeContractionMap]:
    """Merge alternatives that every agent is indifferent between.

    Two alternatives have the same type exactly when their vectors of class
    indices across all agents coincide, so grouping by that vector is a single
    hashing pass over the profile. Singleton groups keep their identifier;
    larger groups are named by joining members with ``~``.
    """
    orders = profile.orders
    groups: dict[tuple[int, ...], list[str]] = {}
    for alt in profile.alternatives:
        groups.setdefault(tuple(o.rank(alt) for o in orders), []).append(alt)

    supers: list[tuple[str, frozenset[str]]] = []
    rename: dict[str, str] = {}
    for members in groups.values():
        sid = "~".join(members)
        supers.append((sid, frozenset(members)))
        for alt in members:
            rename[alt] = sid

    agents = []
    for agent, order in profile.agents:
        classes = []
        for cls in order.classes:
            classes.append(frozenset(rename[a] for a in cls))
        agents.append((agent, WeakOrder(tuple(classes))))
    contracted = VotingProfile(tuple(sid for sid, _ in supers), tuple(agents))
    return contracted, TypeContractionMap(tuple(supers))


def expand_lottery(lottery: Mapping[str, Fraction], mapping: TypeContractionMap) -> Lottery:
    """Split each super-alternative's probability evenly among its members."""
    known = {sid for sid, _ in mapping.super_alternatives}
    for sid in lottery:
        if sid not in known:
            raise UnknownIdentifierError(f"unknown super-alternative {sid!r}")
    # original first-appearance order: members of each group were listed in profile order
    out: dict[str, Fraction] = {}
    for sid, group in mapping.super_alternatives:
        share = Fraction(lottery.get(sid, 0)) / len(group)
        for alt in group:
            out[alt] = share
    return Lottery(out)


def expand_lottery_ordered(
    lottery: Mapping[str, Fraction], mapping: TypeContractionMap, order: Iterable[str]
) -> Lottery:
    """:func:`expand_lottery`, with entries listed in ``order``."""
    flat = expand_lottery(lottery, mapping)
    return Lottery((alt, flat[alt]) for alt in order)


# --------------------------------------------------------------------------
# Text format


def _read(source: Source) -> str:
    if isinstance(source, str):
        return source
    return source.read()


def _strip_comment(line: str) -> str:
    cut = line.find("#")
    return line if cut < 0 else line[:cut]


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(io.StringIO(text), 1):
        line = _strip_comment(raw.rstrip("\r\n"))
        if line.strip():
            yield lineno, line


def _parse_header(lineno: int, line: str, keyword: str) -> tuple[str, ...]:
    stripped = line.lstrip()
    if not stripped.startswith(keyword + ":"):
        col = len(line) - len(stripped) + 1
        raise ProfileSyntaxError(f"expected '{keyword}:' header", lineno, col)
    offset = len(line) - len(stripped) + len(keyword) + 1
    idents: list[str] = []
    for match in re.finditer(r"\S+", line[offset:]):
        token = match.group()
        col = offset + match.start() + 1
        if not IDENTIFIER.match(token):
            raise ProfileSyntaxError(f"invalid identifier {token!r}", lineno, col)
        if token in idents:
            raise ProfileError(f"duplicate {keyword[:-1] if keyword.endswith('s') else keyword} {token!r}", lineno, col)
        idents.append(token)
    if not idents:
        raise ProfileSyntaxError(f"'{keyword}:' header lists nothing", lineno, len(line) + 1)
    return tuple(idents)


def _tokenize_body(lineno: int, line: str, offset: int, body: str) -> list[list[tuple[str, int]]]:
    """Split an agent line body into classes of (identifier, column) pairs."""
    classes: list[list[tuple[str, int]]] = []
    current: list[tuple[str, int]] = []
    expect_ident = True
    last_col = offset + 1
    for match in _TOKEN.finditer(body):
        col = offset + match.start() + 1
        last_col = col
        if match.group("bad") is not None:
            raise ProfileSyntaxError(f"unexpected character {match.group()!r}", lineno, col)
        if match.group("ident") is not None:
            if not expect_ident:
                raise ProfileSyntaxError("expected '>' or '~' between identifiers", lineno, col)
            current.append((match.group(), col))
            expect_ident = False
            continue
        if expect_ident:
            raise ProfileSyntaxError(f"expected an identifier before {match.group()!r}", lineno, col)
        if match.group() == ">":
            classes.append(current)
            current = []
        expect_ident = True
    if current:
        classes.append(current)
    elif classes or not expect_ident:
        raise ProfileSyntaxError("ranking ends with an operator", lineno, last_col)
    return classes


def _agent_lines(lines: Iterator[tuple[int, str]]):
    for lineno, line in lines:
        match = _AGENT_LINE.match(line)
        if not match:
            col = len(line) - len(line.lstrip()) + 1
            raise ProfileSyntaxError("expected '<agent-id>[ *<count>]: <ranking>'", lineno, col)
        count = 1
        if match.group("count") is not None:
            count = int(match.group("count"))
            if count < 1:
                raise ProfileSyntaxError("multiplicity must be at least 1", lineno, match.start("count") + 1)
        yield lineno, line, match, count


def _expand_ids(agent: str, count: int, explicit: bool) -> list[str]:
    if not explicit:
        return [agent]
    return [f"{agent}.{k}" for k in range(1, count + 1)]


def _register(seen: set[str], ident: str, lineno: int) -> None:
    if ident in seen:
        raise ProfileError(f"duplicate agent identifier {ident!r}", lineno, 1)
    seen.add(ident)


def parse_voting_profile(source: Source) -> VotingProfile:
    """Parse the voting profile text format into a validated :class:`VotingProfile`."""
    lines = _content_lines(_read(source))
    first = next(lines, None)
    if first is None:
        raise ProfileSyntaxError("empty input: expected 'alternatives:' header", 1, 1)
    alternatives = _parse_header(*first, "alternatives")
    known = set(alternatives)

    agents: list[tuple[str, WeakOrder]] = []
    seen: set[str] = set()
    for lineno, line, match, count in _agent_lines(lines):
        offset = match.start("body")
        classes = _tokenize_body(lineno, line, offset, match.group("body"))
        placed: set[str] = set()
        for cls in classes:
            for ident, col in cls:
                if ident not in known:
                    raise ProfileError(f"unknown alternative {ident!r}", lineno, col)
                if ident in placed:
                    raise ProfileError(f"duplicate alternative {ident!r}", lineno, col)
                placed.add(ident)
        missing = [a for a in alternatives if a not in placed]
        if missing:
            raise ProfileError(
                f"agent {match.group('id')!r}: incomplete weak order, missing {' '.join(missing)}",
                lineno,
                len(line) + 1,
            )
        order = WeakOrder(tuple(frozenset(i for i, _ in cls) for cls in classes))
        for ident in _expand_ids(match.group("id"), count, match.group("count") is not None):
            _register(seen, ident, lineno)
            agents.append((ident, order))
    if not agents:
        raise ProfileError("profile lists no agents")
    return VotingProfile(alternatives, tuple(agents))


def parse_assignment_profile(source: Source) -> AssignmentProfile:
    """Parse the assignment profile text format into a validated :class:`AssignmentProfile`."""
    lines = _content_lines(_read(source))
    first = next(lines, None)
    if first is None:
        raise ProfileSyntaxError("empty input: expected 'houses:' header", 1, 1)
    houses = _parse_header(*first, "houses")
    known = set(houses)

    agents: list[tuple[str, StrictList]] = []
    seen: set[str] = set()
    for lineno, line, match, count in _agent_lines(lines):
        offset = match.start("body")
        classes = _tokenize_body(lineno, line, offset, match.group("body"))
        ranking: list[str] = []
        for cls in classes:
            if len(cls) > 1:
                raise ProfileSyntaxError("ties ('~') are not allowed in house rankings", lineno, cls[1][1] - 1)
            ident, col = cls[0]
            if ident not in known:
                raise ProfileError(f"unknown house {ident!r}", lineno, col)
            if ident in ranking:
                raise ProfileError(f"duplicate house {ident!r}", lineno, col)
            ranking.append(ident)
        for ident in _expand_ids(match.group("id"), count, match.group("count") is not None):
            _register(seen, ident, lineno)
            agents.append((ident, tuple(ranking)))
    if not agents:
        raise ProfileError("profile lists no agents")
    profile = AssignmentProfile(houses, tuple(agents))
    if profile.m > profile.n:
        warnings.warn(
            f"{profile.m} houses for {profile.n} agents: more houses than agents",
            stacklevel=2,
        )
    return profile


def serialize_voting_profile(profile: VotingProfile) -> str:
    out = ["alternatives: " + " ".join(profile.alternatives)]
    for agent, order in profile.agents:
        out.append(f"{agent}: {order.format(profile.alternatives)}")
    return "\n".join(out) + "\n"


def serialize_assignment_profile(profile: AssignmentProfile) -> str:
    out = ["houses: " + " ".join(profile.houses)]
    for agent, ranking in profile.agents:
        out.append(f"{agent}: {' > '.join(ranking)}".rstrip())
    return "\n".join(out) + "\n"
