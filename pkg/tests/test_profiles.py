from fractions import Fraction

import pytest
from hypothesis import given, settings

from instances import EXAMPLE1, EXAMPLE2, voting_profiles, assignment_profiles
from rsdcalc.errors import ProfileError, ProfileSyntaxError, UnknownIdentifierError
from rsdcalc.profiles import (
    FractionalAssignment,
    Lottery,
    TypeContractionMap,
    VotingProfile,
    WeakOrder,
    contract_alternative_types,
    expand_lottery,
    parse_assignment_profile,
    parse_voting_profile,
    serialize_assignment_profile,
    serialize_voting_profile,
)


def test_parse_example1():
    p = parse_voting_profile(EXAMPLE1)
    assert p.alternatives == ("a", "b", "c", "d")
    assert p.agent_ids == ("1", "2", "3")
    assert p.order_of("1").classes == (frozenset("abc"), frozenset("d"))
    assert p.order_of("2").classes == (frozenset("bd"), frozenset("a"), frozenset("c"))
    assert p.order_of("3").classes == (frozenset("c"), frozenset("abd"))


def test_parse_single():
    p = parse_voting_profile("alternatives: x\n1: x")
    assert (p.n, p.m) == (1, 1)


def test_parse_multiplicity():
    p = parse_voting_profile("alternatives: a b\nt *3: a > b")
    assert p.n == 3
    assert all(o == WeakOrder.linear("ab") for o in p.orders)
    assert p.agent_ids == ("t.1", "t.2", "t.3")


def test_comments_and_blank_lines():
    text = "# header comment\n\nalternatives: a b   # two\n\n1: b > a  # agent one\n"
    p = parse_voting_profile(text)
    assert p.order_of("1") == WeakOrder.linear("ba")


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("alternatives: a b\n1: a > > b", 2, 8),
        ("alternatives: a b\n1: a b", 2, 6),
        ("alternatives: a b\n1: a $ b", 2, 6),
        ("alternatives: a b\n1 a > b", 2, 1),
        ("1: a > b", 1, 1),
        ("alternatives: a b\nt *0: a > b", 2, 4),
    ],
)
def test_syntax_errors_report_position(text, line, column):
    with pytest.raises(ProfileSyntaxError) as info:
        parse_voting_profile(text)
    assert (info.value.line, info.value.column) == (line, column)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("alternatives: a b c\n1: a > b", "incomplete"),
        ("alternatives: a b\n1: a > a ~ b", "duplicate alternative"),
        ("alternatives: a b\n1: a > b\n1: b > a", "duplicate agent"),
        ("alternatives: a b\nx *2: a > b\nx.1: b > a", "duplicate agent"),
        ("alternatives: a b\n1: a > z ~ b", "unknown alternative"),
        ("alternatives: a a\n1: a", "duplicate alternative"),
        ("alternatives: a b\n", "no agents"),
    ],
)
def test_voting_validation_errors(text, fragment):
    with pytest.raises(ProfileError, match=fragment):
        parse_voting_profile(text)


def test_parse_example2():
    p = parse_assignment_profile(EXAMPLE2)
    assert p.houses == ("a", "b", "c")
    assert p.rankings == (("a", "b", "c"), ("a", "b", "c"), ("b", "a", "c"))


def test_parse_empty_ranking():
    p = parse_assignment_profile("houses: a\n1:")
    assert p.agents == (("1", ()),)


def test_parse_partial_ranking():
    with pytest.warns(UserWarning, match="more houses than agents"):
        p = parse_assignment_profile("houses: a b\n1: b")
    assert p.ranking_of("1") == ("b",)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("houses: a b\n1: a > a\n2: b", "duplicate house"),
        ("houses: a b\n1: a > z\n2: b", "unknown house"),
        ("houses: a b\n1: a\n1: b", "duplicate agent"),
        ("houses: a b\n1: a ~ b\n2: b", "ties"),
    ],
)
def test_assignment_validation_errors(text, fragment):
    with pytest.raises(ProfileError, match=fragment):
        parse_assignment_profile(text)


def test_stream_input():
    import io

    assert parse_voting_profile(io.StringIO(EXAMPLE1)) == parse_voting_profile(EXAMPLE1)


@settings(max_examples=80, deadline=None)
@given(voting_profiles())
def test_voting_round_trip(profile):
    assert parse_voting_profile(serialize_voting_profile(profile)) == profile
    for order in profile.orders:
        covered = [a for cls in order.classes for a in cls]
        assert sorted(covered) == sorted(profile.alternatives)


@settings(max_examples=80, deadline=None)
@given(assignment_profiles())
def test_assignment_round_trip(profile):
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert parse_assignment_profile(serialize_assignment_profile(profile)) == profile


def test_weak_order_invariants():
    with pytest.raises(ProfileError):
        WeakOrder.from_lists([["a"], []])
    with pytest.raises(ProfileError):
        WeakOrder.from_lists([["a", "b"], ["b"]])
    with pytest.raises(ProfileError, match="incomplete"):
        VotingProfile.from_orders("abc", [WeakOrder.linear("ab")])


def test_contract_example1_is_identity():
    p = parse_voting_profile(EXAMPLE1)
    q, mapping = contract_alternative_types(p)
    assert q == p
    assert mapping.is_identity()


def test_contract_all_indifferent():
    p = parse_voting_profile("alternatives: a b c\n1: a ~ b ~ c\n2: c ~ b ~ a")
    q, mapping = contract_alternative_types(p)
    assert q.m == 1
    assert mapping.super_alternatives == (("a~b~c", frozenset("abc")),)


def test_contract_partial():
    p = parse_voting_profile("alternatives: a b c\n1: a ~ b > c\n2: a ~ b > c")
    q, mapping = contract_alternative_types(p)
    assert mapping.super_alternatives == (("a~b", frozenset("ab")), ("c", frozenset("c")))
    assert q.alternatives == ("a~b", "c")
    assert all(o.classes == (frozenset({"a~b"}), frozenset({"c"})) for o in q.orders)


@settings(max_examples=100, deadline=None)
@given(voting_profiles(max_agents=4, max_alternatives=5))
def test_contraction_is_simplified(profile):
    q, mapping = contract_alternative_types(profile)
    assert q.is_simplified()
    groups = [g for _, g in mapping.super_alternatives]
    assert sorted(a for g in groups for a in g) == sorted(profile.alternatives)
    for g in groups:
        for x in g:
            for y in g:
                assert all(o.indifferent(x, y) for o in profile.orders)


def test_expand_uniform_split():
    mapping = TypeContractionMap((("a~b", frozenset("ab")),))
    assert dict(expand_lottery({"a~b": Fraction(1)}, mapping)) == {"a": Fraction(1, 2), "b": Fraction(1, 2)}


def test_expand_identity():
    mapping = TypeContractionMap(tuple((x, frozenset(x)) for x in "abc"))
    out = expand_lottery({"b": Fraction(1, 2), "c": Fraction(1, 2)}, mapping)
    assert dict(out) == {"a": 0, "b": Fraction(1, 2), "c": Fraction(1, 2)}


def test_expand_three_way():
    mapping = TypeContractionMap((("a~b~c", frozenset("abc")), ("d", frozenset("d"))))
    out = expand_lottery({"a~b~c": Fraction(3, 4), "d": Fraction(1, 4)}, mapping)
    assert dict(out) == {x: Fraction(1, 4) for x in "abcd"}


def test_expand_unknown_super():
    mapping = TypeContractionMap((("a", frozenset("a")),))
    with pytest.raises(UnknownIdentifierError):
        expand_lottery({"zz": Fraction(1)}, mapping)


def test_lottery_must_sum_to_one():
    with pytest.raises(ValueError):
        Lottery({"a": Fraction(1, 2)})
    assert Lottery({"a": Fraction(2, 4), "b": Fraction(1, 2)})["a"].denominator == 2


def test_fractional_assignment_bounds():
    with pytest.raises(ValueError):
        FractionalAssignment(("1", "2"), ("a",), ((Fraction(2, 3),), (Fraction(2, 3),)))
    fa = FractionalAssignment(("1",), ("a", "b"), ((Fraction(1, 2), Fraction(1, 2)),))
    assert fa["1", "b"] == Fraction(1, 2)
    with pytest.raises(UnknownIdentifierError):
        fa["2", "a"]
