import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from instances import example1, voting_instance, voting_profiles
from rsdcalc.errors import CapacityError, UnknownIdentifierError
from rsdcalc.oracle import brute_force_lottery
from rsdcalc.profiles import VotingProfile, WeakOrder, contract_alternative_types, parse_voting_profile
from rsdcalc.voting import (
    admissible,
    compute_signatures,
    count_lucky,
    rsd_lottery,
    rsd_lottery_with_stats,
    rsd_probability,
)


def _by_agent_signature(sigset):
    return {(sigset.C(i), sigset.D(i)): s.count for i, s in enumerate(sigset.signatures)}


def test_signatures_example1():
    sigset = compute_signatures(example1(), "b")
    assert _by_agent_signature(sigset) == {
        (frozenset("abc"), frozenset()): 1,
        (frozenset("bd"), frozenset()): 1,
        (frozenset("abd"), frozenset("c")): 1,
    }
    assert sigset.total == 3


def test_identical_preferences_give_one_signature():
    p = VotingProfile.from_orders("abc", [WeakOrder.from_lists(["a", "bc"])] * 5)
    for a in "abc":
        sigset = compute_signatures(p, a)
        assert sigset.size == 1 and sigset.signatures[0].count == 5


def test_strict_top_signature():
    p = VotingProfile.from_orders("abc", [WeakOrder.linear("bac"), WeakOrder.linear("cab")])
    sigset = compute_signatures(p, "b")
    assert (sigset.C(0), sigset.D(0)) == (frozenset("b"), frozenset())


def test_unknown_target():
    with pytest.raises(UnknownIdentifierError):
        compute_signatures(example1(), "z")


def test_admissible_example1():
    sigset = compute_signatures(example1(), "b")
    # signature order follows agents 1, 2, 3
    assert admissible(sigset.full, sigset) == 0b011
    only3 = 0b100
    assert sigset.residual_alternatives(only3) == 1 << 1  # {b}
    assert admissible(only3, sigset) == only3


def test_admissible_all_empty_d():
    p = VotingProfile.from_orders("abc", [WeakOrder.from_lists(["ab", "c"]), WeakOrder.from_lists(["ac", "b"])])
    sigset = compute_signatures(p, "a")
    for subset in range(sigset.full + 1):
        assert admissible(subset, sigset) == subset


def test_count_lucky_example1():
    sigset = compute_signatures(example1(), "b")
    table = {}
    assert count_lucky(sigset.full, sigset, table) == 3
    # hand expansion: M[S] = M[S - sig1] + M[S - sig2] = 1 + 2
    assert table[0b110] == 1 and table[0b101] == 2
    assert count_lucky(0, sigset) == 1  # empty residual problem: 0! orderings


def test_count_lucky_all_admissible_is_factorial():
    p = VotingProfile.from_orders("ab", [WeakOrder.linear("ab")] * 2 + [WeakOrder.from_lists(["ab"])] * 2)
    sigset = compute_signatures(p, "a")
    assert sigset.total == 4
    assert count_lucky(sigset.full, sigset) == 24


def test_count_lucky_no_admissible_is_zero():
    p = VotingProfile.from_orders("ab", [WeakOrder.linear("ba")] * 3)
    sigset = compute_signatures(p, "a")
    assert admissible(sigset.full, sigset) == 0
    assert count_lucky(sigset.full, sigset) == 0


def test_rsd_probability_example1():
    assert rsd_probability(example1(), "b") == Fraction(1, 2)
    assert rsd_probability(example1(), "a") == 0


def test_rsd_probability_unique_top():
    p = VotingProfile.from_orders("abc", [WeakOrder.linear("abc"), WeakOrder.linear("acb")])
    assert rsd_probability(p, "a") == 1


def test_rsd_probability_needs_simplified():
    p = VotingProfile.from_orders("abc", [WeakOrder.from_lists(["ab", "c"])])
    with pytest.raises(ValueError, match="not simplified"):
        rsd_probability(p, "a")


def test_lottery_example1():
    assert dict(rsd_lottery(example1())) == {"a": 0, "b": Fraction(1, 2), "c": Fraction(1, 2), "d": 0}


def test_lottery_single_agent_with_tie():
    p = VotingProfile.from_orders("abc", [WeakOrder.from_lists(["ab", "c"])])
    expected = {"a": Fraction(1, 2), "b": Fraction(1, 2), "c": 0}
    assert dict(brute_force_lottery(p)) == expected
    assert dict(rsd_lottery(p)) == expected


@pytest.mark.parametrize("n, k", [(1, 1), (5, 2), (9, 4), (12, 12)])
def test_lottery_strict_tops(n, k):
    orders = [WeakOrder.linear("abc")] * k + [WeakOrder.linear("bca")] * (n - k)
    lottery = rsd_lottery(VotingProfile.from_orders("abc", orders))
    assert dict(lottery) == {"a": Fraction(k, n), "b": Fraction(n - k, n), "c": 0}


def test_lottery_order_follows_input():
    p = parse_voting_profile("alternatives: d c b a\n1: a ~ b > c ~ d")
    assert list(rsd_lottery(p)) == ["d", "c", "b", "a"]


def test_signature_capacity():
    # each agent puts a different subset of the others above x0: 69 signatures for x0
    alts = [f"x{k}" for k in range(8)]
    orders = []
    for mask in range(1, 70):
        better = [a for k, a in enumerate(alts[1:]) if mask >> k & 1]
        worse = [a for a in alts[1:] if a not in better]
        orders.append(WeakOrder.from_lists([better, ["x0"], worse] if worse else [better, ["x0"]]))
    q = VotingProfile.from_orders(alts, orders)
    with pytest.raises(CapacityError) as info:
        compute_signatures(q, "x0")
    assert info.value.limit == 64


def test_oracle_equivalence_seeded():
    rng = random.Random(2024)
    for _ in range(150):
        p = voting_instance(rng, rng.randint(1, 6), rng.randint(1, 5))
        assert rsd_lottery(p) == brute_force_lottery(p)


@settings(max_examples=150, deadline=None)
@given(voting_profiles(max_agents=5, max_alternatives=4))
def test_oracle_equivalence_hypothesis(profile):
    assert rsd_lottery(profile) == brute_force_lottery(profile)


@settings(max_examples=60, deadline=None)
@given(voting_profiles(max_agents=6, max_alternatives=5), st.randoms(use_true_random=False))
def test_anonymity(profile, rnd):
    agents = list(profile.agents)
    rnd.shuffle(agents)
    assert rsd_lottery(VotingProfile(profile.alternatives, tuple(agents))) == rsd_lottery(profile)


@settings(max_examples=60, deadline=None)
@given(voting_profiles(max_agents=6, max_alternatives=5), st.randoms(use_true_random=False))
def test_neutrality(profile, rnd):
    renamed = [f"r{k}" for k in range(profile.m)]
    rnd.shuffle(renamed)
    sigma = dict(zip(profile.alternatives, renamed))
    agents = tuple(
        (i, WeakOrder(tuple(frozenset(sigma[a] for a in c) for c in o.classes))) for i, o in profile.agents
    )
    relabeled = VotingProfile(tuple(sigma[a] for a in profile.alternatives), agents)
    original = rsd_lottery(profile)
    assert dict(rsd_lottery(relabeled)) == {sigma[a]: p for a, p in original.items()}


@settings(max_examples=60, deadline=None)
@given(voting_profiles(max_agents=8, max_alternatives=5))
def test_signature_bounds_and_memo(profile):
    simplified, _ = contract_alternative_types(profile)
    distinct_orders = len(set(simplified.orders))
    for a in simplified.alternatives:
        sigset = compute_signatures(simplified, a)
        assert sigset.size <= simplified.n
        assert sigset.size <= distinct_orders
        assert sigset.size <= 3 ** simplified.m
        table = {}
        lucky = count_lucky(sigset.full, sigset, table)
        assert lucky <= math.factorial(simplified.n)
        assert len(table) <= 2 ** sigset.size
        for subset, value in table.items():
            assert value <= math.factorial(sigset.agents_in(subset))


def test_stats():
    _, stats = rsd_lottery_with_stats(example1())
    assert (stats.n, stats.m, stats.alternative_types, stats.max_signatures) == (3, 4, 4, 3)
