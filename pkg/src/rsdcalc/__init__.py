"""Exact random serial dictatorship probabilities for voting and house allocation."""

from rsdcalc.assignment import (
    compute_agent_types,
    rsd_assignment_matrix,
    rsd_assignment_probability,
)
from rsdcalc.errors import (
    CapacityError,
    EnumerationCapError,
    ProfileError,
    ProfileSyntaxError,
    RSDError,
    UnknownIdentifierError,
)
from rsdcalc.oracle import brute_force_lottery, brute_force_matrix, monte_carlo_estimate
from rsdcalc.profiles import (
    AssignmentProfile,
    FractionalAssignment,
    Lottery,
    VotingProfile,
    WeakOrder,
    contract_alternative_types,
    expand_lottery,
    parse_assignment_profile,
    parse_voting_profile,
)
from rsdcalc.voting import rsd_lottery, rsd_probability

__version__ = "0.1.0"
