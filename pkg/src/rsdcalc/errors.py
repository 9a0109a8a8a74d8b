"""Exception hierarchy shared by the library and the command line."""

from __future__ import annotations


class RSDError(Exception):
    """Base class for every error raised by :mod:`rsdcalc`."""


class ProfileError(RSDError, ValueError):
    """An input profile is malformed or violates a profile invariant."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" if column is None else f"line {line}, column {column}"
            message = f"{where}: {message}"
        super().__init__(message)


class ProfileSyntaxError(ProfileError):
    """The profile text does not follow the line grammar."""


class UnknownIdentifierError(RSDError, KeyError):
    """A query names an agent, alternative or house that is not in the profile."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown identifier"


class CapacityError(RSDError):
    """The instance exceeds what the dynamic program can represent.

    ``parameter`` names the structural parameter that overflowed, ``value`` its
    size on this instance, and ``limit`` the largest supported value.
    """

    def __init__(self, parameter: str, value: int, limit: int):
        self.parameter = parameter
        self.value = value
        self.limit = limit
        super().__init__(f"{parameter} = {value} exceeds the supported maximum of {limit}")


class EnumerationCapError(RSDError):
    """Brute-force enumeration was refused because n exceeds the configured cap."""

    def __init__(self, n: int, cap: int):
        self.n = n
        self.cap = cap
        super().__init__(
            f"brute force over {n}! permutations refused (cap is n <= {cap}); "
            "use the dynamic program or the Monte Carlo sampler"
        )
