"""Exception hierarchy shared by every matchkit module.

The CLI maps these onto process exit codes: InvariantError -> 2,
CertificateError -> 3, InputError (and subclasses) -> 4.
"""


class MatchkitError(Exception):
    """Base class for all matchkit errors."""


class InvariantError(MatchkitError):
    """A structural invariant of a matching state or algorithm was violated."""


class CertificateError(MatchkitError):
    """A dual certificate could not be constructed or failed verification."""


class InputError(MatchkitError):
    """Invalid instance data, flags, or parameters."""


class InstanceFormatError(InputError):
    """Malformed instance file.  Carries the 1-based offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class FlagViolation(InputError):
    """An arrival sequence does not satisfy a structural flag it declares."""


class CyclicGraphError(InputError):
    """A graph that must be acyclic contains a cycle."""


class OracleCapError(InputError):
    """Instance exceeds the exact oracle's size cap."""
