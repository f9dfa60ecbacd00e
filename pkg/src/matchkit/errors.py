"""Exception hierarchy shared by every matchkit module."""


class MatchkitError(Exception):
    """Base class for all errors raised by matchkit."""


class InputError(MatchkitError, ValueError):
    """Malformed instance, matching, rotation or file."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ContractViolation(MatchkitError, ValueError):
    """A documented precondition of an operation does not hold."""


class InternalInvariantError(MatchkitError, AssertionError):
    """An invariant that should hold by construction was violated."""


class NoStableMatching(MatchkitError):
    """The roommate instance admits no stable matching."""


class NoSpMatching(NoStableMatching):
    """The doubled instance admits no same-position stable matching."""


class MultipleProhibitedPairs(MatchkitError):
    """The half POSET carries two or more prohibited pairs (unsupported)."""

    def __init__(self, count: int):
        self.count = count
        super().__init__(f"{count} prohibited pairs; only 0 or 1 are supported")


class OracleBoundExceeded(MatchkitError):
    """Brute-force enumeration refused because the instance is too large."""
