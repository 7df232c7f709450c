"""Exception types shared across the package."""


class PgwError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(PgwError):
    """Malformed presentation or permutation source text."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {col})" if col is not None else ")")
        super().__init__(message + loc)


class InconsistentPresentationError(PgwError):
    """A group context was requested for a presentation that fails consistency."""


class ResourceCapError(PgwError):
    """An enumeration or search exceeded its configured cap."""


class AutomorphismError(PgwError):
    """Generator images do not extend to an automorphism."""


class DecompositionError(PgwError):
    """Coset decomposition h = m * g^i failed; the witness data is invalid."""
