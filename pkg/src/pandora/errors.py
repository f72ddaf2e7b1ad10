"""Exception hierarchy for the library."""


class PandoraError(Exception):
    """Base class for every error raised deliberately by this package."""


class DomainError(PandoraError, ValueError):
    """An argument violated a documented precondition (bad table, bad set, ...)."""


class CapabilityError(PandoraError):
    """A well-formed request that exceeds an exact-enumeration size bound.

    These bounds exist because every solver here is exhaustive on purpose;
    raising beats silently running for hours.  See `pandora.limits`.
    """


class ParseError(PandoraError, ValueError):
    """Malformed serialized input.  Carries line/column diagnostics when known."""

    def __init__(self, msg: str, line: int | None = None, column: int | None = None):
        super().__init__(msg)
        self.line = line
        self.column = column
