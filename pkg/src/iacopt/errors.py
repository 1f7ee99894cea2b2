"""Exception hierarchy shared by the parser, catalogue, problem builder and CLI."""
from __future__ import annotations


class IacOptError(Exception):
    """Base class for every error raised by this package."""


class DomlError(IacOptError):
    """Syntax or structural error in a DOML document.

    Always carries a 1-based ``line``/``column`` pair pointing into the input.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ArchiveError(IacOptError):
    """Input file could not be read or did not hold exactly one ``.doml`` entry."""


class CatalogueError(IacOptError):
    """Catalogue file missing, malformed, or violating the element schema."""


class ProblemError(IacOptError):
    """The optimization problem cannot be built or evaluated."""


class InfeasibleError(IacOptError):
    """No configuration satisfies the aggregate requirements.

    ``best`` is the minimum-violation solution found, kept for diagnosis.
    """

    def __init__(self, message: str, best=None, report=None):
        super().__init__(message)
        self.best = best
        self.report = report


class NoCandidatesError(ProblemError):
    """Matchmaking left a slot without any catalogue element."""
