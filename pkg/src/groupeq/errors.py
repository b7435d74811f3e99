"""Exception hierarchy shared by every module."""


class GroupEqError(Exception):
    """Base class for all errors raised by groupeq."""


class AlphabetError(GroupEqError):
    """A word mentions a symbol outside the declared alphabet."""


class ParseError(GroupEqError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ResourceLimitError(GroupEqError):
    """A configured size cap, such as the ball size, was exceeded."""


class ContradictionError(GroupEqError):
    """A system is contradictory on its face, e.g. an inequation that is freely trivial."""


class PreconditionError(GroupEqError):
    """An operation was called outside its contract."""


class UndecidedError(GroupEqError):
    """A decision procedure that must be exact returned 'undecided'."""


class CertificateError(GroupEqError):
    """Certificate re-verification failed; ``clause`` names the failing check."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        self.detail = detail
        super().__init__(f"{clause}: {detail}" if detail else clause)


class UnboundVariableError(GroupEqError):
    """A term mentions a variable the assignment does not cover."""
