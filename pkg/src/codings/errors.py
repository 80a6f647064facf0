"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes, so library code raises the most specific
class that applies.
"""


class CodingError(Exception):
    """Base class for library errors."""


class PreconditionError(CodingError, ValueError):
    """An input violates an operation's stated precondition."""


class NoSuccessorError(PreconditionError):
    """Raised by word_successor / word_predecessor at the ends of the order."""


class BudgetExhausted(CodingError, RuntimeError):
    """A bounded search ran out of steps before reaching its goal."""

    def __init__(self, message, last_attempt=None):
        super().__init__(message)
        self.last_attempt = last_attempt


class VerificationError(CodingError, RuntimeError):
    """A computed object failed its own certificate check."""
