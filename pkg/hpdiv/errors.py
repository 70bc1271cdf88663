"""
Error types for the hpdiv package

Every failure the library reports on purpose is an HPDivError. The subclasses
also inherit from the matching builtin (ValueError, RuntimeError, ...) so
callers that only know the builtins still catch them.

The command-line front end maps them onto exit codes:
- 1 for data and input problems
- 2 for usage problems (argparse handles these itself)
- 3 for InvariantViolation
"""


class HPDivError(Exception):
    """Base class for all errors raised by hpdiv"""


class InvalidInputError(HPDivError, ValueError):
    """Input violates an operation's precondition (non-finite point, bad index, ...)"""


class SizeLimitError(InvalidInputError):
    """Input is too large for an exhaustive routine"""


class DomainError(HPDivError, ValueError):
    """A bound formula was evaluated outside the region where it is defined"""


class OracleError(HPDivError, RuntimeError):
    """A density model cannot be evaluated or sampled as requested"""


class BootstrapError(HPDivError, RuntimeError):
    """Bootstrap resampling kept producing degenerate samples"""


class SchemaError(HPDivError):
    """A CSV file does not have the columns or classes that were asked for"""


class ParseError(HPDivError):
    """A CSV cell could not be read as a number"""

    def __init__(self, message: str, row: int = None, column: str = None):
        super().__init__(message)
        self.row = row
        self.column = column


class DataError(HPDivError):
    """The data parsed, but cannot be used (one class only, too few features)"""


class InvariantViolation(HPDivError, AssertionError):
    """A deterministic structural inequality failed on some instance"""

    def __init__(self, message: str, seeds: list = None):
        super().__init__(message)
        self.seeds = list(seeds or [])
