# src/errors.py
# -----------------------------------------------------------
# Error hierarchy shared by the trace kernel, the solvers,
# the game engine and the CLI.
# The CLI maps InputError (and DocumentError) to exit code 3
# and BoundExceeded to exit code 2.
# -----------------------------------------------------------


class ReductionError(Exception):
    """Base class for every error raised by this project."""


class InputError(ReductionError, ValueError):
    """Unknown letter/process/color, bad tile index, alphabet mismatch."""


class DocumentError(InputError):
    """A document failed strict parsing. `field` is the offending path."""

    def __init__(self, message: str, field: str = "$"):
        super().__init__(f"{field}: {message}")
        self.field = field


class PreconditionError(ReductionError):
    """An operation was called outside of its precondition."""


class ProbeError(PreconditionError):
    """Zero or several answers allowed after a probe check."""


class DecodeError(ReductionError):
    """A coloring could not be read back as a PCP solution."""


class BoundExceeded(ReductionError):
    """A brute-force oracle was asked for more than it is allowed to enumerate."""


class MissingViewError(ReductionError, KeyError):
    """A table strategy has no entry for the requested view."""


class InvariantViolation(ReductionError, AssertionError):
    """A structural invariant failed during exploration."""
