"""Exception types shared across the pipeline.

The CLI maps these onto exit codes: input/validation problems exit with 1,
violated internal invariants (runaway clique enumeration, inconsistent
interval state) exit with 2.
"""


class ScrambleGraphError(Exception):
    """Base class for every error raised by this package."""


class ParseError(ScrambleGraphError):
    """A malformed annotation line; carries the 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class DuplicateRecordError(ParseError):
    """Two records share the same (MIC contig, MAC contig, index) key."""


class InputError(ScrambleGraphError):
    """Invalid argument or missing upstream artifact."""


class DimensionError(ScrambleGraphError):
    """A graph has more vertices than the requested padding dimension."""


class CliqueCapError(ScrambleGraphError):
    """Clique enumeration exceeded the configured cap."""


class InternalConsistencyError(ScrambleGraphError):
    """Data reached a state the preprocessing contract should prevent."""


class IncompleteScheduleError(ScrambleGraphError):
    """A filtration schedule ends before all points have merged."""
