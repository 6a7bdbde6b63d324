"""Exception types raised by tensorlink."""


class TraceFormatError(ValueError):
    """A trace file could not be parsed.

    ``line`` holds the 1-based line number of the offending record, or
    ``None`` when the error is not tied to a single line.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TensorFormatError(ValueError):
    """A persisted tensor failed a structural or invariant check on load."""


class ConvergenceError(ArithmeticError):
    """The Katz series does not converge for the requested beta."""


class EntropyBoundError(ValueError):
    """An entropy estimate exceeded the maximum used to weight it."""


class KnowledgeError(ValueError):
    """A metric needs more neighbourhood knowledge than the mode provides."""


class EmptyBenchmarkError(ValueError):
    """The held-out period contains no links to predict."""
