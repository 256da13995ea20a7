"""Exception hierarchy shared by the library and the command line."""


class ArchetypalError(Exception):
    """Base class for all errors raised by this package."""


class InputError(ArchetypalError, ValueError):
    """Data is malformed: non-finite values, unparsable cells, missing columns."""


class ConfigurationError(ArchetypalError, ValueError):
    """Parameters are inconsistent with each other or with the data."""


class ConvergenceError(ArchetypalError, RuntimeError):
    """An iterative solver hit its iteration cap.

    The best iterate found so far is kept on ``best`` so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class FitError(ArchetypalError, RuntimeError):
    """Every restart of a fit failed; ``diagnostics`` holds one entry per restart."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class NotEnoughPointsError(ArchetypalError, ValueError):
    """A scree series is too short to score an elbow."""
