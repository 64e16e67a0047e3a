"""Exception hierarchy."""


class QLPError(Exception):
    """Base class for package errors."""


class StructuralError(QLPError, ValueError):
    """Input is malformed: a missing meet, a partial table, an unknown label."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InconsistencyError(QLPError):
    """A partial s-map admits no completion; ``report`` holds both derivations."""

    def __init__(self, report):
        super().__init__(report.summary())
        self.report = report


class UnderdeterminedError(QLPError):
    """A partial s-map does not pin down every cell."""

    def __init__(self, free_tuples):
        self.free_tuples = list(free_tuples)
        super().__init__(f"{len(self.free_tuples)} tuple(s) left undetermined")


class ModelConstructionError(QLPError):
    """The classical representation could not be built (the s-map is invalid)."""


class InternalError(QLPError, AssertionError):
    """Two independent computations of the same quantity disagreed."""
