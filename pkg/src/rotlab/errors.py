"""Exception hierarchy shared by all rotlab modules."""


class RotlabError(Exception):
    """Base class for every error raised by rotlab."""


class InvalidInput(RotlabError, ValueError):
    pass


class NotALift(RotlabError):
    """The evaluator does not commute with integer translations."""


class ClassMismatch(RotlabError):
    """An operation was applied to a map of the wrong homotopy class."""


class HorizonTooLarge(RotlabError):
    """Orbit coordinates left the range where double precision is trusted.

    ``last_safe_n`` is the last iterate that was fully computed, and
    ``partial`` (when set) holds the series truncated at that iterate.
    """

    def __init__(self, message, last_safe_n, partial=None):
        super().__init__(message)
        self.last_safe_n = last_safe_n
        self.partial = partial


class DegenerateImage(RotlabError):
    pass


class NonInvariantLoop(RotlabError):
    def __init__(self, message, drift):
        super().__init__(message)
        self.drift = drift


class CornerHit(RotlabError):
    """A straight-line trace ran into a square corner (a potential singularity)."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class InvalidSlope(InvalidInput):
    pass


class MissingEvidence(RotlabError):
    def __init__(self, field):
        super().__init__(f"missing evidence: {field}")
        self.field = field
