"""Exception hierarchy. Every error raised on purpose by the package derives
from :class:`LabError` so the CLI can map it to exit code 1."""


class LabError(Exception):
    pass


class PoleError(LabError, ZeroDivisionError):
    """A birational map or Hamiltonian evaluated on its polar divisor."""


class ChartError(LabError, ValueError):
    """State leaves the (q, p) chart: q coincides with a singular point."""


class InfinityError(LabError, ValueError):
    """Operation needs a finite t4 but the state has t4 = infinity."""


class SingularityError(LabError):
    """Integration got closer to a pole of the vector field than the guard radius."""

    def __init__(self, message, arclength=None):
        super().__init__(message)
        self.arclength = arclength


class StepError(LabError):
    """Adaptive step size underflowed."""


class GeometryError(LabError):
    """Loop construction impossible with the required clearances."""


class AccuracyError(LabError):
    """A numerical certificate (e.g. det M = 1) was not met."""


class NotResonantError(LabError, ValueError):
    """Exponent difference is not a positive integer."""


class AccumulationError(LabError):
    """Coalescence trajectory violated the general-position guard."""


class EmptyCurveError(LabError, ValueError):
    """Parameter constraints leave no admissible curve."""


class WordError(LabError):
    """A letter of a word failed; carries the failing position."""

    def __init__(self, position, letter, cause):
        super().__init__(f"letter #{position} (s{letter}) failed: {cause}")
        self.position = position
        self.letter = letter
        self.cause = cause
