"""Exception hierarchy shared by all simulator modules."""


class AWEError(Exception):
    """Base class for all errors raised by this package."""


class StallError(AWEError):
    """Apparent wind at the kite vanished; aerodynamic forces are undefined."""


class SingularityError(AWEError):
    """Kite at the zenith, where the azimuth equation degenerates."""


class BreakError(AWEError):
    """Tether traction exceeded the breaking load."""

    def __init__(self, msg, force=None):
        super().__init__(msg)
        self.force = force


class DegenerateGeometry(AWEError):
    """Kite coincides with the tether exit point."""


class SingularMassMatrix(AWEError):
    """Total platform inertia matrix could not be factorized."""


class EmptyResult(AWEError):
    """No resonance peak found in a frequency response."""


class AliasError(AWEError):
    """Sampling step too coarse for the wave frequency grid."""


class UndefinedCourse(AWEError):
    """Course angle requested for a (numerically) motionless kite or at a target."""


class GeometryError(AWEError):
    """Planner geometry has no solution (arcsin argument out of range)."""


class PathTooNarrow(AWEError):
    """Planned azimuth span fell below the admissible floor."""


class InsufficientHistory(AWEError):
    """Not enough completed figure-eights to estimate a quantity."""


class NonFiniteState(AWEError):
    """Integration produced NaN/inf; the run is aborted."""

    def __init__(self, msg, t=None, state=None):
        super().__init__(msg)
        self.t = t
        self.state = state


class TooShort(AWEError):
    """Series too short for the requested spectral estimate."""


class NoPeaks(AWEError):
    """Too few peaks detected for force statistics."""


class ParseError(AWEError):
    """Configuration or matrix file could not be parsed."""


class ValidationError(AWEError):
    """Configuration violates one or more invariants.

    ``problems`` lists every violated invariant, not only the first.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
