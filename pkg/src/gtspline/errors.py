"""Exception hierarchy for the package."""


class GTSplineError(Exception):
    """Base class for all errors raised by gtspline."""


class ChebyshevViolation(GTSplineError):
    """The section core is not a Chebyshev space on the requested span."""


class DegenerateSpan(GTSplineError):
    pass


class MultiplicityTooHigh(GTSplineError):
    pass


class MultiplicityOverflow(GTSplineError):
    """Knot insertion would push a multiplicity above the order."""


class KnotOutsideDomain(GTSplineError):
    pass


class IndexOutOfRange(GTSplineError, IndexError):
    pass


class FunctionVectorMismatch(GTSplineError):
    """Refined spans do not carry the section cores of the target basis."""


class MalformedPartition(GTSplineError):
    """Cells overlap, leave gaps, or leave the index domain."""


class NotAdmissible(GTSplineError):
    pass


class InsufficientIntersections(GTSplineError):
    pass


class RequiresAdPlus(GTSplineError):
    pass


class StepLimitExceeded(GTSplineError):
    pass


class DimensionMismatch(GTSplineError, ValueError):
    pass


class ZeroDenominator(GTSplineError, ZeroDivisionError):
    pass


class SingularFit(GTSplineError):
    pass


class ParseError(GTSplineError, ValueError):
    pass
