"""Exception and warning types raised across the package."""


class RKInterpError(Exception):
    """Base class for all package errors."""


class DomainViolation(RKInterpError, ValueError):
    """An argument lies outside the region where a kernel or map is defined."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class DimensionMismatch(RKInterpError, ValueError):
    pass


class UnsupportedId(RKInterpError, ValueError):
    pass


class InvalidFill(RKInterpError, ValueError):
    pass


class DuplicatePoints(RKInterpError, ValueError):
    """Two interpolation nodes (or sample points) coincide."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


DuplicateNodes = DuplicatePoints


class SingularGram(RKInterpError, ArithmeticError):
    pass


class KreinSpec(RKInterpError, ValueError):
    """An RKHS-only operation was asked of a sign-indefinite kernel."""


class CollapsedNodes(DuplicatePoints):
    """Distinct inputs were mapped onto the same feature vector."""


class TruncationTooSmall(RKInterpError, ValueError):
    pass


class SingularValueCluster(RKInterpError, ArithmeticError):
    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


class PoleOnCircle(RKInterpError, ArithmeticError):
    pass


class PoleOnGrid(RKInterpError, ArithmeticError):
    pass


class Infeasible(RKInterpError, ValueError):
    def __init__(self, message, coordinate=None):
        super().__init__(message)
        self.coordinate = coordinate


class TooLarge(RKInterpError, ValueError):
    pass


class IllConditioned(UserWarning):
    """Gram solve succeeded but the condition estimate exceeds 1e12."""
