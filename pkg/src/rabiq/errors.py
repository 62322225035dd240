"""Exception hierarchy for rabiq."""


class RabiqError(Exception):
    """Base class for every error raised by this package."""


class InvalidParams(RabiqError, ValueError):
    pass


class SpectralCollapse(InvalidParams):
    """The two-photon coupling makes one spin branch unbounded below."""

    def __init__(self, message, branch=None):
        super().__init__(message)
        self.branch = branch


class DegenerateScaleError(RabiqError, ZeroDivisionError):
    pass


class TruncationTooSmall(RabiqError, ValueError):
    pass


class ParityBroken(RabiqError, ValueError):
    pass


class DimensionMismatch(RabiqError, ValueError):
    pass


class NoConvergence(RabiqError, RuntimeError):
    def __init__(self, message, iterations=0, best_residual=float("inf")):
        super().__init__(message)
        self.iterations = iterations
        self.best_residual = best_residual


class FactorizationSingular(RabiqError, ArithmeticError):
    pass


class TruncationCapExceeded(RabiqError, RuntimeError):
    pass


class UndefinedForZeroG2(RabiqError, ValueError):
    pass


class VanishingWeight(RabiqError, ValueError):
    pass


class GridTooCoarse(RabiqError, ValueError):
    pass


class OutOfDomain(RabiqError, ValueError):
    pass


class NoSignChange(RabiqError, ValueError):
    pass


class NotFound(RabiqError, LookupError):
    pass


class NonRectangularGrid(RabiqError, ValueError):
    pass
