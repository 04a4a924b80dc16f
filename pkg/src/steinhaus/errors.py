"""Exception hierarchy shared by every module."""


class SteinhausError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(SteinhausError, ValueError):
    pass


class EmptySet(InvalidInput):
    pass


class EmptyInner(SteinhausError):
    """Inner rasterization has no fully contained cell; refine h."""


class DimensionMismatch(InvalidInput):
    pass


class BudgetExceeded(SteinhausError):
    def __init__(self, message, suggested_coarsening=None):
        super().__init__(message)
        self.suggested_coarsening = suggested_coarsening


class NonLatticeShift(SteinhausError, ValueError):
    pass


class NullMeasure(SteinhausError, ValueError):
    pass


class NotSymmetric(SteinhausError, ValueError):
    pass


class PointOutsideHull(SteinhausError, ValueError):
    pass


class QThresholdNotMet(SteinhausError, ValueError):
    pass


class ResolutionTooCoarse(SteinhausError, ValueError):
    pass
