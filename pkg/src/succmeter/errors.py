"""Exception and warning types raised across the package."""


class SuccMeterError(ValueError):
    """Base class for all domain errors."""


class NotHermitian(SuccMeterError):
    pass


class DimensionMismatch(SuccMeterError):
    pass


class InvalidState(SuccMeterError):
    """A matrix failed a density-matrix check.

    ``prop`` names the violated property: one of ``"shape"``, ``"finite"``,
    ``"hermiticity"``, ``"trace"`` or ``"negativity"``.
    """

    def __init__(self, prop, message=None):
        self.prop = prop
        super().__init__(message or f"invalid density matrix: {prop}")


class ZeroProbability(SuccMeterError):
    pass


class NotComplementary(SuccMeterError):
    pass


class ZeroOverlap(NotComplementary):
    pass


class GridTooSmall(SuccMeterError):
    pass


class IllConditioned(UserWarning):
    """Reconstruction amplifies record errors by more than the threshold."""
