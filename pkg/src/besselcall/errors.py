"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested function."""


class BesselOverflowError(OverflowError):
    """An unscaled Bessel value was requested where it would overflow."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature stopped before reaching the requested tolerance.

    The best available estimate is kept on ``result`` so callers can decide
    whether it is usable.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
