"""Call prices on strict local Bessel martingales.

Closed forms and integral representations live in :mod:`besselcall.analytic`,
quadrature oracles in :mod:`besselcall.quad`, samplers in :mod:`besselcall.mc`.
"""

__version__ = "0.1.0"

from ._jit import BACKEND
from .analytic import ModelParams, PricePoint, make_params, price, price_point
from .errors import BesselOverflowError, DomainError, QuadratureError
from .quad import QuadratureSpec

__all__ = [
    "BACKEND",
    "BesselOverflowError",
    "DomainError",
    "ModelParams",
    "PricePoint",
    "QuadratureError",
    "QuadratureSpec",
    "__version__",
    "make_params",
    "price",
    "price_point",
]
