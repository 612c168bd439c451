"""Exact-arithmetic toolkit for plane Cremona transformations of P^2(C)."""

from .polycore import GaussRat, HPoly, CPoint
from .ratmap import RatMap

__all__ = ["GaussRat", "HPoly", "CPoint", "RatMap"]
__version__ = "0.1.0"
