"""
Hexagonal curves - plane models, canonical ideals and deformation checks for
genus-11 curves with many hexagonal pencils, over finite prime fields.
"""

__version__ = "0.1.0"

from .algebra.ffla import PrimeField
from .algebra.poly import PolyRing, GradedPoly
from .geometry.plane import PlaneModel, random_model
from .geometry.canon import CanonicalCurve, canonical_ideal, scroll, syzygy_scheme

__all__ = [
    'PrimeField',
    'PolyRing',
    'GradedPoly',
    'PlaneModel',
    'random_model',
    'CanonicalCurve',
    'canonical_ideal',
    'scroll',
    'syzygy_scheme',
]
