"""
Random plane-model builders, one class per model family.
"""
from typing import Dict, Type

from ...config.models import get_model_definition
from .base import ModelBuilder, PointLayout
from .nonic import FiveTripleNonicBuilder, NodalNinthNonicBuilder, NonicBuilder
from .octic import OcticBuilder

BUILDERS: Dict[int, Type[ModelBuilder]] = {k: NonicBuilder for k in range(5, 10)}
BUILDERS[4] = NodalNinthNonicBuilder
BUILDERS[10] = OcticBuilder
BUILDERS[20] = FiveTripleNonicBuilder


def get_builder(k: int, prime: int, seed: int) -> ModelBuilder:
    """Builder for k pencils; raises UnsupportedModelError for other k."""
    definition = get_model_definition(k)
    return BUILDERS[k](definition, prime, seed)


__all__ = [
    'ModelBuilder',
    'PointLayout',
    'NonicBuilder',
    'NodalNinthNonicBuilder',
    'FiveTripleNonicBuilder',
    'OcticBuilder',
    'BUILDERS',
    'get_builder',
]
