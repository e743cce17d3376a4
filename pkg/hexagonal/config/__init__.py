"""
Configuration for the hexagonal-curves toolkit.
"""
from .settings import Settings
from .models import ModelDefinition, MODEL_DEFINITIONS, get_model_definition, list_supported_k

__all__ = [
    'Settings',
    'ModelDefinition',
    'MODEL_DEFINITIONS',
    'get_model_definition',
    'list_supported_k',
]
