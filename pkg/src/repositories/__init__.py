"""Repository pattern implementation for data access layer."""
from .base_repository import BaseCsvRepository
from .environment_repository import EventRepository, LicenseRepository, WeatherRepository
from .feature_repository import FeatureRepository
from .inspection_repository import InspectionRepository
from .model_repository import ModelRepository

__all__ = [
    'BaseCsvRepository',
    'EventRepository',
    'FeatureRepository',
    'InspectionRepository',
    'LicenseRepository',
    'ModelRepository',
    'WeatherRepository',
]
