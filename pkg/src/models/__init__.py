# Models module initialization
from .inspection import (
    ClusterLabel,
    GeoPoint,
    InspectionRecord,
    InspectionType,
    LinkedInspection,
    Severity,
    severity_of,
    target_label,
)
from .environment import EventKind, LicenseInfo, PointEvent, WeatherObservation
from .features import DateWindow, FeatureConfig, FeatureVector, KdeConfig, LabeledInstance
from .logistic_model import ClusterAssignment, FitMeta, LogisticModel, TrainingConfig
from .schedule import Schedule, ScheduleMetrics, ScheduleStrategy
from .synth import SynthConfig

__all__ = [
    'ClusterAssignment',
    'ClusterLabel',
    'DateWindow',
    'EventKind',
    'FeatureConfig',
    'FeatureVector',
    'FitMeta',
    'GeoPoint',
    'InspectionRecord',
    'InspectionType',
    'KdeConfig',
    'LabeledInstance',
    'LicenseInfo',
    'LinkedInspection',
    'LogisticModel',
    'PointEvent',
    'Schedule',
    'ScheduleMetrics',
    'ScheduleStrategy',
    'Severity',
    'SynthConfig',
    'TrainingConfig',
    'WeatherObservation',
    'severity_of',
    'target_label',
]
