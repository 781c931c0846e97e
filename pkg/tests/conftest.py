import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings as hypothesis_settings

# Add project root to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

# Set test environment
os.environ['ENVIRONMENT'] = 'testing'

# Factory sequences are reset per test, not per generated example
hypothesis_settings.register_profile("pipeline", suppress_health_check=[HealthCheck.function_scoped_fixture])
hypothesis_settings.load_profile("pipeline")

from config.settings import Settings
from src.constants import CITY_MODEL_COEFFICIENTS
from src.models.logistic_model import LogisticModel
from src.services.synth_service import generate
from tests.factories import InspectionRecordFactory, LabeledInstanceFactory, small_city_config


@pytest.fixture
def settings():
    """Test settings fixture."""
    return Settings()


@pytest.fixture(autouse=True)
def reset_factory_sequences():
    InspectionRecordFactory.reset_sequence()
    LabeledInstanceFactory.reset_sequence()


@pytest.fixture(scope='session')
def synthetic_city(tmp_path_factory):
    """Cached small synthetic city: (directory, manifest)."""
    out = tmp_path_factory.mktemp("synthetic_city")
    manifest = generate(small_city_config(), out)
    return Path(out), manifest


@pytest.fixture
def city_model():
    """The published city model with a zero intercept."""
    return LogisticModel.from_mapping(CITY_MODEL_COEFFICIENTS, intercept=0.0)

