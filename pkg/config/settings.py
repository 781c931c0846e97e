import os
from dotenv import load_dotenv

from src.utils.error_handler import configuration_error

# Load environment variables from .env file
load_dotenv()


class Settings:
    def __init__(self):
        # Application Settings
        self.log_level = os.getenv('LOG_LEVEL', 'INFO')
        self.environment = os.getenv('ENVIRONMENT', 'production')
        self.debug = os.getenv('DEBUG', 'false').strip().lower() == 'true'

        # Optional location of the released City data for the acceptance checks
        self.inspection_data_dir = os.getenv('INSPECTION_DATA_DIR', '')

        self._validate()

    def _validate(self):
        """Validate configuration."""
        errors = []

        valid_levels = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')
        if self.log_level.upper() not in valid_levels:
            errors.append(f"LOG_LEVEL must be one of {', '.join(valid_levels)}")

        if errors and not self.is_testing:
            raise configuration_error(f"Configuration errors: {', '.join(errors)}")

    @property
    def is_testing(self) -> bool:
        return self.environment == 'testing'
