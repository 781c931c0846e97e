"""Handlers for the synthetic city generator and the report bundle."""

import logging
from typing import List, Optional

from pydantic import ValidationError

from src.handlers.base_handler import BaseHandler
from src.models.features import DateWindow
from src.models.synth import SynthConfig
from src.services.report_service import build_report
from src.services.synth_service import generate
from src.utils.error_handler import configuration_error

logger = logging.getLogger(__name__)


class SynthHandler(BaseHandler):

    def __init__(self, config, n_inspections: Optional[int] = None):
        super().__init__(config)
        self.n_inspections = n_inspections

    def synth_config(self) -> SynthConfig:
        """Generator settings: the run seed, windows and KDE settings, optional size override."""
        settings = {
            "seed": self.config.seed,
            "train_window": self.config.train_window,
            "test_window": self.config.test_window,
            "date_range": DateWindow(start=self.config.train_window.start, end=self.config.test_window.end),
            "kde": self.config.kde,
        }
        if self.n_inspections is not None:
            settings["n_inspections"] = self.n_inspections
        try:
            return SynthConfig(**settings)
        except ValidationError as e:
            first = e.errors()[0]
            raise configuration_error(f"invalid synthetic city setting: {first['msg']}")

    def synth(self) -> List:
        self.config.out.mkdir(parents=True, exist_ok=True)
        manifest = generate(self.synth_config(), self.config.out)
        logger.info(f"Synthetic city written: {manifest['counts']['by_kind']}")
        return self.written

    def report(self) -> List:
        index = build_report(self.config.out)
        if index["missing"]:
            logger.warning(f"Report is missing {len(index['missing'])} outputs: {', '.join(index['missing'])}")
        return self.written
