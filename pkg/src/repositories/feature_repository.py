"""Repository for the exported feature matrix (features.csv)."""
import logging
from typing import Dict, List, Sequence, Tuple

from src.constants import FEATURE_NAMES
from src.models.features import FeatureVector, LabeledInstance
from src.repositories.base_repository import BaseCsvRepository, PathLike, format_float
from src.utils.date_utils import format_date, parse_date
from src.utils.error_handler import validation_error

logger = logging.getLogger(__name__)

TRAIN_SPLIT = "train"
TEST_SPLIT = "test"

FEATURE_ID_COLUMNS = ("inspection_id", "establishment_id", "date", "split", "label", "previous_sanitarian")
FEATURE_COLUMNS = FEATURE_ID_COLUMNS + FEATURE_NAMES

SplitInstance = Tuple[str, LabeledInstance]


def _format_feature(value) -> str:
    if isinstance(value, float):
        return format_float(value)
    return str(value)


class FeatureRepository(BaseCsvRepository[SplitInstance]):
    """
    One row per labeled instance with raw-unit feature columns.

    The ``split`` column tags rows ``train`` or ``test``; readers that only
    need one side use ``read_split``.
    """

    columns = FEATURE_COLUMNS
    optional_columns = ("establishment_id", "previous_sanitarian")
    allow_empty = True

    def parse_row(self, row: Dict[str, str]) -> SplitInstance:
        split = row["split"].strip()
        if split not in (TRAIN_SPLIT, TEST_SPLIT):
            raise validation_error(f"split must be train or test, got {split!r}")
        features = FeatureVector(**{name: row[name] for name in FEATURE_NAMES})
        instance = LabeledInstance(
            inspection_id=row["inspection_id"].strip(),
            establishment_id=row["establishment_id"].strip(),
            date=parse_date(row["date"]),
            label=int(row["label"]),
            features=features,
            previous_sanitarian=row["previous_sanitarian"].strip() or None,
        )
        return split, instance

    def to_row(self, entity: SplitInstance) -> Dict[str, str]:
        split, instance = entity
        row = {
            "inspection_id": instance.inspection_id,
            "establishment_id": instance.establishment_id,
            "date": format_date(instance.date),
            "split": split,
            "label": str(instance.label),
            "previous_sanitarian": instance.previous_sanitarian or "",
        }
        for name, value in instance.features.as_dict().items():
            row[name] = _format_feature(value)
        return row

    def write_splits(
        self, path: PathLike, train: Sequence[LabeledInstance], test: Sequence[LabeledInstance]
    ):
        rows = [(TRAIN_SPLIT, i) for i in train] + [(TEST_SPLIT, i) for i in test]
        return self.write(path, rows)

    def read_splits(self, path: PathLike) -> Tuple[List[LabeledInstance], List[LabeledInstance]]:
        rows = self.read(path)
        train = [instance for split, instance in rows if split == TRAIN_SPLIT]
        test = [instance for split, instance in rows if split == TEST_SPLIT]
        return train, test

    def read_split(self, path: PathLike, split: str) -> List[LabeledInstance]:
        train, test = self.read_splits(path)
        return train if split == TRAIN_SPLIT else test
