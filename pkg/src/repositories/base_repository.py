"""Base repository interface for the file-backed data access layer."""
import logging
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Dict, Generic, Iterable, List, Sequence, TypeVar, Union

import pandas as pd
from pydantic import ValidationError

from src.utils.error_handler import PipelineError, data_error

T = TypeVar('T')  # Generic type for entities

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class BaseCsvRepository(ABC, Generic[T]):
    """
    Abstract CSV repository.

    Reads UTF-8, header-first, RFC-4180 quoted files into validated entities
    and writes entities back in the canonical column order. Every value is
    read as text so parsing rules live in one place (``parse_row``).
    """

    columns: Sequence[str] = ()
    optional_columns: Sequence[str] = ()
    allow_empty: bool = False

    @abstractmethod
    def parse_row(self, row: Dict[str, str]) -> T:
        """
        Convert one CSV row into an entity.

        Args:
            row: Column name -> raw text

        Returns:
            T: Parsed entity
        """
        pass

    @abstractmethod
    def to_row(self, entity: T) -> Dict[str, str]:
        """
        Convert an entity into a CSV row.

        Args:
            entity: Entity to serialize

        Returns:
            Dict[str, str]: Column name -> text
        """
        pass

    def keep_row(self, row: Dict[str, str]) -> bool:
        """Hook for rows that are skipped before parsing."""
        return True

    def read_frame(self, path: PathLike) -> pd.DataFrame:
        path = Path(path)
        if not path.is_file():
            raise data_error(f"input file not found: {path}", path=str(path))
        try:
            frame = pd.read_csv(
                path, dtype=str, keep_default_na=False, encoding="utf-8", skipinitialspace=False
            )
        except pd.errors.EmptyDataError:
            if self.allow_empty:
                return pd.DataFrame(columns=list(self.columns), dtype=str)
            raise data_error(f"{path.name}: missing header row", path=str(path))
        except (pd.errors.ParserError, UnicodeDecodeError) as e:
            raise data_error(f"{path.name}: malformed CSV ({e})", path=str(path))

        required = [c for c in self.columns if c not in self.optional_columns]
        missing = [c for c in required if c not in frame.columns]
        if missing:
            raise data_error(f"{path.name}: missing columns {missing}", path=str(path), columns=missing)
        for column in self.optional_columns:
            if column not in frame.columns:
                frame[column] = ""
        return frame

    def read(self, path: PathLike) -> List[T]:
        """Read and validate every row; errors carry the 1-based file line."""
        path = Path(path)
        frame = self.read_frame(path)
        entities = []
        for index, row in enumerate(frame.to_dict("records")):
            row_number = index + 2  # header is line 1
            try:
                if not self.keep_row(row):
                    continue
                entities.append(self.parse_row(row))
            except PipelineError as e:
                e.context.setdefault("row", row_number)
                raise PipelineError(
                    f"{path.name} row {row_number}: {e.reason}",
                    e.error_type,
                    context=e.context,
                )
            except (ValueError, ValidationError, KeyError) as e:
                message = " ".join(str(e).split())
                raise data_error(f"{path.name} row {row_number}: {message}", row=row_number, path=str(path))
        logger.info(f"Read {len(entities)} rows from {path.name}")
        return entities

    def write(self, path: PathLike, entities: Iterable[T]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame([self.to_row(e) for e in entities], columns=list(self.columns))
        frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
        return path


def format_float(value: float) -> str:
    """Shortest text that parses back to the same float."""
    return repr(float(value))


def parse_flag(text: str) -> bool:
    value = text.strip()
    if value not in ("0", "1"):
        raise ValueError(f"flag must be 0 or 1, got {text!r}")
    return value == "1"
