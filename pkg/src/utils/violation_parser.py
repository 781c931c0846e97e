"""Parser for the violation narrative field of inspection records."""
import re
import logging
from typing import FrozenSet, Iterable

from src.constants import (
    CRITICAL_CODE_TITLES,
    VIOLATION_COMMENT_MARKER,
    VIOLATION_DELIMITER,
)
from src.models.inspection import Severity, severity_of
from src.utils.error_handler import PipelineError, validation_error

logger = logging.getLogger(__name__)

_LEADING_CODE = re.compile(r"^\s*(\d+)\s*\.")


class ViolationParser:
    """Extract violation codes from ``"3. TITLE - Comments: ... | 32. TITLE"`` text."""

    @staticmethod
    def _entries(text: str):
        return [entry.strip() for entry in text.split(VIOLATION_DELIMITER)]

    @classmethod
    def parse(cls, text: str) -> FrozenSet[int]:
        """
        Parse a violation field into its set of codes.

        Entries are separated by ``|``; each entry starts with its integer code
        terminated by the first ``.``. Comments after ``- Comments:`` are
        discarded with the rest of the entry.

        Args:
            text: Raw field, possibly empty

        Returns:
            FrozenSet[int]: Cited codes (duplicates collapse)

        Raises:
            PipelineError: Entry without a leading code (context carries
                ``entry_index``) or a code outside 1..45
        """
        if text is None or not text.strip():
            return frozenset()

        codes = set()
        for index, entry in enumerate(cls._entries(text)):
            if not entry:
                # Trailing or doubled delimiters carry no citation
                continue
            match = _LEADING_CODE.match(entry)
            if not match:
                raise validation_error(
                    f"violation entry {index} has no leading code: {entry[:40]!r}",
                    entry_index=index,
                )
            code = int(match.group(1))
            try:
                severity_of(code)
            except PipelineError as e:
                e.context["entry_index"] = index
                raise
            codes.add(code)
        return frozenset(codes)

    @staticmethod
    def title_of(code: int) -> str:
        severity = severity_of(code)
        if severity == Severity.CRITICAL:
            return CRITICAL_CODE_TITLES[code]
        return f"{severity.value.upper()} VIOLATION"

    @classmethod
    def format(cls, codes: Iterable[int], comments: dict = None) -> str:
        """Serialize codes in canonical form, ascending, one entry per code."""
        comments = comments or {}
        entries = []
        for code in sorted(set(codes)):
            entry = f"{code}. {cls.title_of(code)}"
            if code in comments:
                entry += f"{VIOLATION_COMMENT_MARKER} {comments[code]}"
            entries.append(entry)
        return f" {VIOLATION_DELIMITER} ".join(entries)
