"""Calendar arithmetic shared by features, scheduler and audits."""
from datetime import date, datetime

from src.constants import DATE_FORMAT, DAYS_PER_YEAR, MONTH_FORMAT
from src.utils.error_handler import validation_error


def fractional_years(earlier: date, later: date) -> float:
    """Years elapsed between two dates, counting 365.25 days per year.

    Raises:
        PipelineError: If ``earlier`` is after ``later``.
    """
    if earlier > later:
        raise validation_error(
            f"date ordering violated: {earlier.isoformat()} is after {later.isoformat()}",
            earlier=earlier.isoformat(),
            later=later.isoformat(),
        )
    return (later - earlier).days / DAYS_PER_YEAR


def parse_date(text: str, fmt: str = DATE_FORMAT) -> date:
    return datetime.strptime(text.strip(), fmt).date()


def format_date(value: date) -> str:
    return value.strftime(DATE_FORMAT)


def month_key(value: date) -> str:
    return value.strftime(MONTH_FORMAT)
