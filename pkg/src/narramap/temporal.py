"""Calendar instants and intervals as knowledge graphs express them.

Wikidata-style time literals arrive as padded ISO text with an optional
leading sign ('+1939-09-01T00:00:00Z', unicode minus for BCE) plus a
separate precision integer (9 = year, 10 = month, 11 = day).  Precision
is carried through explicitly and never silently upgraded: a
year-precision 1939 stays a year, even if the literal spells out a fake
January 1st.

Day arithmetic uses the proleptic Gregorian calendar and supports
negative (BCE) years, which the stdlib datetime cannot represent.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

PRECISION_YEAR = 9
PRECISION_MONTH = 10
PRECISION_DAY = 11


class MalformedTime(ValueError):
    pass


class InsufficientPrecision(ValueError):
    pass


class NegativeDuration(ValueError):
    """Raised when an interval's end precedes its start."""


_TIME_LITERAL = re.compile(
    r"^\s*([+\-−]?)(\d{1,16})"
    r"(?:-(\d{2})(?:-(\d{2}))?)?"
    r"(?:T(\d{2}):(\d{2}):(\d{2}(?:\.\d+)?)?Z?)?\s*$"
)

_DAYS_IN_MONTH = [31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31]


def is_leap_year(year: int) -> bool:
    return year % 4 == 0 and (year % 100 != 0 or year % 400 == 0)


def days_in_month(year: int, month: int) -> int:
    if month == 2 and is_leap_year(year):
        return 29
    return _DAYS_IN_MONTH[month - 1]


def days_from_civil(year: int, month: int, day: int) -> int:
    """Days since 1970-01-01 in the proleptic Gregorian calendar.

    Works for any year, including zero and negatives (astronomical
    numbering).
    """
    year -= month <= 2
    era = (year if year >= 0 else year - 399) // 400
    yoe = year - era * 400
    doy = (153 * (month + (-3 if month > 2 else 9)) + 2) // 5 + day - 1
    doe = yoe * 365 + yoe // 4 - yoe // 100 + doy
    return era * 146097 + doe - 719468


@dataclass(frozen=True, order=False)
class Instant:
    """A calendar timestamp with declared precision.

    month/day are None when masked out by the precision; they are never
    invented.
    """

    year: int
    month: int | None = None
    day: int | None = None
    precision: int = PRECISION_DAY

    def __post_init__(self) -> None:
        if self.month is not None and not 1 <= self.month <= 12:
            raise MalformedTime(f"month out of range: {self.month}")
        if self.day is not None:
            if self.month is None:
                raise MalformedTime("day given without month")
            if not 1 <= self.day <= days_in_month(self.year, self.month):
                raise MalformedTime(f"day out of range: {self.year}-{self.month:02d}-{self.day:02d}")
        if self.precision >= PRECISION_MONTH and self.month is None:
            raise MalformedTime("precision requires a month")
        if self.precision >= PRECISION_DAY and self.day is None:
            raise MalformedTime("precision requires a day")

    # -- bounds at the declared precision (closed-interval semantics)

    def earliest_date(self) -> tuple[int, int, int]:
        if self.precision <= PRECISION_YEAR or self.month is None:
            return (self.year, 1, 1)
        if self.precision == PRECISION_MONTH or self.day is None:
            return (self.year, self.month, 1)
        return (self.year, self.month, self.day)

    def latest_date(self) -> tuple[int, int, int]:
        if self.precision <= PRECISION_YEAR or self.month is None:
            return (self.year, 12, 31)
        if self.precision == PRECISION_MONTH or self.day is None:
            return (self.year, self.month, days_in_month(self.year, self.month))
        return (self.year, self.month, self.day)

    def earliest_days(self) -> int:
        return days_from_civil(*self.earliest_date())

    def latest_days(self) -> int:
        return days_from_civil(*self.latest_date())

    def sort_key(self) -> int:
        return self.earliest_days()

    def iso(self) -> str:
        """ISO date text truncated to the declared precision."""
        year = f"{self.year:04d}" if self.year >= 0 else f"-{-self.year:04d}"
        if self.precision <= PRECISION_YEAR or self.month is None:
            return year
        if self.precision == PRECISION_MONTH or self.day is None:
            return f"{year}-{self.month:02d}"
        return f"{year}-{self.month:02d}-{self.day:02d}"

    def xsd_datetime(self) -> str:
        """Zero-padded xsd:dateTime lexical form (masked parts become 01)."""
        y, m, d = self.earliest_date()
        year = f"{y:04d}" if y >= 0 else f"-{-y:04d}"
        return f"{year}-{m:02d}-{d:02d}T00:00:00Z"


@dataclass(frozen=True)
class TemporalValue:
    """An instant or an interval; interval ends may be openly absent."""

    kind: str
    instant: Instant | None = None
    start: Instant | None = None
    end: Instant | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("instant", "interval"):
            raise ValueError(f"unknown temporal kind: {self.kind!r}")
        if self.kind == "instant":
            if self.instant is None:
                raise ValueError("instant value requires an instant")
        else:
            if self.start is None and self.end is None:
                raise ValueError("interval needs at least one bound")
            if self.start and self.end and self.start.sort_key() > self.end.latest_days():
                raise NegativeDuration(
                    f"interval ends before it starts: {self.start.iso()} > {self.end.iso()}"
                )

    def effective_start(self) -> Instant | None:
        if self.kind == "instant":
            return self.instant
        return self.start if self.start is not None else self.end

    def effective_end(self) -> Instant | None:
        if self.kind == "instant":
            return self.instant
        return self.end if self.end is not None else self.start

    def intersects(self, window_start: Instant | None, window_end: Instant | None) -> bool:
        """Closed-interval intersection at each side's declared precision."""
        lo = self.effective_start()
        hi = self.effective_end()
        if lo is None or hi is None:
            return True
        if window_start is not None and hi.latest_days() < window_start.earliest_days():
            return False
        if window_end is not None and lo.earliest_days() > window_end.latest_days():
            return False
        return True


def instant_value(instant: Instant) -> TemporalValue:
    return TemporalValue("instant", instant=instant)


def interval_value(start: Instant | None, end: Instant | None) -> TemporalValue:
    return TemporalValue("interval", start=start, end=end)


def parse_time(literal: str, precision: int | None = None) -> Instant:
    """Parse an endpoint-style time literal into an Instant.

    A leading '+' or unicode minus is accepted; '00' month/day segments
    are treated as masked.  An explicit precision overrides the textual
    guess and masks finer fields; asking for finer precision than the
    text carries is an error.
    """
    m = _TIME_LITERAL.match(literal)
    if not m:
        raise MalformedTime(f"unparseable time literal: {literal!r}")
    sign, year_text, month_text, day_text = m.group(1), m.group(2), m.group(3), m.group(4)
    year = int(year_text)
    if sign in ("-", "−"):
        year = -year
    month = int(month_text) if month_text and month_text != "00" else None
    day = int(day_text) if day_text and day_text != "00" else None

    guessed = PRECISION_YEAR
    if month is not None:
        guessed = PRECISION_MONTH
    if day is not None:
        guessed = PRECISION_DAY

    if precision is None:
        precision = guessed
    else:
        if precision > PRECISION_DAY:
            precision = PRECISION_DAY  # sub-day granularity is clamped to day
        if precision > guessed:
            raise MalformedTime(
                f"precision {precision} finer than the literal {literal!r} carries"
            )
    if precision <= PRECISION_YEAR:
        month = day = None
    elif precision == PRECISION_MONTH:
        day = None
    return Instant(year, month, day, precision=precision)


def duration_days(start: Instant, end: Instant) -> int:
    """Calendar-day difference end - start.

    Both instants must carry at least day precision; a negative result
    is an error rather than being silently negated.
    """
    for inst in (start, end):
        if inst.precision < PRECISION_DAY or inst.day is None:
            raise InsufficientPrecision(
                f"duration needs day precision, got {inst.iso()!r} (precision {inst.precision})"
            )
    days = days_from_civil(end.year, end.month, end.day) - days_from_civil(
        start.year, start.month, start.day
    )
    if days < 0:
        raise NegativeDuration(f"start {start.iso()} is after end {end.iso()}")
    return days


def datetime_sort_key(literal: str) -> tuple[int, float] | None:
    """(days, seconds-of-day) for chronological comparison, or None."""
    m = _TIME_LITERAL.match(literal)
    if not m:
        return None
    sign, year_text = m.group(1), m.group(2)
    year = int(year_text)
    if sign in ("-", "−"):
        year = -year
    month = int(m.group(3)) if m.group(3) and m.group(3) != "00" else 1
    day = int(m.group(4)) if m.group(4) and m.group(4) != "00" else 1
    try:
        days = days_from_civil(year, month, day)
    except Exception:
        return None
    seconds = 0.0
    if m.group(5):
        seconds = int(m.group(5)) * 3600 + int(m.group(6)) * 60
        if m.group(7):
            seconds += float(m.group(7))
    return (days, seconds)
