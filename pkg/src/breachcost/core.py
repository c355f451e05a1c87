"""Study calendar, shared value types and pipeline configuration.

Months are plain integers counted from January 2008 (``t = 0``) through
December 2021 (``t = 167``).
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Iterable, Optional

ORIGIN_YEAR = 2008
T_MAX = 167
N_MONTHS = T_MAX + 1

MonthIndex = int


class BreachCostError(Exception):
    """Base class for input and domain errors raised by this package."""


class DomainError(BreachCostError, ValueError):
    pass


class InvariantError(BreachCostError, RuntimeError):
    """An internal consistency check failed (a bug, not bad input)."""


def month_index(year: int, month: int) -> MonthIndex:
    if year < ORIGIN_YEAR:
        raise DomainError(f"year {year} precedes the study origin {ORIGIN_YEAR}")
    if not 1 <= month <= 12:
        raise DomainError(f"month must be in 1..12, got {month}")
    return 12 * (year - ORIGIN_YEAR) + (month - 1)


def year_month(t: MonthIndex) -> tuple[int, int]:
    if t < 0:
        raise DomainError(f"month index must be non-negative, got {t}")
    return ORIGIN_YEAR + t // 12, t % 12 + 1


def year_of(t: MonthIndex) -> int:
    return year_month(t)[0]


_MONTH_RE = re.compile(r"^\s*(\d{4})-(\d{1,2})\s*$")


def parse_month(text: str) -> MonthIndex:
    """Parse ``YYYY-MM`` into a month index."""
    m = _MONTH_RE.match(text)
    if not m:
        raise DomainError(f"expected YYYY-MM, got {text!r}")
    return month_index(int(m.group(1)), int(m.group(2)))


def format_month(t: MonthIndex) -> str:
    y, m = year_month(t)
    return f"{y:04d}-{m:02d}"


def check_in_calendar(t: MonthIndex) -> None:
    if not 0 <= t <= T_MAX:
        raise DomainError(f"month {t} is outside the study calendar 0..{T_MAX}")


class Flag(str, enum.Enum):
    OBSERVED = "observed"
    INTERPOLATED = "interpolated"
    IMPUTED = "imputed"


@dataclass(frozen=True)
class MonthlySeries:
    """One value per consecutive month starting at ``start``.

    A value of ``None`` marks a gap (an undefined month, e.g. a ratio with a
    zero denominator or the warm-up of a moving average).
    """

    start: MonthIndex
    values: tuple[Optional[float], ...]
    flags: tuple[Flag, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(None if v is None else float(v) for v in self.values))
        object.__setattr__(self, "flags", tuple(Flag(f) for f in self.flags))
        if len(self.values) != len(self.flags):
            raise DomainError("values and flags must have equal length")
        if self.values:
            check_in_calendar(self.start)
            check_in_calendar(self.end)
        for i, v in enumerate(self.values):
            if v is not None and not (math.isfinite(v) and v >= 0):
                raise DomainError(f"value at {format_month(self.start + i)} must be finite and >= 0, got {v}")

    @classmethod
    def from_values(
        cls, values: Iterable[Optional[float]], start: MonthIndex = 0, flag: Flag = Flag.OBSERVED
    ) -> "MonthlySeries":
        vals = tuple(values)
        return cls(start, vals, (flag,) * len(vals))

    @property
    def end(self) -> MonthIndex:
        """Last month covered (inclusive)."""
        return self.start + len(self.values) - 1

    @property
    def months(self) -> range:
        return range(self.start, self.start + len(self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __contains__(self, t: object) -> bool:
        return isinstance(t, int) and self.start <= t <= self.end

    def at(self, t: MonthIndex) -> Optional[float]:
        if t not in self:
            raise KeyError(t)
        return self.values[t - self.start]

    def window(self, first: MonthIndex, last: MonthIndex) -> list[Optional[float]]:
        """Values for months ``first..last`` inclusive; raises KeyError if clipped."""
        if first not in self or last not in self:
            raise KeyError((first, last))
        return list(self.values[first - self.start : last - self.start + 1])

    def defined(self) -> list[tuple[MonthIndex, float]]:
        return [(self.start + i, v) for i, v in enumerate(self.values) if v is not None]


def _parse_lags(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(p) for p in text.split(",") if p.strip())


@dataclass(frozen=True)
class PipelineConfig:
    alpha: float = 0.8
    theta: float = 1.75
    gamma0: float = 0.8
    Y: float = 1.0
    mega_threshold: float = 10_000_000
    pre_window: int = 6
    post_window: int = 6
    lags: tuple[int, ...] = field(default=tuple(range(9)))
    consolidation_gap: int = 3
    baseline_T_years: int = 14

    def __post_init__(self) -> None:
        object.__setattr__(self, "lags", tuple(int(x) for x in self.lags))
        if not 0 < self.alpha < 1:
            raise DomainError(f"alpha must be in (0, 1), got {self.alpha}")
        if self.theta < 1:
            raise DomainError(f"theta must be >= 1, got {self.theta}")
        if not 0 < self.gamma0 <= 1:
            raise DomainError(f"gamma0 must be in (0, 1], got {self.gamma0}")
        if self.Y < 1:
            raise DomainError(f"Y must be >= 1, got {self.Y}")
        if self.mega_threshold <= 0:
            raise DomainError("mega_threshold must be positive")
        if self.pre_window < 1 or self.post_window < 1:
            raise DomainError("windows must be at least one month")
        if self.consolidation_gap < 0:
            raise DomainError("consolidation_gap must be non-negative")
        if self.baseline_T_years < 1:
            raise DomainError("baseline_T_years must be >= 1")
        if not self.lags or any(lag < 0 for lag in self.lags):
            raise DomainError("lags must be a non-empty set of non-negative integers")

    @classmethod
    def from_mapping(cls, items: dict[str, str]) -> "PipelineConfig":
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(items) - set(known))
        if unknown:
            raise DomainError(f"unknown config key(s): {', '.join(unknown)}")
        kwargs: dict = {}
        for key, raw in items.items():
            default = known[key].default if key != "lags" else ()
            try:
                if key == "lags":
                    kwargs[key] = _parse_lags(str(raw))
                elif isinstance(default, int) and not isinstance(default, bool) and key != "mega_threshold":
                    kwargs[key] = int(raw)
                else:
                    kwargs[key] = float(raw)
            except ValueError as exc:
                raise DomainError(f"config key {key!r}: cannot parse {raw!r}") from exc
        return cls(**kwargs)

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        """Read a flat ``key = value`` file (``#`` comments, blank lines ignored)."""
        items: dict[str, str] = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (p.strip() for p in line.split("=", 1))
            if key in items:
                raise DomainError(f"{path}:{lineno}: duplicate key {key!r}")
            items[key] = value
        return cls.from_mapping(items)

    def as_dict(self) -> dict:
        return {f.name: (list(getattr(self, f.name)) if f.name == "lags" else getattr(self, f.name)) for f in fields(self)}

