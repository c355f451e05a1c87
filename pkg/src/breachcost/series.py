"""Monthly series arithmetic used by the conversion model."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import T_MAX, DomainError, Flag, MonthIndex, MonthlySeries, check_in_calendar

PER_RECORDS = 100_000


@dataclass(frozen=True)
class AnchorPoint:
    t: MonthIndex
    value: float

    def __post_init__(self) -> None:
        if not self.value > 0:
            raise DomainError(f"anchor value must be positive (t={self.t}, value={self.value})")


def log_linear_interpolate(
    anchors: Sequence[AnchorPoint], t_start: MonthIndex = 0, t_end: MonthIndex = T_MAX
) -> MonthlySeries:
    """Fill the months between anchors by interpolating ``ln(value)`` linearly.

    Anchor months are flagged observed and keep their exact value. Months
    before the first/after the last anchor repeat the nearest anchor value and
    are flagged interpolated.
    """
    if len(anchors) < 2:
        raise DomainError("log-linear interpolation needs at least two anchors")
    for a, b in zip(anchors, anchors[1:]):
        if b.t <= a.t:
            raise DomainError(f"anchors must be strictly increasing in t ({a.t} then {b.t})")
    check_in_calendar(t_start)
    check_in_calendar(t_end)
    if t_end < t_start:
        raise DomainError("empty interpolation range")

    exact = {a.t: a.value for a in anchors}
    values: list[float] = []
    flags: list[Flag] = []
    seg = 0
    for t in range(t_start, t_end + 1):
        if t in exact:
            values.append(exact[t])
            flags.append(Flag.OBSERVED)
            continue
        flags.append(Flag.INTERPOLATED)
        if t < anchors[0].t:
            values.append(anchors[0].value)
            continue
        if t > anchors[-1].t:
            values.append(anchors[-1].value)
            continue
        while anchors[seg + 1].t < t:
            seg += 1
        lo, hi = anchors[seg], anchors[seg + 1]
        w = (t - lo.t) / (hi.t - lo.t)
        values.append(lo.value * math.exp(w * math.log(hi.value / lo.value)))
    return MonthlySeries(t_start, tuple(values), tuple(flags))


def discounted_pool(M: MonthlySeries, alpha: float) -> MonthlySeries:
    """``D_t = alpha * D_{t-1} + M_t``, the running form of ``sum_k alpha^(t-k) M_k``."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    out: list[float] = []
    d = 0.0
    for i, m in enumerate(M.values):
        if m is None:
            raise DomainError(f"record series has a gap at month {M.start + i}")
        d = alpha * d + m
        out.append(d)
    return MonthlySeries(M.start, tuple(out), M.flags)


def conversion_rate(victims: MonthlySeries, D: MonthlySeries) -> MonthlySeries:
    """Victims per 100,000 discounted records; months with ``D_t = 0`` become gaps."""
    if victims.start != D.start or len(victims) != len(D):
        raise DomainError("victim and pool series must be aligned")
    out: list[Optional[float]] = []
    for v, d in zip(victims.values, D.values):
        if v is None or d is None or d == 0:
            out.append(None)
        else:
            out.append(v / d * PER_RECORDS)
    return MonthlySeries(victims.start, tuple(out), victims.flags)


def moving_average(s: MonthlySeries, window: int) -> MonthlySeries:
    """Trailing mean over the last ``window`` months.

    The first ``window - 1`` months, and any window that touches a gap, are
    emitted as gaps.
    """
    if window < 1:
        raise DomainError("window must be >= 1")
    if window > len(s):
        raise DomainError(f"window {window} exceeds series length {len(s)}")
    out: list[Optional[float]] = []
    for i in range(len(s)):
        if i < window - 1:
            out.append(None)
            continue
        chunk = s.values[i - window + 1 : i + 1]
        out.append(None if any(v is None for v in chunk) else math.fsum(chunk) / window)  # type: ignore[arg-type]
    return MonthlySeries(s.start, tuple(out), s.flags)


def monthly_records(events: Iterable, t_start: MonthIndex = 0, t_end: MonthIndex = T_MAX) -> MonthlySeries:
    """Sum event record counts per month.

    Undisclosed events contribute nothing. A month is flagged imputed when any
    contributing count was imputed.
    """
    n = t_end - t_start + 1
    totals = [0.0] * n
    imputed = [False] * n
    for ev in events:
        if ev.records is None or not t_start <= ev.month <= t_end:
            continue
        totals[ev.month - t_start] += ev.records
        if ev.flag is Flag.IMPUTED:
            imputed[ev.month - t_start] = True
    flags = tuple(Flag.IMPUTED if x else Flag.OBSERVED for x in imputed)
    return MonthlySeries(t_start, tuple(totals), flags)

