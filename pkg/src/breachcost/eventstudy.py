"""Mega-breach event study.

Months holding at least one breach above the mega threshold are clustered
into independent events. For each discovery lag, every event contributes one
pair: the median victim count of the six months before ``T0`` and the median
of the six months starting at ``T0 + lag``. A one-sided Wilcoxon signed-rank
test then asks whether the post-breach medians are higher.
"""

from __future__ import annotations

import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .core import BreachCostError, MonthIndex, MonthlySeries, PipelineConfig, format_month, parse_month

log = logging.getLogger(__name__)

EXACT_MAX_N = 25


class DegenerateSampleError(BreachCostError, ValueError):
    pass


@dataclass(frozen=True)
class MegaEvent:
    T0: MonthIndex
    member_months: tuple[MonthIndex, ...]
    total_records: float = 0.0

    def __post_init__(self) -> None:
        if list(self.member_months) != sorted(self.member_months) or self.T0 != self.member_months[0]:
            raise ValueError("member months must be sorted and start at T0")


@dataclass(frozen=True)
class EventWindowPair:
    event: MegaEvent
    lag: int
    pre_values: tuple[float, ...]
    post_values: tuple[float, ...]

    @property
    def pre_median(self) -> float:
        return statistics.median(self.pre_values)

    @property
    def post_median(self) -> float:
        return statistics.median(self.post_values)

    @property
    def delta(self) -> float:
        return self.post_median - self.pre_median


@dataclass(frozen=True)
class EventStudyResult:
    lag: int
    n_events: int
    W_plus: Optional[float]
    p_value: Optional[float]
    mean_delta: Optional[float]
    deltas: tuple[float, ...]
    event_months: tuple[MonthIndex, ...] = ()
    diagnostic: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "lag": self.lag,
            "n": self.n_events,
            "W": self.W_plus,
            "p": self.p_value,
            "mean_delta": self.mean_delta,
            "deltas": list(self.deltas),
            "events": [format_month(t) for t in self.event_months],
            "diagnostic": self.diagnostic,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EventStudyResult":
        return cls(
            lag=d["lag"],
            n_events=d["n"],
            W_plus=d.get("W"),
            p_value=d.get("p"),
            mean_delta=d.get("mean_delta"),
            deltas=tuple(d.get("deltas", ())),
            event_months=tuple(parse_month(m) for m in d.get("events", ())),
            diagnostic=d.get("diagnostic"),
        )


def detect_mega(events: Iterable, threshold: float = 10_000_000) -> list[MonthIndex]:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return sorted({ev.month for ev in events if ev.records is not None and ev.records >= threshold})


def consolidate(
    months: Sequence[MonthIndex], gap: int = 3, rule: str = "chain", records: Optional[dict] = None
) -> list[MegaEvent]:
    """Group sorted months into clusters.

    ``rule="chain"`` joins a month to the open cluster when it is within
    ``gap`` months of the cluster's latest member. ``rule="anchor"`` measures
    the distance from the cluster's first month instead, so clusters never
    span more than ``gap + 1`` months.
    """
    if rule not in ("chain", "anchor"):
        raise ValueError(f"unknown consolidation rule {rule!r}")
    if list(months) != sorted(months):
        raise ValueError("months must be sorted")
    records = records or {}
    clusters: list[list[MonthIndex]] = []
    for t in months:
        if clusters:
            ref = clusters[-1][-1] if rule == "chain" else clusters[-1][0]
            if t - ref <= gap:
                if t != clusters[-1][-1]:
                    clusters[-1].append(t)
                continue
        clusters.append([t])
    return [MegaEvent(c[0], tuple(c), float(sum(records.get(t, 0.0) for t in c))) for c in clusters]


# ------------------------------------------------------------------ Wilcoxon


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        r = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = r
        i = j + 1
    return ranks


def _exact_upper_tail(doubled: Sequence[int], observed: int) -> float:
    """P(S >= observed) where S sums a random subset of ``doubled`` (fair coin per item)."""
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    top = 0
    for r in doubled:
        for s in range(top, -1, -1):
            if counts[s]:
                counts[s + r] += counts[s]
        top += r
    hits = sum(counts[observed:])
    return hits / 2 ** len(doubled)


def wilcoxon_signed_rank(
    pre: Sequence[float], post: Sequence[float], alternative: str = "greater"
) -> tuple[float, float]:
    """One-sided Wilcoxon signed-rank test of ``post - pre``.

    Zero differences are dropped and tied magnitudes get midranks. For up to
    25 non-zero differences the p-value is exact, ``P(W+ >= observed)`` under
    all equally likely sign assignments; above that a normal approximation
    with tie-corrected variance and continuity correction is used.

    Returns:
        ``(W_plus, p_value)``.
    """
    if len(pre) != len(post) or not pre:
        raise ValueError("pre and post must have the same non-zero length")
    if alternative not in ("greater", "less"):
        raise ValueError(f"unsupported alternative {alternative!r}")
    d = [b - a for a, b in zip(pre, post)]
    d = [x for x in d if x != 0]
    if not d:
        raise DegenerateSampleError("degenerate sample: all differences are zero")
    ranks = _midranks([abs(x) for x in d])
    w_plus = math.fsum(r for r, x in zip(ranks, d) if x > 0)
    n = len(d)
    stat = w_plus if alternative == "greater" else n * (n + 1) / 2 - w_plus

    if n <= EXACT_MAX_N:
        doubled = [round(2 * r) for r in ranks]
        p = _exact_upper_tail(doubled, round(2 * stat))
    else:
        mean = n * (n + 1) / 4
        ties: dict[float, int] = {}
        for r in ranks:
            ties[r] = ties.get(r, 0) + 1
        var = n * (n + 1) * (2 * n + 1) / 24 - sum(t**3 - t for t in ties.values()) / 48
        z = (stat - mean - 0.5) / math.sqrt(var)
        p = 0.5 * math.erfc(z / math.sqrt(2))
    return w_plus, min(max(p, 0.0), 1.0)


# ---------------------------------------------------------------- lag sweep


def window_pair(
    event: MegaEvent, victims: MonthlySeries, lag: int, pre_window: int = 6, post_window: int = 6
) -> Optional[EventWindowPair]:
    """Pre/post windows for one event, or ``None`` when a window leaves the series."""
    try:
        pre = victims.window(event.T0 - pre_window, event.T0 - 1)
        post = victims.window(event.T0 + lag, event.T0 + lag + post_window - 1)
    except KeyError:
        return None
    if any(v is None for v in pre) or any(v is None for v in post):
        return None
    return EventWindowPair(event, lag, tuple(pre), tuple(post))  # type: ignore[arg-type]


def _one_lag(events: Sequence[MegaEvent], victims: MonthlySeries, lag: int, pre_window: int, post_window: int) -> EventStudyResult:
    pairs = []
    for ev in events:
        pair = window_pair(ev, victims, lag, pre_window, post_window)
        if pair is None:
            log.info("lag %d: event %s excluded (window outside series)", lag, format_month(ev.T0))
        else:
            pairs.append(pair)
    deltas = tuple(p.delta for p in pairs)
    months = tuple(p.event.T0 for p in pairs)
    mean_delta = statistics.fmean(deltas) if deltas else None
    if len(pairs) < 2:
        return EventStudyResult(lag, len(pairs), None, None, mean_delta, deltas, months,
                                f"only {len(pairs)} usable event(s)")
    try:
        w, p = wilcoxon_signed_rank([x.pre_median for x in pairs], [x.post_median for x in pairs])
    except DegenerateSampleError as exc:
        return EventStudyResult(lag, len(pairs), None, None, mean_delta, deltas, months, str(exc))
    return EventStudyResult(lag, len(pairs), w, p, mean_delta, deltas, months)


def lag_sweep(
    events: Sequence[MegaEvent],
    victims: MonthlySeries,
    lags: Iterable[int] = range(9),
    pre_window: int = 6,
    post_window: int = 6,
    workers: int = 1,
) -> list[EventStudyResult]:
    lags = list(lags)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(lambda lag: _one_lag(events, victims, lag, pre_window, post_window), lags))
    return [_one_lag(events, victims, lag, pre_window, post_window) for lag in lags]


def mega_events(events: Iterable, config: PipelineConfig = PipelineConfig()) -> list[MegaEvent]:
    events = list(events)
    months = detect_mega(events, config.mega_threshold)
    per_month: dict[int, float] = {}
    for ev in events:
        if ev.records is not None and ev.records >= config.mega_threshold:
            per_month[ev.month] = per_month.get(ev.month, 0.0) + ev.records
    return consolidate(months, config.consolidation_gap, "chain", per_month)


def placebo_events(
    events: Iterable, victims: MonthlySeries, config: PipelineConfig = PipelineConfig(), rule: str = "anchor"
) -> list[MegaEvent]:
    """Pseudo-events drawn from the months of ``victims`` that hold no mega breach."""
    mega = set(detect_mega(events, config.mega_threshold))
    months = [t for t in victims.months if t not in mega]
    return consolidate(months, config.consolidation_gap, rule)


def placebo_sweep(
    events_all: Iterable, victims: MonthlySeries, config: PipelineConfig = PipelineConfig(), rule: str = "anchor"
) -> list[EventStudyResult]:
    pseudo = placebo_events(events_all, victims, config, rule)
    return lag_sweep(pseudo, victims, config.lags, config.pre_window, config.post_window)


def lower_bound_cost(delta_per_month: float, window_months: int, per_victim_cost: float) -> float:
    """Short-term social cost: monthly victim increase x window length x cost per victim."""
    if delta_per_month < 0 or window_months < 0 or per_victim_cost < 0:
        raise ValueError("lower bound inputs must be non-negative")
    return delta_per_month * window_months * per_victim_cost


def event_delta(results: Sequence[EventStudyResult], month: MonthIndex, lag: int = 2, max_distance: int = 3) -> Optional[float]:
    """Per-event delta at ``lag`` for the event whose ``T0`` is nearest ``month``."""
    for res in results:
        if res.lag != lag:
            continue
        best = None
        for t0, d in zip(res.event_months, res.deltas):
            dist = abs(t0 - month)
            if dist <= max_distance and (best is None or dist < best[0]):
                best = (dist, d)
        return None if best is None else best[1]
    return None
