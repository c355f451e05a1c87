"""Recovery of missing national record counts.

Two stages: a state-to-national regression that converts state resident
counts into national record estimates, then a flat annual baseline volume
spread evenly over the breaches whose counts remain undisclosed.
"""

from __future__ import annotations

import logging
import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import BreachCostError, DomainError, Flag, year_of
from .ingest import BreachEvent, MatchedPair, StateFiling

log = logging.getLogger(__name__)


class InsufficientDataError(BreachCostError, ValueError):
    pass


@dataclass(frozen=True)
class OlsSlope:
    slope: float
    n_pairs: int
    residual_sum_squares: float
    intercept: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.slope):
            raise DomainError("slope must be finite")
        if self.n_pairs < 2:
            raise DomainError("a slope needs at least two pairs")


def _xy(p: Union[MatchedPair, tuple[float, float]]) -> tuple[float, float]:
    if isinstance(p, MatchedPair):
        return float(p.state_residents), float(p.national_records)
    x, y = p
    return float(x), float(y)


def fit_state_national(pairs: Sequence[Union[MatchedPair, tuple[float, float]]], intercept: bool = False) -> OlsSlope:
    """Least-squares fit of national records on state residents.

    Fits through the origin (``Y = beta * X``) by default. With
    ``intercept=True`` an ordinary intercept is added, for sensitivity runs.
    ``pairs`` may hold MatchedPairs or plain ``(x, y)`` tuples; the ratio
    filter is applied when MatchedPairs are built, not here.
    """
    if len(pairs) < 2:
        raise InsufficientDataError(f"need at least 2 matched pairs, got {len(pairs)}")
    xs, ys = (list(c) for c in zip(*(_xy(p) for p in pairs)))
    if intercept:
        mx, my = statistics.fmean(xs), statistics.fmean(ys)
        sxx = math.fsum((x - mx) ** 2 for x in xs)
        if sxx == 0:
            raise DomainError("degenerate regression: all state counts are equal")
        slope = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys)) / sxx
        icept = my - slope * mx
    else:
        sxx = math.fsum(x * x for x in xs)
        if sxx == 0:
            raise DomainError("degenerate regression: all state counts are zero")
        slope = math.fsum(x * y for x, y in zip(xs, ys)) / sxx
        icept = 0.0
    rss = math.fsum((y - icept - slope * x) ** 2 for x, y in zip(xs, ys))
    return OlsSlope(slope=slope, n_pairs=len(pairs), residual_sum_squares=rss, intercept=icept)


def estimate_national(state_residents: int, slope: OlsSlope) -> float:
    return slope.intercept + slope.slope * state_residents


def apply_state_estimates(
    events: Iterable[BreachEvent],
    slope: OlsSlope,
    pending: Iterable[tuple[BreachEvent, StateFiling]] = (),
) -> list[BreachEvent]:
    """Fill undisclosed counts from state resident numbers.

    An event is estimated when it carries ``state_residents`` (additions from
    state filings) or appears in ``pending``. Estimates are flagged imputed.
    """
    residents = {ev.event_id: f.state_residents for ev, f in pending}
    out = []
    for ev in events:
        n = ev.state_residents if ev.state_residents is not None else residents.get(ev.event_id)
        if ev.records is None and n is not None:
            ev = replace(
                ev,
                records=max(estimate_national(n, slope), 0.0),
                flag=Flag.IMPUTED,
                imputation="ols",
                state_residents=n,
            )
        out.append(ev)
    return out


def category_median_weights(events: Iterable[BreachEvent]) -> dict[str, float]:
    """Median observed record count per breach category.

    Only counts flagged observed are used; estimated or imputed counts are not
    "known" sizes. Categories with no observed count are left out.
    """
    by_cat: dict[str, list[float]] = defaultdict(list)
    for ev in events:
        if ev.records is not None and ev.flag is Flag.OBSERVED:
            by_cat[ev.category].append(ev.records)
    return {cat: float(statistics.median(vals)) for cat, vals in sorted(by_cat.items())}


def undisclosed_counts(events: Iterable[BreachEvent]) -> dict[str, int]:
    return dict(sorted(Counter(ev.category for ev in events if ev.records is None).items()))


@dataclass(frozen=True)
class ImputationBaseline:
    category_weights: Mapping[str, float]
    category_counts: Mapping[str, int]
    n_u: float
    T_years: int

    def recompute(self) -> float:
        return math.fsum(self.category_counts[j] * self.category_weights[j] for j in self.category_counts) / self.T_years

    def to_dict(self) -> dict:
        return {
            "W_j": dict(self.category_weights),
            "l_j": dict(self.category_counts),
            "n_u": self.n_u,
            "T_years": self.T_years,
        }


def annual_baseline(l_j: Mapping[str, int], W_j: Mapping[str, float], T_years: int) -> ImputationBaseline:
    """Annual undisclosed volume ``n_u = sum_j(l_j * W_j) / T``."""
    if T_years < 1:
        raise DomainError(f"T_years must be >= 1, got {T_years}")
    missing = sorted(set(l_j) - set(W_j))
    if missing:
        raise DomainError(f"no median weight for undisclosed category: {', '.join(missing)}")
    base = ImputationBaseline(dict(W_j), dict(l_j), 0.0, T_years)
    return replace(base, n_u=base.recompute())


def impute_undisclosed(events: Sequence[BreachEvent], baseline: ImputationBaseline) -> list[BreachEvent]:
    """Give every undisclosed event in year ``y`` the share ``n_u / |I_{u,y}|``."""
    if baseline.n_u < 0:
        raise DomainError("n_u must be non-negative")
    per_year = Counter(year_of(ev.month) for ev in events if ev.records is None)
    out = []
    for ev in events:
        if ev.records is None:
            share = baseline.n_u / per_year[year_of(ev.month)]
            ev = replace(ev, records=share, flag=Flag.IMPUTED, imputation="baseline")
        out.append(ev)
    for year, n in sorted(per_year.items()):
        log.debug("year %d: %d undisclosed events, %.2f records each", year, n, baseline.n_u / n)
    return out


@dataclass(frozen=True)
class AugmentAudit:
    slope: Optional[OlsSlope]
    baseline: ImputationBaseline
    n_events: int
    n_ols_estimated: int
    n_baseline_imputed: int
    undisclosed_per_year: Mapping[int, int]

    def to_dict(self) -> dict:
        return {
            "slope": None if self.slope is None else self.slope.slope,
            "intercept": None if self.slope is None else self.slope.intercept,
            "pair_count": 0 if self.slope is None else self.slope.n_pairs,
            "residual_sum_squares": None if self.slope is None else self.slope.residual_sum_squares,
            **self.baseline.to_dict(),
            "n_events": self.n_events,
            "n_ols_estimated": self.n_ols_estimated,
            "n_baseline_imputed": self.n_baseline_imputed,
            "undisclosed_per_year": {str(k): v for k, v in sorted(self.undisclosed_per_year.items())},
        }


def augment_events(
    events: Sequence[BreachEvent],
    pairs: Sequence[MatchedPair] = (),
    pending: Sequence[tuple[BreachEvent, StateFiling]] = (),
    T_years: int = 14,
    intercept: bool = False,
) -> tuple[list[BreachEvent], AugmentAudit]:
    """Run both recovery stages and return the completed events plus an audit block."""
    slope = None
    if len(pairs) >= 2:
        slope = fit_state_national(pairs, intercept=intercept)
        events = apply_state_estimates(events, slope, pending)
    else:
        log.warning("only %d matched pairs; skipping state-to-national estimation", len(pairs))
    n_ols = sum(1 for ev in events if ev.imputation == "ols")
    weights = category_median_weights(events)
    counts = undisclosed_counts(events)
    baseline = annual_baseline(counts, weights, T_years)
    per_year = dict(sorted(Counter(year_of(ev.month) for ev in events if ev.records is None).items()))
    done = impute_undisclosed(events, baseline)
    log.info("n_u = %.1f records/year from %d undisclosed events", baseline.n_u, sum(counts.values()))
    audit = AugmentAudit(slope, baseline, len(done), n_ols, sum(counts.values()), per_year)
    return done, audit
