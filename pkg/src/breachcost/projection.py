"""Long-horizon projections: conversion-rate trend, upper-bound cost, saturation.

The conversion trend is ``ln(C_t) = a*t^2 + b*t + c``. A breach of ``B``
records in month ``t`` keeps ``B * alpha^(k - t)`` fresh records in month
``k``; the victims it yields that month are those records times
``C_k / 100,000``. Summing from ``t + 2`` to the end of the calendar gives the
projected victims, and weighting each month by the per-victim cost ``S_k``
gives the upper-bound social cost.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import T_MAX, DomainError, MonthIndex, MonthlySeries, PipelineConfig, format_month, parse_month, year_of
from .series import PER_RECORDS

log = logging.getLogger(__name__)

DISCOVERY_LAG = 2


@dataclass(frozen=True)
class ConversionFit:
    a: float
    b: float
    c: float
    fit_window: tuple[MonthIndex, MonthIndex] = (0, T_MAX)
    n_points: int = 0
    rmse: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(x) for x in (self.a, self.b, self.c)):
            raise DomainError("fit coefficients must be finite")

    def log_rate(self, t: float) -> float:
        return self.a * t * t + self.b * t + self.c

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "c": self.c,
            "fit_window": [format_month(self.fit_window[0]), format_month(self.fit_window[1])],
            "n_points": self.n_points,
            "rmse_log": self.rmse,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ConversionFit":
        window = d.get("fit_window")
        win = (parse_month(window[0]), parse_month(window[1])) if window else (0, T_MAX)
        return cls(float(d["a"]), float(d["b"]), float(d["c"]), win, int(d.get("n_points", 0)), float(d.get("rmse_log", 0.0)))


# Coefficients as printed for the 2008-2021 study series.
PRINTED_FIT = ConversionFit(a=1.41e-4, b=-5.15e-2, c=11.49)


def fit_log_quadratic(C_ma: MonthlySeries) -> ConversionFit:
    """Least-squares fit of ``ln(C_t)`` on ``[1, t, t^2]``; gaps are skipped.

    The normal equations are solved in a centred, scaled time variable and the
    result re-expanded to raw-``t`` coefficients.
    """
    pts = C_ma.defined()
    if len(pts) < 3:
        raise DomainError(f"need at least 3 defined points to fit, got {len(pts)}")
    for t, v in pts:
        if v <= 0:
            raise DomainError(f"non-positive conversion rate at {format_month(t)}")
    t = np.array([p[0] for p in pts], dtype=float)
    y = np.log(np.array([p[1] for p in pts], dtype=float))
    m = t.mean()
    s = max((t.max() - t.min()) / 2, 1.0)
    u = (t - m) / s
    X = np.column_stack([np.ones_like(u), u, u * u])
    beta = np.linalg.solve(X.T @ X, X.T @ y)
    b0, b1, b2 = beta
    # b0 + b1 (t-m)/s + b2 (t-m)^2/s^2, expanded in powers of t
    a = b2 / s**2
    b = b1 / s - 2 * b2 * m / s**2
    c = b0 - b1 * m / s + b2 * m * m / s**2
    resid = y - X @ beta
    return ConversionFit(
        float(a), float(b), float(c),
        fit_window=(int(t.min()), int(t.max())),
        n_points=len(pts),
        rmse=float(np.sqrt(np.mean(resid**2))),
    )


def eval_conversion(fit: ConversionFit, t: MonthIndex) -> float:
    """Victims per 100,000 discounted records in month ``t``."""
    return math.exp(fit.log_rate(t))


def _yield_terms(B: float, t: MonthIndex, alpha: float, fit: ConversionFit, T_end: int) -> list[tuple[int, float]]:
    if B < 0:
        raise DomainError("breach size must be non-negative")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must be in (0, 1), got {alpha}")
    if T_end > T_MAX:
        raise DomainError(f"projection horizon ends at {T_MAX}")
    first = t + DISCOVERY_LAG
    if first > T_end:
        log.warning("breach at %s: empty projection horizon", format_month(t))
        return []
    return [(k, B * alpha ** (k - t) * eval_conversion(fit, k) / PER_RECORDS) for k in range(first, T_end + 1)]


def project_victims(B: float, t: MonthIndex, alpha: float, fit: ConversionFit, T_end: int = T_MAX) -> float:
    return math.fsum(v for _, v in _yield_terms(B, t, alpha, fit, T_end))


def upper_bound_cost(
    B: float, t: MonthIndex, alpha: float, fit: ConversionFit, S: MonthlySeries, T_end: int = T_MAX
) -> float:
    terms = _yield_terms(B, t, alpha, fit, T_end)
    total = []
    for k, v in terms:
        s = S.at(k) if k in S else None
        if s is None:
            raise DomainError(f"social cost series undefined at {format_month(k)}")
        total.append(v * s)
    return math.fsum(total)


# ------------------------------------------------------------- saturation

# Largest saturation index kept, so 1 - mu stays positive in floating point.
_MU_CAP = 1.0 - 2.0**-53


def _newly_hit(x: float) -> float:
    """Fraction of the surviving pool hit by exponent ``x``: ``1 - exp(-x)`` without cancellation."""
    return -math.expm1(-x)


def saturation_step(
    mu_prev: float, r_t: float, N_t: float, theta: float = 1.75, gamma0: float = 0.8, Y: float = 1.0
) -> tuple[float, float]:
    """One update of the saturation index. Returns ``(mu_t, c_t)``."""
    if not 0 <= mu_prev < 1:
        raise DomainError(f"mu_prev must be in [0, 1), got {mu_prev}")
    if r_t < 0 or N_t <= 0:
        raise DomainError("r_t must be >= 0 and N_t > 0")
    gain = (1 - mu_prev) * _newly_hit(theta * r_t * gamma0 / (N_t * Y))
    return min(mu_prev + gain, _MU_CAP), gain * N_t * Y


@dataclass
class SaturationState:
    mu: float = 0.0
    C_cum: float = 0.0
    history: list[tuple[float, float]] = field(default_factory=list)


def run_saturation(
    r: Sequence[float], N: Sequence[float], config: PipelineConfig = PipelineConfig()
) -> SaturationState:
    """Fold the saturation update over aligned record and population sequences.

    ``1 - mu_t`` equals ``exp(-S_t)`` where ``S_t`` sums the per-period
    exponents. ``S_t`` is kept with ``math.fsum``, which rounds correctly, so
    under constant population any reordering of the periods gives a
    bit-identical final index. ``c_t`` is computed from the surviving pool
    directly rather than by differencing ``mu``, which would cancel badly for
    small exposures.
    """
    if len(r) != len(N):
        raise DomainError("record and population sequences must align")
    state = SaturationState()
    exponents: list[float] = []
    survival = 1.0
    for r_t, n_t in zip(r, N):
        if r_t < 0 or n_t <= 0:
            raise DomainError("r_t must be >= 0 and N_t > 0")
        x = config.theta * r_t * config.gamma0 / (n_t * config.Y)
        exponents.append(x)
        total = math.fsum(exponents)
        mu = max(min(_newly_hit(total), _MU_CAP), state.mu)
        c = survival * _newly_hit(x) * n_t * config.Y
        survival = math.exp(-total)
        state.mu = mu
        state.C_cum += c
        state.history.append((c, mu))
    return state


def monthly_population(months: Sequence[MonthIndex], annual: Mapping[int, float]) -> list[float]:
    """Population for each month, taken from that calendar year's average."""
    out = []
    for t in months:
        y = year_of(t)
        if y not in annual:
            raise DomainError(f"no population value for {y}")
        out.append(annual[y])
    return out


def annualize(series: MonthlySeries) -> tuple[list[int], list[float]]:
    totals: dict[int, float] = {}
    for t, v in series.defined():
        totals[year_of(t)] = totals.get(year_of(t), 0.0) + v
    years = sorted(totals)
    return years, [totals[y] for y in years]


def case_study(
    B: float,
    t: MonthIndex,
    fit: ConversionFit,
    S: MonthlySeries,
    alpha: float = 0.8,
    T_end: int = T_MAX,
) -> dict:
    victims = project_victims(B, t, alpha, fit, T_end)
    upper = upper_bound_cost(B, t, alpha, fit, S, T_end)
    return {
        "month": format_month(t),
        "t": t,
        "records": B,
        "conversion_rate_at_breach": eval_conversion(fit, t),
        "projected_victims": victims,
        "upper_bound": upper,
    }


def optional_ratio(value: Optional[float], settlement: Optional[float]) -> Optional[float]:
    return None if value is None or not settlement else value / settlement
