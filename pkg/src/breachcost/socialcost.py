"""Per-victim social cost of identity theft, in constant 2021 dollars.

A victim's cost is the sum of four averages: unrecovered out-of-pocket loss,
legal fees, time spent resolving the incident valued at the average private
hourly wage, and healthcare visits/medication. The national figure scales
the per-victim total by the weighted victim count of the survey year.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from dataclasses import asdict, dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

from .core import T_MAX, BreachCostError, DomainError, Flag, MonthIndex, MonthlySeries, month_index

BASE_YEAR = 2021

# Annual average CPI-U. 2023/2024 cover the source years of the service quotes.
DEFAULT_CPI: dict[int, float] = {
    2008: 215.297,
    2012: 233.165,
    2014: 236.736,
    2016: 240.007,
    2018: 251.107,
    2021: 270.970,
    2023: 304.702,
    2024: 313.689,
}

# Nominal average hourly earnings, private nonfarm employees.
DEFAULT_WAGES: dict[int, float] = {
    2008: 21.19,
    2012: 23.26,
    2014: 24.23,
    2016: 25.37,
    2018: 26.72,
    2021: 29.92,
}

SERVICES = ("lawyer", "doctor_visit", "therapy_session", "medication")


class LookupMissing(BreachCostError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0])


@dataclass(frozen=True)
class ServiceCost:
    nominal: float
    source_year: int

    def __post_init__(self) -> None:
        if not self.nominal > 0:
            raise DomainError("service cost must be positive")


ServiceCostConfig = Mapping[str, ServiceCost]

# Nominal quotes with their source years; these adjust to 444.65 / 86.38 / 86.38 / 53.96.
ITEMIZED_SERVICES: dict[str, ServiceCost] = {
    "lawyer": ServiceCost(500.0, 2023),
    "doctor_visit": ServiceCost(100.0, 2024),
    "therapy_session": ServiceCost(100.0, 2024),
    "medication": ServiceCost(50.0, 2018),
}

# Alternate preset: the rounded per-service figures quoted in the cost-model text, already in 2021 dollars.
QUOTED_SERVICES: dict[str, ServiceCost] = {
    "lawyer": ServiceCost(445.0, 2021),
    "doctor_visit": ServiceCost(133.0, 2021),
    "therapy_session": ServiceCost(89.0, 2021),
    "medication": ServiceCost(54.0, 2021),
}

SERVICE_PRESETS = {"itemized": ITEMIZED_SERVICES, "quoted": QUOTED_SERVICES}


def adjust_inflation(nominal: float, from_year: int, cpi: Mapping[int, float] = DEFAULT_CPI) -> float:
    """Convert ``nominal`` dollars of ``from_year`` into 2021 dollars."""
    for year in (from_year, BASE_YEAR):
        if year not in cpi:
            raise LookupMissing(f"no CPI value for year {year}")
    if from_year == BASE_YEAR:
        return float(nominal)
    return nominal * cpi[BASE_YEAR] / cpi[from_year]


def adjusted_services(services: ServiceCostConfig, cpi: Mapping[int, float] = DEFAULT_CPI) -> dict[str, float]:
    missing = [s for s in SERVICES if s not in services]
    if missing:
        raise LookupMissing(f"service cost missing for: {', '.join(missing)}")
    return {name: adjust_inflation(services[name].nominal, services[name].source_year, cpi) for name in SERVICES}


@dataclass(frozen=True)
class SurveyWaveAggregate:
    year: int
    total_weighted_victims: float
    avg_oop_nominal: float
    avg_hours: float
    lawyer_count: float
    doctor_count: float
    therapy_count: float
    medication_count: float
    unweighted_n: Optional[float] = None
    group: Optional[str] = None

    def __post_init__(self) -> None:
        if self.avg_hours < 0:
            raise DomainError(f"{self.year}: avg_hours must be >= 0")
        for name in ("lawyer_count", "doctor_count", "therapy_count", "medication_count", "total_weighted_victims"):
            if getattr(self, name) < 0:
                raise DomainError(f"{self.year}: {name} must be >= 0")

    def denominator(self, mode: str = "weighted") -> float:
        if mode == "weighted":
            return self.total_weighted_victims
        if mode == "unweighted":
            if self.unweighted_n is None:
                raise DomainError(f"{self.year}: unweighted mode needs unweighted_n")
            return float(self.unweighted_n)
        raise DomainError(f"unknown denominator mode {mode!r}")


@dataclass(frozen=True)
class CostTableRow:
    year: int
    total_weighted_victims: float
    avg_oop: float
    avg_legal: float
    avg_lost_time: float
    avg_healthcare: float
    total_per_victim: float
    total_national: float
    group: Optional[str] = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["group"] is None:
            del d["group"]
        return d


def cost_components(
    wave: SurveyWaveAggregate,
    cpi: Mapping[int, float] = DEFAULT_CPI,
    wages: Mapping[int, float] = DEFAULT_WAGES,
    services: ServiceCostConfig = ITEMIZED_SERVICES,
    denominator: str = "weighted",
) -> CostTableRow:
    denom = wave.denominator(denominator)
    users = (wave.lawyer_count, wave.doctor_count, wave.therapy_count, wave.medication_count)
    if denom == 0:
        if any(users):
            raise DomainError(f"{wave.year}: service users but zero denominator")
        if denominator == "weighted" and wave.avg_oop_nominal == 0 and wave.avg_hours == 0:
            return CostTableRow(wave.year, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, wave.group)
        raise DomainError(f"{wave.year}: denominator_victims is zero")
    if max(users) > denom:
        raise DomainError(f"{wave.year}: service user count exceeds denominator")
    if wave.year not in wages:
        raise LookupMissing(f"no wage for year {wave.year}")
    unit = adjusted_services(services, cpi)

    oop = adjust_inflation(wave.avg_oop_nominal, wave.year, cpi)
    legal = wave.lawyer_count * unit["lawyer"] / denom
    lost_time = wave.avg_hours * adjust_inflation(wages[wave.year], wave.year, cpi)
    health = (
        wave.doctor_count * unit["doctor_visit"]
        + wave.therapy_count * unit["therapy_session"]
        + wave.medication_count * unit["medication"]
    ) / denom
    per_victim = oop + legal + lost_time + health
    return CostTableRow(
        year=wave.year,
        total_weighted_victims=wave.total_weighted_victims,
        avg_oop=oop,
        avg_legal=legal,
        avg_lost_time=lost_time,
        avg_healthcare=health,
        total_per_victim=per_victim,
        total_national=national_total(per_victim, wave.total_weighted_victims),
        group=wave.group,
    )


def national_total(row_or_per_victim: Union[CostTableRow, float], weighted_victims: float) -> float:
    if weighted_victims < 0:
        raise DomainError("weighted_victims must be >= 0")
    per_victim = row_or_per_victim.total_per_victim if isinstance(row_or_per_victim, CostTableRow) else row_or_per_victim
    return per_victim * weighted_victims


def cost_table(
    waves: Iterable[SurveyWaveAggregate],
    cpi: Mapping[int, float] = DEFAULT_CPI,
    wages: Mapping[int, float] = DEFAULT_WAGES,
    services: ServiceCostConfig = ITEMIZED_SERVICES,
    denominator: str = "weighted",
) -> list[CostTableRow]:
    return [cost_components(w, cpi, wages, services, denominator) for w in waves]


def anchor_month(year: int, month: int = 6) -> MonthIndex:
    return month_index(year, month)


def interpolate_social_cost(rows: Sequence[CostTableRow], anchor: int = 6) -> MonthlySeries:
    """Monthly per-victim cost ``S_k`` over the whole study calendar.

    Each row's total is pinned at month ``anchor`` of its year; months between
    anchors are linear in ``t``, months outside the anchor span are flat.
    """
    if len(rows) < 2:
        raise DomainError("need at least two cost rows to interpolate")
    years = [r.year for r in rows]
    if len(set(years)) != len(years):
        raise DomainError("cost rows must have distinct years")
    pts = sorted((anchor_month(r.year, anchor), r.total_per_victim) for r in rows)
    exact = dict(pts)
    values, flags = [], []
    seg = 0
    for t in range(0, T_MAX + 1):
        if t in exact:
            values.append(exact[t])
            flags.append(Flag.OBSERVED)
            continue
        flags.append(Flag.INTERPOLATED)
        if t < pts[0][0]:
            values.append(pts[0][1])
        elif t > pts[-1][0]:
            values.append(pts[-1][1])
        else:
            while pts[seg + 1][0] < t:
                seg += 1
            (t0, v0), (t1, v1) = pts[seg], pts[seg + 1]
            values.append(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
    return MonthlySeries(0, tuple(values), tuple(flags))


def nearest_row(rows: Sequence[CostTableRow], t: MonthIndex, anchor: int = 6) -> CostTableRow:
    """Row whose mid-year anchor is closest to month ``t`` (earlier year on ties)."""
    if not rows:
        raise DomainError("no cost rows")
    return min(rows, key=lambda r: (abs(anchor_month(r.year, anchor) - t), r.year))


# ---------------------------------------------------------------- file I/O

SURVEY_HEADER = (
    "year", "total_weighted_victims", "avg_oop_nominal", "avg_hours", "lawyer_count",
    "doctor_count", "therapy_count", "medication_count", "unweighted_n",
)
COST_HEADER = (
    "year", "total_weighted_victims", "avg_oop", "avg_legal", "avg_lost_time",
    "avg_healthcare", "total_per_victim", "total_national",
)


def _dict_rows(text: str, required: Sequence[str], what: str) -> list[tuple[int, dict[str, str]]]:
    reader = csv.DictReader(io.StringIO(text))
    header = [h.strip() for h in (reader.fieldnames or [])]
    missing = [h for h in required if h not in header]
    if missing:
        raise DomainError(f"{what}: missing column(s) {', '.join(missing)}")
    return [(reader.line_num, {k.strip(): (v or "").strip() for k, v in row.items() if k}) for row in reader]


def _num(line: int, row: dict[str, str], key: str, what: str) -> float:
    try:
        v = float(row[key])
    except (KeyError, ValueError):
        raise DomainError(f"{what} line {line}: bad {key} {row.get(key)!r}") from None
    if not math.isfinite(v):
        raise DomainError(f"{what} line {line}: {key} must be finite")
    return v


def read_survey(text: str) -> list[SurveyWaveAggregate]:
    out = []
    for line, row in _dict_rows(text, SURVEY_HEADER[:-1], "survey.csv"):
        nums = {k: _num(line, row, k, "survey.csv") for k in SURVEY_HEADER[1:-1]}
        unweighted = _num(line, row, "unweighted_n", "survey.csv") if row.get("unweighted_n") else None
        out.append(
            SurveyWaveAggregate(
                year=int(_num(line, row, "year", "survey.csv")),
                unweighted_n=unweighted,
                group=row.get("group") or None,
                **nums,
            )
        )
    return out


def read_year_table(text: str, value_col: str, what: str) -> dict[int, float]:
    table = {}
    for line, row in _dict_rows(text, ("year", value_col), what):
        v = _num(line, row, value_col, what)
        if v <= 0:
            raise DomainError(f"{what} line {line}: {value_col} must be positive")
        table[int(_num(line, row, "year", what))] = v
    return table


def read_cpi(text: str) -> dict[int, float]:
    table = read_year_table(text, "cpi", "cpi.csv")
    if BASE_YEAR not in table:
        raise DomainError(f"cpi.csv must contain {BASE_YEAR}")
    return table


def read_wages(text: str) -> dict[int, float]:
    return read_year_table(text, "nominal_wage", "wages.csv")


def read_services(text: str) -> dict[str, ServiceCost]:
    """Parse an INI file with one ``[service]`` section holding ``nominal`` and ``source_year``.

    A bare ``preset = itemized|quoted`` in ``[DEFAULT]`` selects a built-in preset,
    which explicit sections then override.
    """
    parser = configparser.ConfigParser()
    parser.read_string(text)
    preset = parser.defaults().get("preset")
    if preset and preset not in SERVICE_PRESETS:
        raise DomainError(f"unknown services preset {preset!r}")
    base = dict(SERVICE_PRESETS[preset]) if preset else {}
    for section in parser.sections():
        if section not in SERVICES:
            raise DomainError(f"unknown service {section!r}; valid: {', '.join(SERVICES)}")
        try:
            base[section] = ServiceCost(parser.getfloat(section, "nominal"), parser.getint(section, "source_year"))
        except (configparser.Error, ValueError) as exc:
            raise DomainError(f"services [{section}]: {exc}") from None
    missing = [s for s in SERVICES if s not in base]
    if missing:
        raise DomainError(f"services config missing: {', '.join(missing)}")
    return base


def read_cost_rows(text: str) -> list[CostTableRow]:
    out = []
    for line, row in _dict_rows(text, COST_HEADER, "cost table"):
        nums = {k: _num(line, row, k, "cost table") for k in COST_HEADER[1:]}
        out.append(CostTableRow(year=int(_num(line, row, "year", "cost table")), group=row.get("group") or None, **nums))
    return out


def rows_from_json(items: Iterable[dict]) -> list[CostTableRow]:
    return [CostTableRow(**{k: item[k] for k in COST_HEADER + ("group",) if k in item}) for item in items]


def write_cost_csv(rows: Iterable[CostTableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    rows = list(rows)
    grouped = any(r.group is not None for r in rows)
    w.writerow(COST_HEADER + (("group",) if grouped else ()))
    for r in rows:
        w.writerow(
            [r.year, f"{r.total_weighted_victims:.0f}", f"{r.avg_oop:.2f}", f"{r.avg_legal:.2f}",
             f"{r.avg_lost_time:.2f}", f"{r.avg_healthcare:.2f}", f"{r.total_per_victim:.2f}",
             f"{r.total_national:.0f}"] + ([r.group or ""] if grouped else [])
        )
    return buf.getvalue()
