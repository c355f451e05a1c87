"""Readers and writers for the interchange formats, plus bundled fixtures."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from importlib import resources
from pathlib import Path
from typing import Iterable, Union

from .core import DomainError, Flag, MonthlySeries, PipelineConfig, format_month, parse_month
from .ingest import BreachEvent, quarter_to_month
from .series import AnchorPoint

PathLike = Union[str, Path]

_QUARTER_RE = re.compile(r"^(\d{4})-Q([1-4])$", re.IGNORECASE)


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fixture_path(name: str) -> Path:
    return Path(str(resources.files("breachcost") / "data" / name))


def fixture_text(name: str) -> str:
    return fixture_path(name).read_text(encoding="utf-8")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def parse_period(text: str) -> int:
    """``YYYY-MM`` or ``YYYY-Qn`` (mapped to the quarter's middle month)."""
    m = _QUARTER_RE.match(text.strip())
    if m:
        return quarter_to_month(int(m.group(1)), int(m.group(2)))
    return parse_month(text)


def read_series_csv(text: str) -> MonthlySeries:
    """Read ``month,value[,flag]`` rows covering consecutive months."""
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"month", "value"} <= set(reader.fieldnames):
        raise DomainError("series CSV needs month,value columns")
    months, values, flags = [], [], []
    for row in reader:
        months.append(parse_month(row["month"]))
        raw = (row["value"] or "").strip()
        values.append(None if raw == "" else float(raw))
        flags.append(Flag((row.get("flag") or "observed").strip()))
    if not months:
        raise DomainError("series CSV is empty")
    if months != list(range(months[0], months[0] + len(months))):
        raise DomainError("series months must be consecutive and ascending")
    return MonthlySeries(months[0], tuple(values), tuple(flags))


def write_series_csv(series: MonthlySeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["month", "value", "flag"])
    for t, v, f in zip(series.months, series.values, series.flags):
        w.writerow([format_month(t), "" if v is None else repr(v), f.value])
    return buf.getvalue()


def write_columns_csv(columns: dict[str, MonthlySeries]) -> str:
    """Several aligned series side by side, one row per month."""
    series = list(columns.values())
    start, n = series[0].start, len(series[0])
    if any(s.start != start or len(s) != n for s in series):
        raise DomainError("columns must be aligned")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["month", *columns])
    for i in range(n):
        w.writerow([format_month(start + i)] + ["" if s.values[i] is None else repr(s.values[i]) for s in series])
    return buf.getvalue()


def read_anchors_csv(text: str) -> list[AnchorPoint]:
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"month", "value"} <= set(reader.fieldnames):
        raise DomainError("anchors CSV needs month,value columns")
    return [AnchorPoint(parse_period(row["month"]), float(row["value"])) for row in reader]


def read_population_csv(text: str) -> dict[int, float]:
    reader = csv.DictReader(io.StringIO(text))
    if not reader.fieldnames or not {"year", "population"} <= set(reader.fieldnames):
        raise DomainError("population CSV needs year,population columns")
    out = {}
    for row in reader:
        v = float(row["population"])
        if v <= 0:
            raise DomainError(f"population for {row['year']} must be positive")
        out[int(row["year"])] = v
    return out


def events_to_json(events: Iterable[BreachEvent], **extra) -> str:
    return dumps({"events": [e.to_dict() for e in events], **extra})


def events_from_json(text: str) -> tuple[list[BreachEvent], dict]:
    doc = json.loads(text)
    if "events" not in doc:
        raise DomainError("events JSON needs an 'events' list")
    return [BreachEvent.from_dict(d) for d in doc["events"]], doc


def load_config(path: PathLike | None) -> PipelineConfig:
    return PipelineConfig() if path is None else PipelineConfig.load(path)
