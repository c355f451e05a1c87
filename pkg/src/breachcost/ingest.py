"""Parsing, deduplication and merging of the three breach sources.

Sources are the breach chronology, the federal healthcare breach portal and
state attorney-general filings (Maine and New Hampshire). Matching across
sources goes through an injectable ``matcher(a, b) -> bool``; the default
compares normalized organization names and allows a two-month slack.
"""

from __future__ import annotations

import csv
import io
import logging
import re
from dataclasses import dataclass, field, replace
from typing import BinaryIO, Callable, Iterable, Optional, Protocol, TextIO, Union

from .core import T_MAX, BreachCostError, DomainError, Flag, MonthIndex, month_index

log = logging.getLogger(__name__)

_MONTH_SHAPE = re.compile(r"^(\d{4})-(\d{1,2})$")

CATEGORIES = (
    "payment-card",
    "external-cyber",
    "insider",
    "physical-documents",
    "portable-device",
    "stationary-device",
    "unintended-disclosure",
    "unknown",
)
SOURCES = ("chronology", "healthcare-portal", "state-filing")
STATES = ("ME", "NH")

BREACH_HEADER = ("report_id", "group_id", "org_name", "month", "records", "category", "source")
FILING_HEADER = ("org_name", "month", "state_residents", "state")

DEFAULT_STOPLIST = ("town of", "plumbing", "electric", "dealership", "restaurant")

NATIONAL_TO_STATE_MIN_RATIO = 5


class ParseError(BreachCostError, ValueError):
    def __init__(self, line: int, field_name: str, message: str):
        self.line = line
        self.field = field_name
        super().__init__(f"line {line}, field {field_name!r}: {message}")


@dataclass(frozen=True)
class BreachRecord:
    report_id: str
    group_id: Optional[str]
    org_name: str
    month: MonthIndex
    records: Optional[int]
    category: str
    source: str

    def __post_init__(self) -> None:
        if self.records is not None and self.records < 0:
            raise DomainError("records must be non-negative")
        if self.records == 0:
            object.__setattr__(self, "records", None)


@dataclass(frozen=True)
class BreachEvent:
    """A consolidated breach incident.

    ``records`` is ``None`` while the count is undisclosed; after augmentation
    it may be fractional.  ``flag`` records whether the count was observed or
    imputed, ``imputation`` names the method (``"ols"`` or ``"baseline"``).
    """

    event_id: str
    org_name: str
    month: MonthIndex
    records: Optional[float]
    category: str
    source: str
    group_id: Optional[str] = None
    members: tuple[str, ...] = ()
    flag: Flag = Flag.OBSERVED
    imputation: Optional[str] = None
    state_residents: Optional[int] = None

    @property
    def disclosed(self) -> bool:
        return self.records is not None

    def to_dict(self) -> dict:
        return {
            "event_id": self.event_id,
            "group_id": self.group_id,
            "org_name": self.org_name,
            "month": self.month,
            "records": self.records,
            "category": self.category,
            "source": self.source,
            "members": list(self.members),
            "flag": self.flag.value,
            "imputation": self.imputation,
            "state_residents": self.state_residents,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BreachEvent":
        return cls(
            event_id=str(d["event_id"]),
            org_name=d["org_name"],
            month=int(d["month"]),
            records=None if d.get("records") is None else float(d["records"]),
            category=d["category"],
            source=d["source"],
            group_id=d.get("group_id"),
            members=tuple(d.get("members") or ()),
            flag=Flag(d.get("flag", "observed")),
            imputation=d.get("imputation"),
            state_residents=d.get("state_residents"),
        )


@dataclass(frozen=True)
class StateFiling:
    org_name: str
    month: MonthIndex
    state_residents: int
    state: str

    def __post_init__(self) -> None:
        if self.state_residents <= 0:
            raise DomainError(f"state_residents must be positive ({self.org_name})")
        if self.state not in STATES:
            raise DomainError(f"state must be one of {STATES}, got {self.state!r}")


@dataclass(frozen=True)
class MatchedPair:
    state_residents: int
    national_records: float

    def __post_init__(self) -> None:
        if self.national_records < NATIONAL_TO_STATE_MIN_RATIO * self.state_residents:
            raise DomainError("matched pair violates the national >= 5 x state filter")


class _Named(Protocol):
    org_name: str
    month: MonthIndex


Matcher = Callable[[_Named, _Named], bool]

_LEGAL_SUFFIXES = {
    "inc", "incorporated", "llc", "llp", "lp", "ltd", "limited", "corp", "corporation",
    "co", "company", "plc", "pc", "pllc", "na", "the",
}
_PUNCT_RE = re.compile(r"[^\w\s]")
_APOSTROPHE_RE = re.compile(r"['\u2019]")


def normalize_name(name: str) -> str:
    words = _PUNCT_RE.sub(" ", _APOSTROPHE_RE.sub("", name.lower())).split()
    while words and words[-1] in _LEGAL_SUFFIXES:
        words.pop()
    if words and words[0] == "the":
        words = words[1:]
    return " ".join(words)


def make_matcher(max_month_gap: int = 2) -> Matcher:
    def matcher(a: _Named, b: _Named) -> bool:
        return normalize_name(a.org_name) == normalize_name(b.org_name) and abs(a.month - b.month) <= max_month_gap

    matcher.max_month_gap = max_month_gap  # type: ignore[attr-defined]
    return matcher


default_matcher = make_matcher()


def _text(stream: Union[BinaryIO, TextIO, bytes, str]) -> TextIO:
    if isinstance(stream, bytes):
        return io.StringIO(stream.decode("utf-8-sig"))
    if isinstance(stream, str):
        return io.StringIO(stream)
    data = stream.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data)


def _rows(stream, header: tuple[str, ...]) -> Iterable[tuple[int, dict[str, str]]]:
    reader = csv.reader(_text(stream))
    try:
        got = next(reader)
    except StopIteration:
        raise ParseError(1, "header", "empty input") from None
    got = [h.strip() for h in got]
    if tuple(got) != header:
        raise ParseError(1, "header", f"expected {','.join(header)}, got {','.join(got)}")
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(line, "row", f"expected {len(header)} fields, got {len(row)}")
        yield line, dict(zip(header, (c.strip() for c in row)))


def _calendar_month(line: int, raw: str, rejected: Optional[list[tuple[int, str]]]) -> Optional[MonthIndex]:
    shape = _MONTH_SHAPE.match(raw)
    if not shape or not 1 <= int(shape.group(2)) <= 12:
        raise ParseError(line, "month", f"expected YYYY-MM, got {raw!r}")
    month = 12 * (int(shape.group(1)) - 2008) + int(shape.group(2)) - 1
    if not 0 <= month <= T_MAX:
        reason = f"month {raw} outside study calendar"
        log.warning("line %d: %s", line, reason)
        if rejected is not None:
            rejected.append((line, reason))
        return None
    return month


def parse_breaches(stream, rejected: Optional[list[tuple[int, str]]] = None) -> list[BreachRecord]:
    """Parse ``breaches.csv``.

    Rows dated outside the study calendar are skipped and reported through
    ``rejected`` as ``(line, reason)`` pairs; any other defect raises
    :class:`ParseError`.
    """
    out: list[BreachRecord] = []
    for line, row in _rows(stream, BREACH_HEADER):
        if not row["report_id"]:
            raise ParseError(line, "report_id", "empty")
        month = _calendar_month(line, row["month"], rejected)
        if month is None:
            continue
        raw = row["records"].replace("_", "")
        if raw == "":
            records = None
        else:
            try:
                records = int(raw)
            except ValueError:
                raise ParseError(line, "records", f"not an integer: {raw!r}") from None
            if records < 0:
                raise ParseError(line, "records", "negative count")
        if row["category"] not in CATEGORIES:
            raise ParseError(line, "category", f"unknown {row['category']!r}; valid: {', '.join(CATEGORIES)}")
        if row["source"] not in SOURCES:
            raise ParseError(line, "source", f"unknown {row['source']!r}; valid: {', '.join(SOURCES)}")
        out.append(
            BreachRecord(
                report_id=row["report_id"],
                group_id=row["group_id"] or None,
                org_name=row["org_name"],
                month=month,
                records=records,
                category=row["category"],
                source=row["source"],
            )
        )
    return out


def parse_filings(stream, rejected: Optional[list[tuple[int, str]]] = None) -> list[StateFiling]:
    out = []
    for line, row in _rows(stream, FILING_HEADER):
        month = _calendar_month(line, row["month"], rejected)
        if month is None:
            continue
        try:
            residents = int(row["state_residents"])
        except ValueError:
            raise ParseError(line, "state_residents", f"not an integer: {row['state_residents']!r}") from None
        try:
            out.append(StateFiling(row["org_name"], month, residents, row["state"].upper()))
        except DomainError as exc:
            raise ParseError(line, "state_residents" if residents <= 0 else "state", str(exc)) from None
    return out


def _as_event(item: Union[BreachRecord, BreachEvent]) -> BreachEvent:
    if isinstance(item, BreachEvent):
        return item
    return BreachEvent(
        event_id=item.report_id,
        org_name=item.org_name,
        month=item.month,
        records=None if item.records is None else float(item.records),
        category=item.category,
        source=item.source,
        group_id=item.group_id,
        members=(item.report_id,),
    )


def dedup_by_group(records: Iterable[Union[BreachRecord, BreachEvent]]) -> list[BreachEvent]:
    """Collapse records sharing a group id into one event.

    The event keeps the largest disclosed count and the earliest month.
    Category, name and source come from the earliest member. Output order
    follows first appearance of each group.
    """
    groups: dict[str, list[BreachEvent]] = {}
    order: list[Union[str, BreachEvent]] = []
    for item in records:
        ev = _as_event(item)
        if ev.group_id is None:
            order.append(ev)
            continue
        if ev.group_id not in groups:
            groups[ev.group_id] = []
            order.append(ev.group_id)
        groups[ev.group_id].append(ev)

    out: list[BreachEvent] = []
    for entry in order:
        if isinstance(entry, BreachEvent):
            out.append(entry)
            continue
        members = groups[entry]
        if len(members) == 1:
            out.append(members[0])
            continue
        first = min(members, key=lambda e: e.month)
        counts = [m.records for m in members if m.records is not None]
        ids: list[str] = []
        for m in members:
            ids.extend(x for x in m.members if x not in ids)
        out.append(
            replace(
                first,
                event_id=entry,
                records=max(counts) if counts else None,
                members=tuple(ids),
            )
        )
    return out


class _NameIndex:
    """Lookup of candidate matches by normalized name, falling back to a scan
    when a custom matcher is used."""

    def __init__(self, items, matcher: Matcher):
        self.items = list(items)
        self.matcher = matcher
        self.by_name: Optional[dict[str, list[int]]] = None
        if getattr(matcher, "max_month_gap", None) is not None:
            self.by_name = {}
            for i, it in enumerate(self.items):
                self.by_name.setdefault(normalize_name(it.org_name), []).append(i)

    def find(self, probe) -> Optional[int]:
        cands = self.by_name.get(normalize_name(probe.org_name), []) if self.by_name is not None else range(len(self.items))
        hits = [i for i in cands if self.matcher(self.items[i], probe)]
        if not hits:
            return None
        return min(hits, key=lambda i: (abs(self.items[i].month - probe.month), i))


@dataclass
class MergeCounts:
    appended: int = 0
    raised: int = 0
    filled: int = 0


def merge_hhs(
    base: list[BreachEvent],
    hhs: list[BreachEvent],
    matcher: Matcher = default_matcher,
    counts: Optional[MergeCounts] = None,
) -> list[BreachEvent]:
    """Fold healthcare-portal events into the base list.

    Matched pairs keep the larger disclosed count (or adopt the portal count
    when the base is undisclosed); unmatched portal events are appended.
    """
    counts = counts if counts is not None else MergeCounts()
    out = list(base)
    index = _NameIndex(base, matcher)
    for h in hhs:
        i = index.find(h)
        if i is None:
            out.append(h)
            counts.appended += 1
            continue
        b = out[i]
        if h.records is None:
            continue
        if b.records is None:
            out[i] = replace(b, records=h.records)
            counts.filled += 1
        elif h.records > b.records:
            out[i] = replace(b, records=h.records)
            counts.raised += 1
    return out


def keyword_filter(filings: Iterable[StateFiling], stoplist: Iterable[str] = DEFAULT_STOPLIST) -> list[StateFiling]:
    stop = [s.lower() for s in stoplist]
    if not stop:
        raise DomainError("stoplist must not be empty")
    return [f for f in filings if not any(s in f.org_name.lower() for s in stop)]


def pool_filings(filings: Iterable[StateFiling], matcher: Matcher = default_matcher) -> list[StateFiling]:
    """Collapse filings of the same incident across states, keeping the higher resident count."""
    pooled: list[StateFiling] = []
    for f in filings:
        for i, p in enumerate(pooled):
            if matcher(p, f):
                if f.state_residents > p.state_residents:
                    pooled[i] = f
                break
        else:
            pooled.append(f)
    return pooled


@dataclass
class StateMerge:
    pairs: list[MatchedPair] = field(default_factory=list)
    additions: list[BreachEvent] = field(default_factory=list)
    pending: list[tuple[BreachEvent, StateFiling]] = field(default_factory=list)
    excluded: int = 0

    def __iter__(self):
        return iter((self.pairs, self.additions, self.pending))


def merge_state_filings(
    base: list[BreachEvent], filings: list[StateFiling], matcher: Matcher = default_matcher
) -> StateMerge:
    """Split pooled state filings into regression pairs, new events and estimation targets.

    Unpacks as ``pairs, additions, pending``. Filings matched to an event whose
    national count is under five times the state count are dropped and
    counted in ``excluded``.
    """
    result = StateMerge()
    index = _NameIndex(base, matcher)
    for n, f in enumerate(pool_filings(filings, matcher)):
        i = index.find(f)
        if i is None:
            result.additions.append(
                BreachEvent(
                    event_id=f"state-{f.state}-{n}",
                    org_name=f.org_name,
                    month=f.month,
                    records=None,
                    category="unknown",
                    source="state-filing",
                    state_residents=f.state_residents,
                )
            )
            continue
        ev = base[i]
        if ev.records is None:
            result.pending.append((ev, f))
        elif ev.records >= NATIONAL_TO_STATE_MIN_RATIO * f.state_residents:
            result.pairs.append(MatchedPair(f.state_residents, ev.records))
        else:
            result.excluded += 1
    return result


def quarter_to_month(year: int, quarter: int) -> MonthIndex:
    """Map an interview quarter to the middle month of that quarter."""
    if quarter not in (1, 2, 3, 4):
        raise DomainError(f"quarter must be 1..4, got {quarter}")
    return month_index(year, 3 * quarter - 1)
