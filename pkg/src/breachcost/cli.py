"""Command-line entry point.

Every subcommand reads its inputs, writes data files into ``--out`` and a
``<subcommand>.manifest.json`` listing input digests, outputs, warnings and
the resolved configuration. Data files never carry timestamps; the manifest
holds the only one.

Exit status: 0 on success, 1 on bad input (one ``error: ...`` line on
stderr), 2 on an internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence

from . import __version__, augment, charts, eventstudy, files, ingest, projection, series, socialcost
from .core import BreachCostError, InvariantError, MonthlySeries, PipelineConfig, format_month, parse_month

log = logging.getLogger("breachcost")


class UsageError(BreachCostError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1 rather than argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"error: {message}\n")


class _WarningCollector(logging.Handler):
    def __init__(self) -> None:
        super().__init__(logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record: logging.LogRecord) -> None:
        self.messages.append(record.getMessage())


class Run:
    """Tracks inputs read and outputs written for the manifest."""

    def __init__(self, args: argparse.Namespace, config: PipelineConfig):
        self.args = args
        self.config = config
        self.out = Path(args.out)
        self.inputs: dict[str, str] = {}
        self.outputs: list[str] = []
        self.warnings: list[str] = []

    def read(self, path: str) -> str:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = files.sha256_bytes(data)
        return data.decode("utf-8-sig")

    def read_or_fixture(self, path: Optional[str], fixture: str) -> str:
        if path is None:
            path = str(files.fixture_path(fixture))
        return self.read(path)

    def write(self, name: str, text: str) -> Path:
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        p.write_text(text, encoding="utf-8")
        self.outputs.append(str(p))
        return p

    def manifest(self, subcommand: str) -> None:
        doc = {
            "subcommand": subcommand,
            "version": __version__,
            "config": self.config.as_dict(),
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": self.outputs + [str(self.out / f"{subcommand}.manifest.json")],
            "warnings": self.warnings,
            "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
        self.out.mkdir(parents=True, exist_ok=True)
        (self.out / f"{subcommand}.manifest.json").write_text(files.dumps(doc), encoding="utf-8")


# ----------------------------------------------------------------- helpers


def _month_value(text: str, what: str) -> tuple[int, float]:
    try:
        m, v = text.rsplit(":", 1)
        return parse_month(m), float(v)
    except ValueError:
        raise UsageError(f"{what}: expected YYYY-MM:VALUE, got {text!r}") from None


def _breach_arg(text: str) -> tuple[str, int, float]:
    parts = text.split(":")
    if len(parts) not in (2, 3):
        raise UsageError(f"--breach: expected YYYY-MM:RECORDS[:NAME], got {text!r}")
    try:
        t, b = parse_month(parts[0]), float(parts[1])
    except ValueError:
        raise UsageError(f"--breach: expected YYYY-MM:RECORDS[:NAME], got {text!r}") from None
    return (parts[2] if len(parts) == 3 else parts[0]), t, b


def _cost_rows(run: Run, path: Optional[str]) -> list[socialcost.CostTableRow]:
    text = run.read_or_fixture(path, "printed_cost_table.csv")
    if (path or "").endswith(".json"):
        doc = json.loads(text)
        return socialcost.rows_from_json(doc["rows"] if isinstance(doc, dict) else doc)
    return socialcost.read_cost_rows(text)


def _fit(run: Run, source: str) -> projection.ConversionFit:
    if source == "printed":
        return projection.PRINTED_FIT
    return projection.ConversionFit.from_dict(json.loads(run.read(source)))


def _records_series(run: Run, args) -> MonthlySeries:
    if getattr(args, "records", None):
        return files.read_series_csv(run.read(args.records))
    if getattr(args, "events", None):
        events, _ = files.events_from_json(run.read(args.events))
        return series.monthly_records(events)
    raise UsageError("need --records or --events")


def _config(args) -> PipelineConfig:
    cfg = files.load_config(args.config)
    overrides = {}
    for key, attr in (("alpha", "alpha"), ("theta", "theta"), ("gamma0", "gamma0"), ("Y", "Y"),
                      ("mega_threshold", "threshold"), ("pre_window", "pre"), ("post_window", "post"),
                      ("consolidation_gap", "gap"), ("baseline_T_years", "T_years")):
        v = getattr(args, attr, None)
        if v is not None:
            overrides[key] = v
    if getattr(args, "lags", None) is not None:
        overrides["lags"] = PipelineConfig.from_mapping({"lags": args.lags}).lags
    return replace(cfg, **overrides) if overrides else cfg


# -------------------------------------------------------------- subcommands


def cmd_ingest(run: Run, args) -> None:
    rejected: list[tuple[int, str]] = []
    records = ingest.parse_breaches(run.read(args.breaches), rejected)
    if args.hhs:
        records += ingest.parse_breaches(run.read(args.hhs), rejected)
    matcher = ingest.make_matcher(args.match_gap)
    chron = ingest.dedup_by_group(r for r in records if r.source == "chronology")
    hhs = ingest.dedup_by_group(r for r in records if r.source == "healthcare-portal")
    counts = ingest.MergeCounts()
    events = ingest.merge_hhs(chron, hhs, matcher, counts)
    pairs, pending, additions, excluded = [], [], [], 0
    if args.filings:
        stop = ingest.DEFAULT_STOPLIST
        if args.stoplist:
            stop = tuple(w.strip().lower() for w in run.read(args.stoplist).splitlines() if w.strip())
        filings = ingest.keyword_filter(ingest.parse_filings(run.read(args.filings), rejected), stop)
        merged = ingest.merge_state_filings(events, filings, matcher)
        pairs, additions, pending, excluded = merged.pairs, merged.additions, merged.pending, merged.excluded
        events = events + additions
    summary = {
        "reports": len(records),
        "chronology_events": len(chron),
        "hhs_appended": counts.appended,
        "hhs_raised": counts.raised,
        "hhs_filled": counts.filled,
        "state_pairs": len(pairs),
        "state_additions": len(additions),
        "state_pending": len(pending),
        "state_excluded_ratio": excluded,
        "events": len(events),
        "undisclosed": sum(1 for e in events if e.records is None),
        "rejected_rows": len(rejected),
    }
    for k, v in summary.items():
        log.info("%s: %s", k, v)
    run.write(
        "events.json",
        files.events_to_json(
            events,
            pairs=[[p.state_residents, p.national_records] for p in pairs],
            pending=[[ev.event_id, f.state_residents] for ev, f in pending],
            summary=summary,
            rejected=[[line, reason] for line, reason in rejected],
        ),
    )


def cmd_augment(run: Run, args) -> None:
    events, doc = files.events_from_json(run.read(args.events))
    pairs = [ingest.MatchedPair(int(x), float(y)) for x, y in doc.get("pairs", [])]
    by_id = {e.event_id: e for e in events}
    pending = []
    for event_id, residents in doc.get("pending", []):
        ev = by_id[event_id]
        pending.append((ev, ingest.StateFiling(ev.org_name, ev.month, int(residents), "ME")))
    done, audit = augment.augment_events(events, pairs, pending, run.config.baseline_T_years, args.intercept)
    run.write("augmented.json", files.events_to_json(done, audit=audit.to_dict()))
    run.write("records_monthly.csv", files.write_series_csv(series.monthly_records(done)))


def cmd_cost_table(run: Run, args) -> None:
    waves = socialcost.read_survey(run.read_or_fixture(args.survey, "survey_fixture.csv"))
    cpi = socialcost.read_cpi(run.read_or_fixture(args.cpi, "cpi.csv"))
    wages = socialcost.read_wages(run.read_or_fixture(args.wages, "wages.csv"))
    services_cfg = socialcost.read_services(run.read_or_fixture(args.services, "services_itemized.ini"))
    rows = socialcost.cost_table(waves, cpi, wages, services_cfg, args.denominator)
    audit = {"denominator": args.denominator, "unit_costs_2021": socialcost.adjusted_services(services_cfg, cpi)}
    if all(w.unweighted_n for w in waves):
        for mode in ("weighted", "unweighted"):
            try:
                audit[f"per_victim_{mode}"] = {
                    str(r.year): r.total_per_victim for r in socialcost.cost_table(waves, cpi, wages, services_cfg, mode)
                }
            except BreachCostError as exc:
                log.warning("%s denominator not applicable: %s", mode, exc)
                audit[f"per_victim_{mode}"] = None
    run.write("cost_table.csv", socialcost.write_cost_csv(rows))
    run.write("cost_table.json", files.dumps({"rows": [r.to_dict() for r in rows], "audit": audit}))
    if args.plot and len(rows) >= 2:
        run.write("cost_evolution.svg", charts.emit_chart("cost-evolution", socialcost.interpolate_social_cost(rows)))


def cmd_interpolate(run: Run, args) -> None:
    if not args.anchors and not args.costs:
        raise UsageError("interpolate needs --anchors and/or --costs")
    if args.anchors:
        anchors = files.read_anchors_csv(run.read(args.anchors))
        s = series.log_linear_interpolate(anchors, parse_month(args.start), parse_month(args.end))
        n_edge = sum(1 for t in s.months if t < anchors[0].t or t > anchors[-1].t)
        if n_edge:
            log.warning("%d month(s) outside the anchor span held flat", n_edge)
        run.write("victims.csv", files.write_series_csv(s))
    if args.costs:
        rows = _cost_rows(run, args.costs)
        S = socialcost.interpolate_social_cost(rows, args.anchor_month)
        run.write("social_cost_monthly.csv", files.write_series_csv(S))
        if args.plot:
            run.write("cost_evolution.svg", charts.emit_chart("cost-evolution", S))


def cmd_event_study(run: Run, args) -> None:
    cfg = run.config
    events, _ = files.events_from_json(run.read(args.events))
    victims = files.read_series_csv(run.read(args.victims))
    mega = eventstudy.mega_events(events, cfg)
    log.info("%d mega-breach event(s) after consolidation", len(mega))
    results = eventstudy.lag_sweep(mega, victims, cfg.lags, cfg.pre_window, cfg.post_window)
    doc = {
        "events": [{"T0": format_month(e.T0), "members": [format_month(m) for m in e.member_months],
                    "total_records": e.total_records} for e in mega],
        "lags": [r.to_dict() for r in results],
    }
    for r in results:
        if r.diagnostic:
            log.warning("lag %d: %s", r.lag, r.diagnostic)
    if args.placebo:
        placebo = eventstudy.placebo_sweep(events, victims, cfg, args.placebo_rule)
        doc["placebo"] = [r.to_dict() for r in placebo]
    run.write("event_study.json", files.dumps(doc))
    if args.plot:
        run.write("pvalue_sweep.svg", charts.emit_chart("pvalue-sweep", results))
        if args.placebo:
            run.write("pvalue_sweep_placebo.svg", charts.emit_chart("pvalue-sweep", placebo))


def cmd_conversion(run: Run, args) -> None:
    cfg = run.config
    M = _records_series(run, args)
    victims = files.read_series_csv(run.read(args.victims))
    if (M.start, len(M)) != (victims.start, len(victims)):
        M = MonthlySeries(victims.start, M.values[victims.start - M.start: victims.end - M.start + 1],
                          M.flags[victims.start - M.start: victims.end - M.start + 1])
    D = series.discounted_pool(M, cfg.alpha)
    C = series.conversion_rate(victims, D)
    C_ma = series.moving_average(C, args.window)
    fit = projection.fit_log_quadratic(C_ma)
    fitted = MonthlySeries.from_values([projection.eval_conversion(fit, t) for t in C.months], C.start)
    run.write("conversion.csv", files.write_columns_csv({"records": M, "victims": victims, "pool": D,
                                                          "rate": C, "rate_ma": C_ma, "rate_fit": fitted}))
    run.write("fit.json", files.dumps(fit.to_dict()))
    if args.plot:
        run.write("overlay.svg", charts.emit_chart("overlay", [M, victims]))
        run.write("conversion.svg", charts.emit_chart("conversion", [C, C_ma, fitted]))


def _case_inputs(run: Run, args) -> list[dict]:
    cases = []
    if args.cases:
        text = run.read_or_fixture(None if args.cases == "bundled" else args.cases, "case_studies.csv")
        for row in csv.DictReader(io.StringIO(text)):
            cases.append({
                "name": row["name"], "t": parse_month(row["month"]), "records": float(row["records"]),
                "settlement": float(row["settlement"]) if row.get("settlement") else None,
                "delta": float(row["lower_delta"]) if row.get("lower_delta") else None,
            })
    for text in args.breach or ():
        name, t, b = _breach_arg(text)
        cases.append({"name": name, "t": t, "records": b, "settlement": None, "delta": None})
    deltas = dict(_month_value(x, "--delta") for x in args.delta or ())
    settlements = dict(_month_value(x, "--settlement") for x in args.settlement or ())
    for c in cases:
        c["delta"] = deltas.get(c["t"], c["delta"])
        c["settlement"] = settlements.get(c["t"], c["settlement"])
    if not cases:
        raise UsageError("bounds needs at least one --breach or --cases")
    return cases


def compute_bounds(cases: Sequence[dict], fit: projection.ConversionFit, rows: Sequence[socialcost.CostTableRow],
                   alpha: float, study: Optional[list] = None, lag: int = 2, window: int = 6) -> list[dict]:
    S = socialcost.interpolate_social_cost(rows)
    out = []
    for c in cases:
        res = projection.case_study(c["records"], c["t"], fit, S, alpha)
        delta = c.get("delta")
        if delta is None and study is not None:
            delta = eventstudy.event_delta(study, c["t"], lag)
        if delta is not None and delta < 0:
            log.warning("%s: negative post-breach change %.0f; lower bound set to 0", c["name"], delta)
            delta = 0.0
        row = socialcost.nearest_row(rows, c["t"])
        lower = None if delta is None else eventstudy.lower_bound_cost(delta, window, row.total_per_victim)
        settlement = c.get("settlement")
        out.append({
            "name": c["name"], **res,
            "lower_delta_per_month": delta,
            "lower_cost_year": row.year,
            "lower_per_victim_cost": row.total_per_victim,
            "lower_bound": lower,
            "settlement": settlement,
            "ratio_lower": projection.optional_ratio(lower, settlement),
            "ratio_upper": projection.optional_ratio(res["upper_bound"], settlement),
        })
    return out


def _bounds_csv(results: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = ["name", "month", "t", "records", "settlement", "lower_bound", "ratio_lower",
            "projected_victims", "upper_bound", "ratio_upper"]
    w.writerow(cols)
    for r in results:
        w.writerow(["" if r[c] is None else (repr(r[c]) if isinstance(r[c], float) else r[c]) for c in cols])
    return buf.getvalue()


def cmd_bounds(run: Run, args) -> None:
    cases = _case_inputs(run, args)
    fit = _fit(run, args.fit)
    rows = _cost_rows(run, args.costs)
    study = None
    if args.study:
        study = [eventstudy.EventStudyResult.from_dict(d) for d in json.loads(run.read(args.study))["lags"]]
    results = compute_bounds(cases, fit, rows, run.config.alpha, study, args.lag, run.config.post_window)
    run.write("bounds.json", files.dumps({"fit": fit.to_dict(), "alpha": run.config.alpha, "breaches": results}))
    run.write("bounds.csv", _bounds_csv(results))


def cmd_saturate(run: Run, args) -> None:
    cfg = run.config
    M = _records_series(run, args)
    pop = files.read_population_csv(run.read(args.population))
    if args.granularity == "year":
        periods, r = projection.annualize(M)
        N = [pop[y] if y in pop else _missing_pop(y) for y in periods]
        labels = [str(y) for y in periods]
    else:
        defined = M.defined()
        r = [v for _, v in defined]
        N = projection.monthly_population([t for t, _ in defined], pop)
        labels = [format_month(t) for t, _ in defined]
    state = projection.run_saturation(r, N, cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["period", "records", "population", "unique_new", "cumulative_unique", "mu"])
    cum = 0.0
    for label, r_t, n_t, (c, mu) in zip(labels, r, N, state.history):
        cum += c
        w.writerow([label, repr(r_t), repr(n_t), repr(c), repr(cum), repr(mu)])
    run.write("saturation.csv", buf.getvalue())
    if args.granularity == "month":
        unique = MonthlySeries.from_values([c for c, _ in state.history], M.defined()[0][0])
        run.write("unique_monthly.csv", files.write_series_csv(unique))


def _missing_pop(year: int):
    raise UsageError(f"population file has no value for {year}")


def cmd_report(run: Run, args) -> None:
    waves = socialcost.read_survey(run.read_or_fixture(args.survey, "survey_fixture.csv"))
    rows = socialcost.cost_table(waves, socialcost.read_cpi(run.read_or_fixture(args.cpi, "cpi.csv")),
                                 socialcost.read_wages(run.read_or_fixture(args.wages, "wages.csv")),
                                 socialcost.read_services(run.read_or_fixture(args.services, "services_itemized.ini")))
    args.cases = args.cases or "bundled"
    args.breach, args.delta, args.settlement = None, None, None
    cases = _case_inputs(run, args)
    fit = _fit(run, args.fit)
    printed_rows = socialcost.read_cost_rows(run.read_or_fixture(None, "printed_cost_table.csv"))
    bounds = compute_bounds(cases, fit, printed_rows, run.config.alpha)
    run.write("cost_table.csv", socialcost.write_cost_csv(rows))
    run.write("report.json", files.dumps({"cost_table": [r.to_dict() for r in rows], "bounds": bounds}))
    lines = ["# Social cost report", "", "| Year | Per victim ($) | National ($) |", "|---|---:|---:|"]
    lines += [f"| {r.year} | {r.total_per_victim:,.2f} | {r.total_national:,.0f} |" for r in rows]
    lines += ["", "| Breach | Month | Records | Settlement | Lower bound | Projected victims | Upper bound |",
              "|---|---|---:|---:|---:|---:|---:|"]
    for b in bounds:
        money = lambda v: "" if v is None else f"${v:,.0f}"
        lines.append(f"| {b['name']} | {b['month']} | {b['records']:,.0f} | {money(b['settlement'])} | "
                     f"{money(b['lower_bound'])} | {b['projected_victims']:,.0f} | {money(b['upper_bound'])} |")
    run.write("report.md", "\n".join(lines) + "\n")


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value pipeline config")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--plot", action="store_true", help="also write SVG charts")
    common.add_argument("--seed", type=int, help="reserved; the pipeline is deterministic")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="breachcost", description="Social cost of corporate data breaches.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("ingest", parents=[common], help="parse, deduplicate and merge breach sources")
    s.add_argument("--breaches", required=True)
    s.add_argument("--hhs", help="healthcare-portal rows in the breaches.csv schema")
    s.add_argument("--filings", help="state filings CSV")
    s.add_argument("--stoplist", help="one lowercase keyword per line")
    s.add_argument("--match-gap", type=int, default=2, help="month slack for identity matches")

    s = sub.add_parser("augment", parents=[common], help="estimate and impute missing record counts")
    s.add_argument("--events", required=True)
    s.add_argument("--intercept", action="store_true", help="fit the state-to-national regression with an intercept")
    s.add_argument("--T-years", dest="T_years", type=int)

    s = sub.add_parser("cost-table", parents=[common], help="per-victim and national social cost by survey year")
    s.add_argument("--survey")
    s.add_argument("--cpi")
    s.add_argument("--wages")
    s.add_argument("--services")
    s.add_argument("--denominator", choices=("weighted", "unweighted"), default="weighted")

    s = sub.add_parser("interpolate", parents=[common], help="monthly victim or social-cost series")
    s.add_argument("--anchors", help="month,value CSV; month may be YYYY-MM or YYYY-Qn")
    s.add_argument("--start", default="2008-01")
    s.add_argument("--end", default="2021-12")
    s.add_argument("--costs", help="cost table CSV/JSON for the monthly social cost")
    s.add_argument("--anchor-month", type=int, default=6)

    s = sub.add_parser("event-study", parents=[common], help="mega-breach Wilcoxon lag sweep")
    s.add_argument("--events", required=True)
    s.add_argument("--victims", required=True)
    s.add_argument("--lags")
    s.add_argument("--pre", type=int)
    s.add_argument("--post", type=int)
    s.add_argument("--gap", type=int)
    s.add_argument("--threshold", type=float)
    s.add_argument("--placebo", action="store_true")
    s.add_argument("--placebo-rule", choices=("anchor", "chain"), default="anchor")

    s = sub.add_parser("conversion", parents=[common], help="discounted pool, conversion rate and log-quadratic fit")
    s.add_argument("--events")
    s.add_argument("--records", help="monthly records series CSV (instead of --events)")
    s.add_argument("--victims", required=True)
    s.add_argument("--alpha", type=float)
    s.add_argument("--window", type=int, default=6)

    s = sub.add_parser("bounds", parents=[common], help="lower and upper bound social cost per breach")
    s.add_argument("--breach", action="append", help="YYYY-MM:RECORDS[:NAME], repeatable")
    s.add_argument("--cases", help="case CSV (name,month,records,settlement,lower_delta) or 'bundled'")
    s.add_argument("--fit", default="printed", help="fit.json or 'printed'")
    s.add_argument("--costs", help="cost table CSV/JSON (default: bundled printed table)")
    s.add_argument("--study", help="event_study.json for lower bounds")
    s.add_argument("--delta", action="append", help="YYYY-MM:VICTIMS_PER_MONTH lower-bound override")
    s.add_argument("--settlement", action="append", help="YYYY-MM:DOLLARS")
    s.add_argument("--alpha", type=float)
    s.add_argument("--lag", type=int, default=2)

    s = sub.add_parser("saturate", parents=[common], help="dynamic saturation model")
    s.add_argument("--events")
    s.add_argument("--records")
    s.add_argument("--population", required=True, help="year,population CSV")
    s.add_argument("--theta", type=float)
    s.add_argument("--gamma0", type=float)
    s.add_argument("--Y", type=float)
    s.add_argument("--granularity", choices=("month", "year"), default="month")

    s = sub.add_parser("report", parents=[common], help="cost table plus case-study bounds (bundled inputs by default)")
    s.add_argument("--survey")
    s.add_argument("--cpi")
    s.add_argument("--wages")
    s.add_argument("--services")
    s.add_argument("--cases")
    s.add_argument("--fit", default="printed")
    s.add_argument("--alpha", type=float)
    return p


COMMANDS = {
    "ingest": cmd_ingest,
    "augment": cmd_augment,
    "cost-table": cmd_cost_table,
    "interpolate": cmd_interpolate,
    "event-study": cmd_event_study,
    "conversion": cmd_conversion,
    "bounds": cmd_bounds,
    "saturate": cmd_saturate,
    "report": cmd_report,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    collector = _WarningCollector()
    root = logging.getLogger("breachcost")
    root.addHandler(collector)
    try:
        r = Run(args, _config(args))
        COMMANDS[args.command](r, args)
        r.warnings = collector.messages
        r.manifest(args.command)
    except (InvariantError, AssertionError) as exc:
        print(f"internal error: {exc}".replace("\n", " "), file=sys.stderr)
        return 2
    except (BreachCostError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        msg = str(exc) if not isinstance(exc, KeyError) else f"missing key {exc}"
        print(f"error: {msg}".replace("\n", " "), file=sys.stderr)
        return 1
    finally:
        root.removeHandler(collector)
    return 0


def main() -> None:
    sys.exit(run())
