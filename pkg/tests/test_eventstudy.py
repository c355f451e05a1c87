import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from breachcost.core import MonthlySeries, PipelineConfig
from breachcost.eventstudy import (
    DegenerateSampleError, EventStudyResult, MegaEvent, consolidate, detect_mega, event_delta, lag_sweep,
    lower_bound_cost, mega_events, placebo_events, placebo_sweep, wilcoxon_signed_rank, window_pair,
)
from breachcost.ingest import BreachEvent

from synth import MEGA_MONTHS, mega_breach_events, planted_victims


def brute_force_p(d):
    """P(W+ >= observed) by enumerating every sign pattern, midranks for ties."""
    d = [x for x in d if x != 0]
    mags = sorted(abs(x) for x in d)
    rank = {}
    for m in set(mags):
        idx = [i + 1 for i, v in enumerate(mags) if v == m]
        rank[m] = sum(idx) / len(idx)
    r = [rank[abs(x)] for x in d]
    w = sum(ri for ri, x in zip(r, d) if x > 0)
    hits = sum(1 for signs in itertools.product((0, 1), repeat=len(r)) if sum(ri for ri, s in zip(r, signs) if s) >= w - 1e-9)
    return w, hits / 2 ** len(r)


def ev(month, records):
    return BreachEvent(f"e{month}-{records}", "x", month, records, "insider", "chronology")


def test_detect_mega_inclusive_threshold():
    assert detect_mega([ev(5, 10_000_000), ev(6, 9_999_999), ev(5, 2e7), ev(9, None)]) == [5]


def test_consolidate_examples():
    assert [e.member_months for e in consolidate([10, 11, 14])] == [(10, 11, 14)]
    assert [e.T0 for e in consolidate([10, 14])] == [10, 14]
    assert consolidate([]) == []


def test_consolidate_anchor_rule():
    assert [e.T0 for e in consolidate(list(range(10)), 3, rule="anchor")] == [0, 4, 8]
    assert len(consolidate(list(range(10)), 3, rule="chain")) == 1


@given(st.sets(st.integers(0, 167), max_size=40), st.integers(0, 6), st.sampled_from(["chain", "anchor"]))
def test_consolidate_partitions(months, gap, rule):
    months = sorted(months)
    clusters = consolidate(months, gap, rule)
    flat = [m for c in clusters for m in c.member_months]
    assert flat == months
    for a, b in zip(clusters, clusters[1:]):
        assert b.T0 - a.member_months[-1] > (gap if rule == "chain" else 0)


def test_wilcoxon_all_positive():
    w, p = wilcoxon_signed_rank([0] * 6, [1] * 6)
    assert w == 21 and p == 1 / 64


def test_wilcoxon_tied_pair():
    # Both |d| share midrank 1.5; P(W+ >= 1.5) counts patterns {+,-}, {-,+}, {+,+}.
    w, p = wilcoxon_signed_rank([0, 0], [1, -1])
    assert w == 1.5 and p == 0.75 == brute_force_p([1, -1])[1]


def test_wilcoxon_all_negative():
    w, p = wilcoxon_signed_rank([1] * 6, [0] * 6)
    assert w == 0 and p == 1.0


def test_wilcoxon_degenerate():
    with pytest.raises(DegenerateSampleError, match="degenerate"):
        wilcoxon_signed_rank([1, 2], [1, 2])


def test_wilcoxon_drops_zeros():
    assert wilcoxon_signed_rank([0, 0, 0], [1, 0, 2]) == wilcoxon_signed_rank([0, 0], [1, 2])


@settings(max_examples=150)
@given(st.lists(st.integers(-4, 4), min_size=1, max_size=10))
def test_wilcoxon_matches_enumeration_with_ties(d):
    if not any(d):
        return
    w, p = wilcoxon_signed_rank([0.0] * len(d), [float(x) for x in d])
    bw, bp = brute_force_p(d)
    assert w == bw and abs(p - bp) < 1e-12


@pytest.mark.parametrize("n", [4, 8, 12])
def test_wilcoxon_p_monotone_in_w(n):
    ps = []
    for k in range(2**n):
        d = [(i + 1) * (1 if k >> i & 1 else -1) for i in range(n)]
        ps.append(wilcoxon_signed_rank([0.0] * n, d))
    ps.sort()
    assert all(b[1] <= a[1] for a, b in zip(ps, ps[1:]))


def test_wilcoxon_normal_approximation():
    rng = np.random.default_rng(3)
    d = rng.normal(0.3, 1, 40)
    w, p = wilcoxon_signed_rank([0.0] * 40, d.tolist())
    mean, sd = 40 * 41 / 4, math.sqrt(40 * 41 * 81 / 24)
    z = (w - mean - 0.5) / sd
    assert p == pytest.approx(0.5 * math.erfc(z / math.sqrt(2)), rel=1e-12)
    assert 0 < p < 1


def test_window_pair_clipping():
    victims = MonthlySeries.from_values([1.0] * 168)
    assert window_pair(MegaEvent(3, (3,)), victims, 0) is None
    assert window_pair(MegaEvent(161, (161,)), victims, 2) is None
    assert window_pair(MegaEvent(160, (160,)), victims, 2) is not None
    pair = window_pair(MegaEvent(12, (12,)), victims, 2)
    assert len(pair.pre_values) == len(pair.post_values) == 6


def test_planted_effect_recovery():
    step, lag = 4000.0, 2
    victims = planted_victims(step, lag)
    cfg = PipelineConfig()
    res = lag_sweep(mega_events(mega_breach_events(), cfg), victims, cfg.lags)
    assert [r.lag for r in res] == list(range(9))
    hit = res[lag]
    assert hit.n_events == len(MEGA_MONTHS) and hit.p_value < 0.05
    assert hit.mean_delta == pytest.approx(step, rel=0.05)


def test_parallel_sweep_same_order():
    victims = planted_victims(4000.0, 2)
    events = mega_events(mega_breach_events())
    assert lag_sweep(events, victims, workers=4) == lag_sweep(events, victims)


def test_flat_series_reports_degenerate():
    victims = MonthlySeries.from_values([5.0] * 168)
    res = lag_sweep(mega_events(mega_breach_events()), victims, [0])
    assert res[0].p_value is None and "degenerate" in res[0].diagnostic


def test_too_few_events_diagnostic():
    victims = MonthlySeries.from_values([5.0] * 168)
    (r,) = lag_sweep([MegaEvent(20, (20,))], victims, [1])
    assert r.p_value is None and r.n_events == 1 and "usable" in r.diagnostic


def test_placebo_excludes_mega_months():
    victims = planted_victims(4000.0, 2)
    pseudo = placebo_events(mega_breach_events(), victims)
    assert not set(MEGA_MONTHS) & {m for e in pseudo for m in e.member_months}


def test_placebo_equals_sweep_without_megas():
    victims = planted_victims(0.0, 0)
    small = [ev(t, 1000.0) for t in range(0, 168, 7)]
    cfg = PipelineConfig(lags=(0, 2, 5))
    expected = lag_sweep(consolidate(list(victims.months), cfg.consolidation_gap, "anchor"), victims, cfg.lags)
    assert placebo_sweep(small, victims, cfg) == expected


def test_lower_bound_examples():
    assert lower_bound_cost(88_956, 6, 1110.31) == pytest.approx(592.7e6, rel=1e-3)
    assert lower_bound_cost(59_714, 6, 853.41) == pytest.approx(305.8e6, rel=1e-3)
    assert lower_bound_cost(179_889, 6, 244.40) == pytest.approx(263.8e6, rel=1e-3)
    with pytest.raises(ValueError):
        lower_bound_cost(-1, 6, 1)


@given(st.floats(0, 1e6), st.integers(0, 24), st.floats(0, 1e4), st.floats(0, 10))
def test_lower_bound_linear(d, w, c, k):
    assert lower_bound_cost(k * d, w, c) == pytest.approx(k * lower_bound_cost(d, w, c), rel=1e-12, abs=1e-6)


def test_result_round_trip_and_event_delta():
    r = EventStudyResult(2, 2, 3.0, 0.25, 5.0, (4.0, 6.0), (12, 71))
    assert EventStudyResult.from_dict(r.to_dict()) == r
    assert event_delta([r], 71) == 6.0 and event_delta([r], 100) is None and event_delta([r], 12, lag=3) is None
