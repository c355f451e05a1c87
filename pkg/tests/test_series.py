import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from breachcost.core import DomainError, Flag, MonthlySeries
from breachcost.ingest import BreachEvent
from breachcost.series import (
    AnchorPoint, conversion_rate, discounted_pool, log_linear_interpolate, monthly_records, moving_average,
)


def S(values, start=0):
    return MonthlySeries.from_values(values, start)


def test_log_linear_geometric_midpoint():
    s = log_linear_interpolate([AnchorPoint(0, 100), AnchorPoint(2, 400)], 0, 2)
    assert s.values == pytest.approx((100, 200, 400), rel=1e-15)
    assert s.flags == (Flag.OBSERVED, Flag.INTERPOLATED, Flag.OBSERVED)


def test_log_linear_doubling():
    s = log_linear_interpolate([AnchorPoint(0, 100), AnchorPoint(3, 800)], 0, 3)
    assert s.values == pytest.approx([100 * 2**t for t in range(4)], rel=1e-14)


def test_log_linear_flat_edges_and_constant():
    s = log_linear_interpolate([AnchorPoint(5, 7), AnchorPoint(9, 7)], 0, 20)
    assert set(s.values) == {7.0}
    assert s.flags[0] is Flag.INTERPOLATED and s.flags[5] is Flag.OBSERVED


def test_log_linear_errors():
    with pytest.raises(DomainError):
        AnchorPoint(0, 0)
    with pytest.raises(DomainError):
        log_linear_interpolate([AnchorPoint(3, 1), AnchorPoint(2, 1)])
    with pytest.raises(DomainError):
        log_linear_interpolate([AnchorPoint(3, 1)])


@given(st.lists(st.floats(1e-3, 1e9), min_size=2, max_size=6), st.floats(1e-3, 1e3))
def test_log_linear_scale_equivariant(vals, c):
    anchors = [AnchorPoint(i * 20, v) for i, v in enumerate(vals)]
    base = log_linear_interpolate(anchors)
    scaled = log_linear_interpolate([AnchorPoint(a.t, a.value * c) for a in anchors])
    for x, y in zip(base.values, scaled.values):
        assert y == pytest.approx(c * x, rel=1e-9)


def test_pool_examples():
    assert discounted_pool(S([100, 0, 0]), 0.8).values == pytest.approx((100, 80, 64), rel=1e-15)
    assert discounted_pool(S([5, 7]), 0.5).values == (5.0, 9.5)
    d = discounted_pool(S([3.0] * 168), 0.8)
    assert d.values[-1] == pytest.approx(15.0, rel=1e-12)


def test_pool_alpha_bounds():
    for a in (0, 1, -0.1, 1.5):
        with pytest.raises(DomainError):
            discounted_pool(S([1.0]), a)


@given(st.lists(st.floats(0, 1e9), min_size=1, max_size=168), st.floats(0.01, 0.99))
def test_pool_matches_closed_form(m, alpha):
    d = discounted_pool(S(m), alpha)
    for t in range(len(m)):
        closed = math.fsum(alpha ** (t - k) * m[k] for k in range(t + 1))
        assert math.isclose(d.values[t], closed, rel_tol=1e-9, abs_tol=1e-300)


def test_conversion_examples():
    c = conversion_rate(S([10, 0, 500, 5]), S([1_000_000, 10, 250_000, 0]))
    assert c.values == (1.0, 0.0, 200.0, None)


def test_conversion_alignment():
    with pytest.raises(DomainError):
        conversion_rate(S([1, 2]), S([1, 2], start=1))


def test_moving_average_examples():
    assert moving_average(S([1, 2, 3, 4, 5, 6]), 6).values[-1] == 3.5
    assert moving_average(S([0, 0, 0, 0, 0, 6]), 6).values[-1] == 1.0
    ma = moving_average(S([4.0] * 10), 6)
    assert ma.values[:5] == (None,) * 5 and set(ma.values[5:]) == {4.0}
    with pytest.raises(DomainError):
        moving_average(S([1, 2]), 3)


def test_moving_average_gap_propagates():
    ma = moving_average(S([1, 1, None, 1, 1, 1, 1]), 2)
    assert ma.values == (None, 1.0, None, None, 1.0, 1.0, 1.0)


@given(st.lists(st.floats(0, 1e6), min_size=6, max_size=60), st.integers(1, 6))
def test_moving_average_preserves_monotone(deltas, w):
    s = S(np.cumsum(deltas).tolist())
    vals = [v for v in moving_average(s, w).values if v is not None]
    assert all(b >= a - 1e-9 * max(1.0, abs(a)) for a, b in zip(vals, vals[1:]))


def test_monthly_records_sums_and_flags():
    events = [
        BreachEvent("a", "a", 3, 10.0, "insider", "chronology"),
        BreachEvent("b", "b", 3, 5.0, "insider", "chronology", flag=Flag.IMPUTED),
        BreachEvent("c", "c", 4, None, "insider", "chronology"),
        BreachEvent("d", "d", 6, 2.0, "insider", "chronology"),
    ]
    m = monthly_records(events, 0, 6)
    assert m.values == (0, 0, 0, 15, 0, 0, 2)
    assert m.flags[3] is Flag.IMPUTED and m.flags[6] is Flag.OBSERVED
