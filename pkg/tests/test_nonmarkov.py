import math

import numpy as np
import pytest

from nmcoherence.channels import (
    ADChannel,
    ADState,
    ConstantRate,
    DephasingLorentzian,
    PDChannel,
    PDState,
    RUChannel,
    RUState,
    TimeGrid,
)
from nmcoherence.coherence import CoherenceMeasure
from nmcoherence.errors import DomainViolation, EmptySearchGrid
from nmcoherence.nonmarkov import (
    InitialStateSearch,
    TimeSeries,
    WitnessIntervals,
    _prefer,
    blp_witness,
    equivalence_report,
    intervals_from_sign,
    nonmarkov_measure,
    positive_increment_integral,
    trajectory,
    witness_intervals,
)
from nmcoherence.volterra import ExponentialKernel

SKEW = CoherenceMeasure("skew")
D14 = math.sqrt(783.0)

# search result for PD, W=14, lam=1, dt=1e-3, t in [0, 1], default search grid
MEASURE_W14_DT1E3 = 0.1825198026634917


def peak_sum_w14():
    # C_S increases from 0 at each pole to C_S(f) at the next |h| maximum,
    # where f = exp(-2 t_k) and t_k = 2 pi k / d
    return sum(0.5 - 0.5 * math.sqrt(1 - math.exp(-4 * 2 * math.pi * k / D14)) for k in range(1, 5))


def test_time_series_validation():
    with pytest.raises(DomainViolation):
        TimeSeries(0.0, 0.1, np.array([1.0, 2.0]))
    with pytest.raises(DomainViolation):
        TimeSeries(0.0, 0.0, np.zeros(5))
    s = TimeSeries(1.0, 0.5, np.zeros(3))
    assert np.allclose(s.times, [1.0, 1.5, 2.0]) and s.t_end == 2.0


def test_increment_integral_is_telescoping():
    s = TimeSeries(0.0, 1.0, np.array([1.0, 0.5, 0.8, 0.9, 0.2, 0.6]))
    assert positive_increment_integral(s) == pytest.approx(0.3 + 0.1 + 0.4)
    assert positive_increment_integral(s, threshold=0.2) == pytest.approx(0.3 + 0.4)


def test_witness_interval_convention():
    s = TimeSeries(0.0, 0.1, np.array([1.0, 0.5, 0.8, 0.9, 0.2, 0.6]))
    iv = witness_intervals(s)
    assert np.allclose(iv.intervals, [(0.1, 0.3), (0.4, 0.5)])
    assert len(iv) == 2 and iv.boundaries == pytest.approx([0.1, 0.3, 0.4, 0.5])
    assert len(witness_intervals(TimeSeries(0.0, 1.0, np.array([3.0, 2.0, 1.0])))) == 0


def test_intervals_from_sign():
    t = np.linspace(0, 1, 11)
    iv = intervals_from_sign(t, np.sin(2 * np.pi * t) * -1)
    assert len(iv) == 1
    assert iv.intervals[0][0] == pytest.approx(0.5, abs=1e-12)
    assert iv.intervals[0][1] == pytest.approx(1.0)


def test_equivalence_report():
    a = WitnessIntervals(((0.1, 0.2),))
    assert equivalence_report(a, [(0.1001, 0.2)], 1e-4).matched
    rep = equivalence_report(a, [(0.1003, 0.2)], 1e-4)
    assert not rep.matched and rep.max_boundary_gap == pytest.approx(3e-4)
    rep = equivalence_report(a, [], 1e-4)
    assert not rep.matched and rep.counts == (1, 0)
    assert equivalence_report([], [], 1e-4).matched


def test_pd_skew_follows_negative_rate_sign():
    prof = DephasingLorentzian(14.0)
    grid = TimeGrid(1e-4, 1.0)
    s = trajectory(PDChannel(prof), PDState(0.2, 0.7), SKEW, grid).values
    dc = np.diff(s)
    mid = grid.times[:-1] + 0.5 * grid.dt
    keep = np.abs(dc) > 1e-12
    assert np.all(np.sign(dc[keep]) == np.sign(-prof.rate(mid[keep])))


def test_ad_skew_follows_abs_h():
    k = ExponentialKernel.lorentzian(14.0)
    grid = TimeGrid(1e-4, 1.0)
    ch = ADChannel(k)
    h = ch.factors(grid)
    s = trajectory(ch, ADState(0.4, 0.3), SKEW, grid, h).values
    dc, dh = np.diff(s), np.diff(np.abs(h))
    keep = np.abs(dc) > 1e-12
    assert np.all(np.sign(dc[keep]) == np.sign(dh[keep]))


def test_single_state_measure_converges_to_peak_sum():
    grid = TimeGrid(1e-4, 1.0)
    s = trajectory(PDChannel(DephasingLorentzian(14.0)), PDState(0.0, 1.0), SKEW, grid)
    assert positive_increment_integral(s, 1e-12) == pytest.approx(peak_sum_w14(), abs=1e-6)


def test_w14_measure_golden():
    rep = nonmarkov_measure(
        PDChannel(DephasingLorentzian(14.0)), SKEW, InitialStateSearch("pd"), TimeGrid(1e-3, 1.0)
    )
    assert rep.measure_value == pytest.approx(MEASURE_W14_DT1E3, abs=1e-13)
    assert abs(rep.measure_value - peak_sum_w14()) < 5e-5
    assert rep.argmax_state == PDState(0.0, 1.0)
    assert len(rep.intervals) == 4
    assert rep.measure_name == "skew" and rep.grid_meta == {"dt": 1e-3, "t_max": 1.0}


@pytest.mark.parametrize("measure", ["skew", "tsallis:0.5", "mtsallis:2", "l1", "relent"])
def test_markovian_channels_give_zero(measure):
    m = CoherenceMeasure.parse(measure)
    grid = TimeGrid(1e-3, 3.0)
    search = lambda fam: InitialStateSearch(fam, n_a=5, n_b=5, refinement=1)
    for ch in (
        PDChannel(DephasingLorentzian(0.4)),
        PDChannel(ConstantRate(0.5)),
        ADChannel(ExponentialKernel.lorentzian(0.4)),
    ):
        assert nonmarkov_measure(ch, m, search(ch.family), grid).measure_value == 0.0


def test_per_state_rows_and_determinism():
    ch = PDChannel(DephasingLorentzian(5.0))
    grid = TimeGrid(1e-3, 2.0)
    search = InitialStateSearch("pd", n_a=5, n_b=5, refinement=2)
    r1 = nonmarkov_measure(ch, SKEW, search, grid, per_state=True)
    r2 = nonmarkov_measure(ch, SKEW, search, grid, per_state=True)
    assert r1.per_state_values == r2.per_state_values
    best = max(v for _, _, v in r1.per_state_values)
    assert r1.measure_value == best
    assert all(b > 0 for _, b, _ in r1.per_state_values)


def test_search_ranges_and_points():
    assert InitialStateSearch("ad").ranges == ((0.0, 1.0), (0.0, 0.5))
    pts = InitialStateSearch("pd", n_a=3, n_b=3).points()
    # incoherent (b=0) and unphysical points are skipped
    assert (0.0, 1.0) in pts and all(v > 0 for _, v in pts) and (1.0, 1.0) not in pts
    ru = InitialStateSearch("ru", n_a=3, n_b=3, r3=0.6)
    assert ru.ranges[0] == pytest.approx((-0.8, 0.8))
    assert ru.make_state(0.0, 0.0) is None
    with pytest.raises(EmptySearchGrid):
        InitialStateSearch("pd", n_a=0)
    with pytest.raises(DomainViolation):
        InitialStateSearch("xx")


def test_tie_break_prefers_small_a_then_large_b():
    assert _prefer((1.0, 0.0, 0.5), (1.0, 0.5, 0.5))
    assert _prefer((1.0, 0.0, 0.9), (1.0, 0.0, 0.5))
    assert not _prefer((0.9, 0.0, 1.0), (1.0, 0.5, 0.1))


def test_family_mismatch():
    with pytest.raises(DomainViolation):
        nonmarkov_measure(PDChannel(ConstantRate(1.0)), SKEW, InitialStateSearch("ad"), TimeGrid(0.1, 1.0))
    with pytest.raises(DomainViolation):
        trajectory(PDChannel(ConstantRate(1.0)), ADState(0.5, 0.1), SKEW, TimeGrid(0.1, 1.0))


def test_blp_revivals_match_rate():
    prof = DephasingLorentzian(14.0)
    grid = TimeGrid(1e-4, 1.0)
    d = blp_witness(PDChannel(prof), (PDState(0.0, 1.0), PDState(0.0, -1.0)), grid)
    # trace distance of the two states is |f(t)|
    assert np.allclose(d.values, prof.exact_factor(grid.times), atol=1e-15)


def test_ru_search_runs():
    ch = RUChannel((ConstantRate(0.2), ConstantRate(0.1), ConstantRate(0.3)))
    rep = nonmarkov_measure(ch, SKEW, InitialStateSearch("ru", n_a=5, n_b=5, refinement=1), TimeGrid(0.01, 1.0))
    assert rep.measure_value == 0.0
    assert isinstance(rep.argmax_state, RUState)
