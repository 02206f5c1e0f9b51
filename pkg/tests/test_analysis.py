import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trendprice import analysis
from trendprice.analysis import Classification, InsufficientSnapshots
from trendprice.model import PHI1, ModelConfig
from trendprice.solver import BLOWUP, OK, Grid1D, InitialCondition, SimConfig, SimTrace, simulate

DT = 1e-4


def synthetic_trace(p, t, snapshots=None, snap_t=None, x=None, status=OK):
    t = np.asarray(t, float)
    p = np.asarray(p, float)
    pp = np.gradient(p, t) if len(t) > 1 else np.zeros_like(p)
    if snapshots is None:
        x = np.linspace(-1, 1, 5)
        snapshots, snap_t = np.zeros((1, 5)), np.array([0.0])
    return SimTrace(t, p, pp, np.ones_like(p), np.asarray(snap_t), np.asarray(snapshots), x, status)


def test_period_of_sine():
    t = np.arange(0, 2 + DT / 2, DT)
    est = analysis.period_from_signal(t, 0.3 * np.sin(2 * math.pi * t / 0.2088) + 5.0)
    assert est.period == pytest.approx(0.2088, abs=1e-4)
    assert est.relative_dispersion < 1e-3
    assert est.cycles >= 8 and est.is_periodic


@settings(max_examples=80, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(0, 2 * math.pi), st.floats(-6, 2))
def test_period_within_two_samples(T0, phase, log_amp):
    t = np.arange(0, 2 + DT / 2, DT)
    est = analysis.period_from_signal(t, 10 ** log_amp * np.sin(2 * math.pi * t / T0 + phase))
    assert est is not None
    assert abs(est.period - T0) <= 2 * DT


def test_period_absent_for_tiny_or_short_signals():
    t = np.arange(0, 1, DT)
    assert analysis.period_from_signal(t, 1e-10 * np.sin(40 * t)) is None
    assert analysis.period_from_signal(t, np.sin(2 * math.pi * t / 0.6)) is None
    assert analysis.period_from_signal(t[:2], t[:2]) is None


def test_estimate_period_discards_transient():
    t = np.arange(0, 2 + DT / 2, DT)
    p = np.where(t < 1, 5 * t, np.sin(2 * math.pi * t / 0.1))
    est = analysis.estimate_period(synthetic_trace(p, t), 0.5)
    assert est.period == pytest.approx(0.1, abs=2 * DT)
    with pytest.raises(ValueError):
        analysis.estimate_period(synthetic_trace(p, t), 1.0)


def test_antisymmetry_zero_for_odd_snapshots():
    x = np.arange(-20, 21) * 0.1  # exactly symmetric nodes
    snap_t = np.arange(0, 1.0001, 0.01)
    snaps = np.array([np.sin(3 * x) - x ** 3 for _ in snap_t])
    tr = synthetic_trace(np.zeros(3), [0, 0.5, 1], snaps, snap_t, x)
    assert analysis.half_period_antisymmetry(tr, 0.2) == 0.0


def test_antisymmetry_detects_even_part():
    x = np.linspace(-2, 2, 41)
    snap_t = np.arange(0, 1.0001, 0.01)
    snaps = np.array([-x + 0.1 * np.cos(x) for _ in snap_t])
    tr = synthetic_trace(np.zeros(3), [0, 0.5, 1], snaps, snap_t, x)
    assert analysis.half_period_antisymmetry(tr, 0.2) > 0.05


def test_antisymmetry_needs_snapshots():
    x = np.linspace(-1, 1, 5)
    tr = synthetic_trace(np.zeros(3), [0, 0.5, 1], -x[None, :], [0.0], x)
    with pytest.raises(InsufficientSnapshots):
        analysis.half_period_antisymmetry(tr, 0.2)
    tr2 = synthetic_trace(np.zeros(3), [0, 0.5, 1], np.array([-x, -x]), [0.0, 0.01], x)
    with pytest.raises(InsufficientSnapshots):
        analysis.half_period_antisymmetry(tr2, 5.0)


def test_oscillation_amplitude_ignores_trend():
    t = np.linspace(0, 1, 1001)
    assert analysis.oscillation_amplitude(t, 3 * t + 2) == pytest.approx(0.0, abs=1e-12)
    wave = np.sin(2 * math.pi * 10 * t)
    assert analysis.oscillation_amplitude(t, wave + 3 * t) == pytest.approx(
        analysis.oscillation_amplitude(t, wave), rel=1e-12)
    assert 2.0 <= analysis.oscillation_amplitude(t, wave) < 2.2


def test_classify_synthetic_cases():
    t = np.arange(0, 2 + DT / 2, DT)
    osc = synthetic_trace(0.01 * np.sin(2 * math.pi * t / 0.2), t)
    assert analysis.classify(osc, 12.0).classification is Classification.PERIODIC
    decay = synthetic_trace(0.01 * np.exp(-8 * t) * np.sin(2 * math.pi * t / 0.2), t)
    assert analysis.classify(decay, 5.0).classification is Classification.DECAY
    grow = synthetic_trace(0.01 * np.exp(3 * t) * np.sin(2 * math.pi * t / 0.2), t)
    assert analysis.classify(grow, 20.0).classification is Classification.UNBOUNDED
    blown = synthetic_trace(t[:10], t[:10], status=BLOWUP)
    assert analysis.classify(blown, 20.0).classification is Classification.UNBOUNDED


def test_periodic_point_has_period(hopf_run):
    pt = analysis.classify(hopf_run[0])
    assert pt.classification is Classification.PERIODIC
    assert pt.period is not None and pt.amplitude > 0
    assert pt.R == 12.0


def test_sign_sanity_equilibrium_and_hopf(hopf_run):
    eq = simulate(SimConfig(initial=InitialCondition(0.0, "none"), t_end=0.05))
    assert not analysis.sign_sanity(eq).violated
    assert analysis.sign_sanity(hopf_run[0]).max_violation <= 1e-3


def test_sign_sanity_flags_strong_sign_coupling():
    tr = simulate(SimConfig(t_end=3.0, model=ModelConfig(trend_coupling=30.0, nonlinearity=PHI1)))
    rep = analysis.sign_sanity(tr)
    assert rep.violated and rep.max_violation > 0
    assert rep.first_t > 0 and abs(rep.first_x) <= 5


@pytest.mark.slow
def test_sweep_orders_and_classifies():
    base = SimConfig(grid=Grid1D.from_spacing(-5, 5, 0.05))
    pts = analysis.sweep_R(base, [15.0, 0.0, 12.0, 5.0, 9.0], workers=2)
    assert [p.R for p in pts] == [0.0, 5.0, 9.0, 12.0, 15.0]
    kinds = [p.classification for p in pts]
    assert kinds[:3] == [Classification.DECAY] * 3
    assert kinds[3:] == [Classification.PERIODIC] * 2
    amps = [p.amplitude for p in pts]
    assert all(a1 <= a2 for a1, a2 in zip(amps, amps[1:]))


def test_sweep_rejects_nonfinite():
    with pytest.raises(ValueError):
        analysis.sweep_R(SimConfig(), [math.nan])
