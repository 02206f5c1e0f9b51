"""Post-processing of simulation traces: periods, symmetry, classification."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .solver import BLOWUP, GUARD, SimConfig, SimTrace, simulate

DECAY_RATIO = 1e-4
GROWTH_RATIO = 10.0
DISPERSION_MAX = 0.05
SUSTAIN_RATIO = 0.5
MIN_CYCLES = 3
MIN_AMPLITUDE = 1e-8


class Classification(str, enum.Enum):
    DECAY = "DECAY"
    PERIODIC = "PERIODIC"
    UNBOUNDED = "UNBOUNDED"
    GUARD = "GUARD"


class InsufficientSnapshots(ValueError):
    pass


@dataclass(frozen=True)
class PeriodEstimate:
    period: float
    dispersion: float
    cycles: int

    @property
    def relative_dispersion(self) -> float:
        return self.dispersion / self.period

    @property
    def is_periodic(self) -> bool:
        return self.cycles >= MIN_CYCLES and self.relative_dispersion < DISPERSION_MAX


@dataclass(frozen=True)
class BifurcationPoint:
    R: float
    classification: Classification
    amplitude: float
    period: PeriodEstimate | None = None
    message: str = ""


def _crossing_times(t, y, rising: bool):
    if rising:
        idx = np.nonzero((y[:-1] < 0) & (y[1:] >= 0))[0]
    else:
        idx = np.nonzero((y[:-1] > 0) & (y[1:] <= 0))[0]
    y0, y1 = y[idx], y[idx + 1]
    return t[idx] - y0 * (t[idx + 1] - t[idx]) / (y1 - y0)


def period_from_signal(t, y) -> PeriodEstimate | None:
    """Period from mean-removed zero crossings, linearly interpolated.

    Gaps between successive crossings of the same direction are pooled.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        return None
    y = y - y.mean()
    if np.ptp(y) < MIN_AMPLITUDE:
        return None
    up = np.diff(_crossing_times(t, y, True))
    down = np.diff(_crossing_times(t, y, False))
    cycles = max(len(up), len(down))
    if cycles < MIN_CYCLES:
        return None
    gaps = np.concatenate([up, down])
    return PeriodEstimate(float(gaps.mean()), float(gaps.std()), int(cycles))


def _tail(trace: SimTrace, discard_fraction: float):
    if not 0 <= discard_fraction < 1:
        raise ValueError("discard_fraction must lie in [0, 1)")
    start = int(len(trace.times) * discard_fraction)
    return trace.times[start:], start


def estimate_period(trace: SimTrace, discard_fraction: float = 0.5) -> PeriodEstimate | None:
    t, start = _tail(trace, discard_fraction)
    return period_from_signal(t, trace.p_series[start:])


def half_period_antisymmetry(trace: SimTrace, T: float, discard_fraction: float = 0.75) -> float:
    """max |w(x, t + T/2) + w(-x, t)| / max |w| over matched snapshot pairs in the tail."""
    st = np.asarray(trace.snapshot_times)
    snaps = np.asarray(trace.snapshots)
    if len(st) < 2:
        raise InsufficientSnapshots("need at least two snapshots")
    x = np.asarray(trace.x)
    if not np.allclose(x, -x[::-1], rtol=0, atol=1e-9):
        raise ValueError("grid must be symmetric about 0")
    tol = float(np.median(np.diff(st)))
    t0 = st[0] + discard_fraction * (st[-1] - st[0])
    worst = 0.0
    scale = 0.0
    pairs = 0
    for i in np.nonzero(st >= t0 - 1e-12)[0]:
        target = st[i] + 0.5 * T
        j = int(np.argmin(np.abs(st - target)))
        if abs(st[j] - target) > tol or j == i:
            continue
        pairs += 1
        worst = max(worst, float(np.max(np.abs(snaps[j] + snaps[i][::-1]))))
        scale = max(scale, float(np.max(np.abs(snaps[i]))), float(np.max(np.abs(snaps[j]))))
    if pairs == 0:
        raise InsufficientSnapshots("no snapshot pair separated by T/2 in the tail")
    return worst / scale if scale > 0 else 0.0


def oscillation_amplitude(t, y) -> float:
    """Peak-to-peak of ``y`` about its least-squares linear trend."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(y) < 3:
        return float(np.ptp(y)) if len(y) else 0.0
    coef = np.polyfit(t - t[0], y, 1)
    return float(np.ptp(y - np.polyval(coef, t - t[0])))


def classify(trace: SimTrace, R: float | None = None, discard_fraction: float = 0.5) -> BifurcationPoint:
    """Sort a run into DECAY / PERIODIC / UNBOUNDED / GUARD.

    Amplitudes are detrended peak-to-peak values of p' over the first and
    the last quarter of the run.
    """
    if R is None:
        R = trace.config.model.trend_coupling if trace.config is not None else math.nan
    n = len(trace.times)
    q = max(n // 4, 2)
    p_amp = float(np.ptp(trace.p_series[-q:])) if n else 0.0
    if trace.status == BLOWUP:
        return BifurcationPoint(R, Classification.UNBOUNDED, p_amp, None, trace.message)
    if trace.status == GUARD:
        return BifurcationPoint(R, Classification.GUARD, p_amp, None, trace.message)
    t, pp = trace.times, trace.p_prime_series
    early = oscillation_amplitude(t[:q], pp[:q])
    late = oscillation_amplitude(t[-q:], pp[-q:])
    h = max(q // 2, 2)
    growing = oscillation_amplitude(t[-h:], pp[-h:]) > oscillation_amplitude(t[-2 * h:-h], pp[-2 * h:-h])
    if late > GROWTH_RATIO * early and growing:
        return BifurcationPoint(R, Classification.UNBOUNDED, p_amp, None, "growing")
    if late < DECAY_RATIO * early:
        return BifurcationPoint(R, Classification.DECAY, p_amp)
    est = estimate_period(trace, discard_fraction)
    if est is not None and est.is_periodic and late >= SUSTAIN_RATIO * early:
        return BifurcationPoint(R, Classification.PERIODIC, p_amp, est)
    if late < early:
        return BifurcationPoint(R, Classification.DECAY, p_amp, est, "slow decay")
    return BifurcationPoint(R, Classification.UNBOUNDED, p_amp, est, "sustained, not periodic")


def _run_point(args):
    config, R = args
    return classify(simulate(config.with_R(R)), R)


def sweep_R(base: SimConfig, R_values, workers: int | None = 1) -> list:
    """Classify independent runs at each R; result sorted by R."""
    R_values = [float(r) for r in R_values]
    if not all(math.isfinite(r) for r in R_values):
        raise ValueError("R values must be finite")
    jobs = [(base, r) for r in R_values]
    if workers is not None and workers <= 1:
        points = [_run_point(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            points = list(ex.map(_run_point, jobs))
    return sorted(points, key=lambda p: p.R)


@dataclass(frozen=True)
class SignReport:
    max_violation: float
    first_t: float | None
    first_x: float | None

    @property
    def violated(self) -> bool:
        return self.first_t is not None


def sign_sanity(trace: SimTrace, tol: float = 1e-10) -> SignReport:
    """Largest breach of w >= 0 on x < 0 and w <= 0 on x > 0 over all snapshots."""
    x = np.asarray(trace.x)
    snaps = np.atleast_2d(np.asarray(trace.snapshots))
    viol = np.where(x < 0, -snaps, np.where(x > 0, snaps, 0.0))
    worst = float(max(viol.max(), 0.0)) if viol.size else 0.0
    hits = np.argwhere(viol > tol)
    if len(hits) == 0:
        return SignReport(worst, None, None)
    k, i = hits[0]
    return SignReport(worst, float(trace.snapshot_times[k]), float(x[i]))
