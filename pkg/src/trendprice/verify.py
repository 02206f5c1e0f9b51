"""Cross-module invariant suite run by ``trendprice verify``."""

from __future__ import annotations

import itertools
import math

import numpy as np

from . import analysis, spectral, waves
from .model import PHI1, PHI2, PHI3, EquilibriumProfile, ModelConfig, equilibrium_eval, phi_eval, sign_parts
from .solver import Grid1D, InitialCondition, SimConfig, cn_step, initial_state, simulate


def check_phi_odd(**_):
    r = np.concatenate([np.linspace(-5, 5, 1001), [0.0, 1e-300, 1e300]])
    worst = 0.0
    for phi in (PHI1, PHI2, PHI3):
        worst = max(worst, float(np.max(np.abs(phi_eval(phi, -r) + phi_eval(phi, r)))))
        if phi_eval(phi, 1.0) != 1.0 and abs(phi_eval(phi, 1.0) - 1.0) > 1e-15:
            return False, f"{phi.label}(1) = {phi_eval(phi, 1.0)!r}"
    return worst == 0.0, f"max |phi(-r) + phi(r)| = {worst:.3e}"


def check_sign_parts(**_):
    x = np.linspace(-5, 5, 201)
    w = equilibrium_eval(EquilibriumProfile(), 1.0, x) + 0.3 * np.sin(7 * x)
    b, v = sign_parts(w)
    return bool(np.all(b - v == w)), "buyer - vendor == w"


def check_equilibrium_stationarity(delta_mass=1.0, steps=100, **_):
    worst = 0.0
    for phi, R in itertools.product((PHI1, PHI2, PHI3), (-2.0, 0.0, 12.0)):
        cfg = SimConfig(model=ModelConfig(trend_coupling=R, nonlinearity=phi),
                        initial=InitialCondition(0.0, "none"), delta_mass=delta_mass)
        st = initial_state(cfg)
        w0 = st.w.copy()
        for _ in range(steps):
            st = cn_step(st, cfg)
            worst = max(worst, float(np.max(np.abs(st.w - w0))))
    return worst < 1e-12, f"max drift over {steps} steps = {worst:.3e}"


def check_wave_residuals(**_):
    worst = 0.0
    for c, rho, phi in itertools.product((0.5, 2.0, -0.5, -2.0), (0.5, 1.0, 2.598), (PHI1, PHI3)):
        worst = max(worst, waves.wave_residual(waves.build_wave(c, rho, phi)).worst)
    return worst < 1e-10, f"worst residual = {worst:.3e}"


def check_wave_reflection(**_):
    x = np.linspace(-6, 6, 241)
    worst = 0.0
    for c, rho, phi in itertools.product((0.3, 1.0, 3.0), (0.5, 1.0, 4.0), (PHI1, PHI2, PHI3)):
        pos = waves.wave_eval(waves.build_wave(c, rho, phi), -x)
        neg = waves.wave_eval(waves.build_wave(-c, rho, phi), x)
        worst = max(worst, float(np.max(np.abs(neg + pos))))
    return worst == 0.0, f"max |w_-c(x) + w_c(-x)| = {worst:.3e}"


def check_equilibrium_limit(**_):
    x = np.linspace(-5, 5, 1001)
    eq = equilibrium_eval(EquilibriumProfile(), 1.0, x)
    devs = []
    for phi in (PHI1, PHI3):
        d = [float(np.max(np.abs(waves.wave_eval(waves.build_wave(c, 1.0, phi), x) - eq)))
             for c in (0.1, 0.01, 0.001)]
        devs.append(d)
    ok = all(d[0] > d[1] > d[2] and 5 < d[0] / d[1] < 20 and 5 < d[1] / d[2] < 20 for d in devs)
    return ok, "deviations " + "; ".join(", ".join(f"{v:.2e}" for v in d) for d in devs)


def operator_convergence(h=0.05):
    """Residual ratios r(h) / r(h/2) for the odd compact mode and the first crossing."""
    out = []
    crossing = spectral.find_crossings(5.0)[0]
    pairs = [
        (lambda x: spectral.odd_eigenfunction(2 * math.pi, x), -4 * math.pi ** 2, 0.0),
        (lambda x: spectral.crossing_eigenfunction(crossing.a_value, crossing.R_value, x),
         crossing.lam, crossing.R_value),
    ]
    for g, lam, R in pairs:
        res = []
        for hh in (h, h / 2):
            grid = Grid1D.from_spacing(-5.0, 5.0, hh)
            res.append(spectral.operator_residual(lam, g(grid.x), R, grid))
        out.append((res[0], res[1], res[0] / res[1]))
    return out


def check_operator_convergence(**_):
    rows = operator_convergence()
    ok = all(3.5 <= r <= 4.5 for _, _, r in rows)
    return ok, "ratios " + ", ".join(f"{r:.3f}" for _, _, r in rows)


def check_crossings(**_):
    recs = spectral.find_crossings(spectral.DEFAULT_A_MAX)
    worst_res = max(abs(spectral.crossing_residual(c.a_value)) for c in recs)
    worst_R = max(abs(c.R_from_cosine - c.R_from_sine) for c in recs)
    dirs = all(c.direction == (1 if c.R_value > 0 else -1) for c in recs)
    ok = worst_res < 1e-12 and worst_R < 1e-9 * max(abs(c.R_value) for c in recs) and dirs
    return ok, f"{len(recs)} crossings, residual {worst_res:.1e}, R gap {worst_R:.1e}"


def check_trace_integral(**_):
    cfg = SimConfig(model=ModelConfig(trend_coupling=12.0), t_end=0.05)
    tr = simulate(cfg)
    dt = np.diff(tr.times)
    ref = np.concatenate([[0.0], np.cumsum(0.5 * dt * (tr.p_prime_series[1:] + tr.p_prime_series[:-1]))])
    err = float(np.max(np.abs(ref - tr.p_series)))
    return err < 1e-14, f"max |p - trapz(p')| = {err:.1e}"


def check_synthetic_period(seed=0, **_):
    rng = np.random.default_rng(seed)
    dt, T0 = 1e-4, 0.2088
    t = np.arange(0, 2 + dt / 2, dt)
    worst = 0.0
    for _ in range(20):
        amp = 10 ** rng.uniform(-6, 2)
        phase = rng.uniform(0, 2 * math.pi)
        est = analysis.period_from_signal(t[len(t) // 4:], amp * np.sin(2 * math.pi * t[len(t) // 4:] / T0 + phase))
        if est is None:
            return False, "no estimate"
        worst = max(worst, abs(est.period - T0))
    return worst <= 2 * dt, f"worst error {worst:.2e} (limit {2 * dt:.0e})"


CHECKS = [
    ("phi odd symmetry", check_phi_odd),
    ("sign-part reconstruction", check_sign_parts),
    ("discrete equilibrium stationarity", check_equilibrium_stationarity),
    ("wave residuals", check_wave_residuals),
    ("wave reflection identity", check_wave_reflection),
    ("wave c->0 equilibrium limit", check_equilibrium_limit),
    ("operator residual O(h^2)", check_operator_convergence),
    ("crossing record consistency", check_crossings),
    ("trace integral consistency", check_trace_integral),
    ("synthetic period recovery", check_synthetic_period),
]


def run_checks(delta_mass: float = 1.0):
    """Yield ``(name, passed, detail)`` for every check."""
    for name, fn in CHECKS:
        try:
            ok, detail = fn(delta_mass=delta_mass)
        except Exception as exc:  # a crash is a failed check, not an aborted suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, bool(ok), detail
