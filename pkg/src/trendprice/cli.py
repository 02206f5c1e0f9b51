"""Command line front end: spectrum | waves | simulate | sweep | verify."""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import analysis, config, spectral, waves
from .model import EquilibriumProfile, NonlinearitySpec, equilibrium_eval
from .output import csv_text, fmt, svg_lineplot, write_all
from .solver import OK, simulate
from .verify import run_checks

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_VERIFY = 4

COMMAND_KEYS = {
    "spectrum": ["a_max", "R"],
    "waves": ["c", "rho", "phi", "x_plot", "n_plot", "R_values"],
    "simulate": config.SIM_KEYS + ["snapshot_times", "discard_fraction"],
    "sweep": config.SIM_KEYS + ["R_values", "workers", "discard_fraction"],
    "verify": ["delta_mass"],
}

COMMON_KEYS = ["out", "format"]

# defaults that differ per command
COMMAND_DEFAULTS = {
    "waves": {"phi": "sign", "R_values": "-0.1,-0.5,-0.7,-0.8,-1,-2,-5,-10"},
}


def _emit(cfg, files: dict):
    fmt_ = cfg["format"]
    keep = {k: v for k, v in files.items()
            if fmt_ == "both" or k.endswith("." + fmt_)}
    write_all(cfg["out"], keep)


def run_spectrum(args, cfg) -> int:
    recs = spectral.find_crossings(cfg["a_max"])
    rows = [(c.index, c.a_value, c.R_value, c.lam.real, c.lam.imag, c.direction) for c in recs]
    a = np.linspace(0.02, min(cfg["a_max"], 12.0), 1200)
    r_sin = -np.exp(a) * np.sin(a) / a
    r_cos = (1 - np.exp(a) * np.cos(a)) / a
    files = {
        "crossings.csv": csv_text(["index", "a", "R", "re_lambda", "im_lambda", "direction"], rows),
        "spectrum.svg": svg_lineplot(
            [(a, np.arcsinh(r_sin), "R = -e^a sin(a)/a"), (a, np.arcsinh(r_cos), "R = (1 - e^a cos a)/a"),
             ([c.a_value for c in recs if c.a_value <= a[-1]],
              [math.asinh(c.R_value) for c in recs if c.a_value <= a[-1]], "crossings")],
            "Imaginary-axis crossings", "a", "asinh(R)"),
    }
    first_pos = next((c for c in recs if c.R_value > 0), None)
    first_neg = next((c for c in recs if c.R_value < 0), None)
    if first_pos is not None:
        # eigenfunction q0 at the first Hopf crossing
        xs = np.linspace(-5.0, 5.0, 401)
        q = spectral.crossing_eigenfunction(first_pos.a_value, first_pos.R_value, xs)
        files["eigenfunction.csv"] = csv_text(["x", "re_q", "im_q"], zip(xs, q.real, q.imag))
        files["eigenfunction.svg"] = svg_lineplot([(xs, q.real, "Re q0"), (xs, q.imag, "Im q0")],
                                                  "Eigenfunction at the first crossing", "x", "q0")
    _emit(cfg, files)
    if first_pos is not None:
        print(f"a0={first_pos.a_value:.15f}")
        print(f"R0={first_pos.R_value:.15f}")
        print(f"lambda0={first_pos.lam.imag:.15f}i")
    if first_neg is not None:
        print(f"a1={first_neg.a_value:.15f}")
        print(f"R1={first_neg.R_value:.15f}")
    real = spectral.real_unstable_eigenvalue(cfg["R"])
    print(f"R={cfg['R']:.15g} real_unstable={'none' if real is None else fmt(real[1])}")
    print(f"crossings={len(recs)}")
    return EXIT_OK


def run_waves(args, cfg) -> int:
    phi = NonlinearitySpec(cfg["phi"])
    prof = waves.build_wave(cfg["c"], cfg["rho"], phi)
    x = np.linspace(-cfg["x_plot"], cfg["x_plot"], cfg["n_plot"])
    w = waves.wave_eval(prof, x)
    ex_rows = []
    for R in cfg["R_values"]:
        em = waves.solve_rho(R, phi)
        if em.is_continuum:
            ex_rows.append((R, waves.ALL_RHO))
        else:
            ex_rows.extend((R, r) for r in em.admissible_rho)
    eq = equilibrium_eval(EquilibriumProfile(cfg["rho"]), 1.0, x)
    files = {
        "wave.csv": csv_text(["x", "w"], zip(x, w)),
        "existence.csv": csv_text(["R", "rho"], ex_rows),
        "wave.svg": svg_lineplot([(x, w, f"c={cfg['c']:g}, rho={cfg['rho']:g}, {phi.label}"),
                                  (x, eq, "equilibrium")],
                                 "Traveling wave profile", "x", "w"),
    }
    _emit(cfg, files)
    res = waves.wave_residual(prof)
    print(f"required_R={prof.required_R:.15g}")
    print(f"limit_left={prof.left_limit:.15g}")
    print(f"limit_right={prof.right_limit:.15g}")
    print(f"max_residual={res.worst:.3e}")
    return EXIT_OK


def _nearest(times, t):
    return int(np.argmin(np.abs(np.asarray(times) - t)))


def run_simulate(args, cfg) -> int:
    sc = config.sim_config(cfg)
    tr = simulate(sc)
    files = {
        "trace.csv": csv_text(["t", "p", "p_prime", "flux"],
                              zip(tr.times, tr.p_series, tr.p_prime_series, tr.flux_series)),
        "price.svg": svg_lineplot([(tr.times, tr.p_series, "p(t)")], "Price", "t", "p"),
    }
    if len(tr.snapshot_times):
        req = cfg["snapshot_times"]
        picks = ([_nearest(tr.snapshot_times, t) for t in req] if req
                 else sorted(set(np.linspace(0, len(tr.snapshot_times) - 1, 11).astype(int).tolist())))
        series = []
        for k in picks:
            t = tr.snapshot_times[k]
            files[f"snapshots/w_t{t:.6f}.csv"] = csv_text(["x", "w"], zip(tr.x, tr.snapshots[k]))
            series.append((tr.x, tr.snapshots[k], f"t={t:.4f}"))
            if req:
                files[f"snapshots/w_t{t:.6f}.svg"] = svg_lineplot([(tr.x, tr.snapshots[k], f"t={t:.4f}")],
                                                                   f"w(x, {t:.4f})", "x", "w")
        files["snapshots.svg"] = svg_lineplot(series, "Field snapshots", "x", "w")
    _emit(cfg, files)
    print(f"status={tr.status}")
    print(f"t_final={tr.times[-1] if len(tr.times) else 0.0:.6g}")
    if tr.status != OK:
        print(f"message={tr.message}")
        return EXIT_NUMERICAL
    point = analysis.classify(tr, sc.model.trend_coupling, cfg["discard_fraction"])
    print(f"classification={point.classification.value}")
    if point.classification is analysis.Classification.DECAY:
        print("decayed")
    est = analysis.estimate_period(tr, cfg["discard_fraction"])
    if est is not None and point.classification is not analysis.Classification.DECAY:
        print(f"period={est.period:.10g}")
        print(f"dispersion={est.dispersion:.3e}")
        print(f"cycles={est.cycles}")
        try:
            sym = analysis.half_period_antisymmetry(tr, est.period, max(cfg["discard_fraction"], 0.75))
            print(f"antisymmetry={sym:.3e}")
        except analysis.InsufficientSnapshots:
            pass
    return EXIT_OK


def run_sweep(args, cfg) -> int:
    base = config.sim_config(cfg)
    pts = analysis.sweep_R(base, cfg["R_values"], workers=cfg["workers"])
    rows = [(p.R, p.classification.value, p.amplitude,
             p.period.period if p.period else None,
             p.period.dispersion if p.period else None) for p in pts]
    files = {
        "sweep.csv": csv_text(["R", "classification", "amplitude", "period", "dispersion"], rows),
        "sweep.svg": svg_lineplot([([p.R for p in pts], [p.amplitude for p in pts], "peak-to-peak p")],
                                  "Bifurcation sweep", "R", "amplitude"),
    }
    _emit(cfg, files)
    for p in pts:
        print(f"R={p.R:g} classification={p.classification.value} amplitude={p.amplitude:.4e}"
              + (f" period={p.period.period:.6g}" if p.period else ""))
    return EXIT_OK


def run_verify(args, cfg) -> int:
    failed = 0
    for name, ok, detail in run_checks(delta_mass=cfg["delta_mass"]):
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        failed += not ok
    return EXIT_OK if failed == 0 else EXIT_VERIFY


RUNNERS = {"spectrum": run_spectrum, "waves": run_waves, "simulate": run_simulate,
           "sweep": run_sweep, "verify": run_verify}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="trendprice", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, keys in COMMAND_KEYS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="flat key = value file")
        for key in COMMON_KEYS + keys:
            k = config.KEYS[key]
            p.add_argument(f"--{key}", dest=key, default=None, metavar="VALUE",
                           help=f"{k.help} (default {k.default})")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    keys = COMMON_KEYS + COMMAND_KEYS[args.command]
    overrides = {k: getattr(args, k) for k in keys}
    try:
        merged = dict(COMMAND_DEFAULTS.get(args.command, {}))
        if args.config:
            merged.update(config.load_values(args.config))
        cfg = config.resolve(merged, overrides, keys)
    except config.ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return RUNNERS[args.command](args, cfg)
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
