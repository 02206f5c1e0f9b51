"""Flat ``key = value`` configuration shared by the config file and CLI flags."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable

from .model import ModelConfig, Nonlinearity, NonlinearitySpec
from .solver import Grid1D, InitialCondition, SimConfig


class ConfigError(ValueError):
    pass


def _floats(text: str) -> list:
    return [float(v) for v in str(text).replace(";", ",").split(",") if v.strip()]


def _phi(text: str) -> str:
    return Nonlinearity.parse(text).value


@dataclass(frozen=True)
class Key:
    name: str
    parse: Callable[[str], Any]
    default: Any
    help: str


def _format(text: str) -> str:
    if text not in ("csv", "svg", "both"):
        raise ValueError("format must be csv, svg or both")
    return text


KEYS = {k.name: k for k in [
    Key("out", str, ".", "output directory"),
    Key("format", _format, "both", "csv | svg | both"),
    Key("grid.x_min", float, -5.0, "left end of the domain"),
    Key("grid.x_max", float, 5.0, "right end of the domain"),
    Key("grid.h", float, 0.05, "grid spacing (must put -1, 0, 1 on nodes)"),
    Key("dt", float, 1e-4, "time step"),
    Key("t_end", float, 2.0, "final time"),
    Key("R", float, 12.0, "trend coupling"),
    Key("phi", _phi, "tanh", "nonlinearity: sign | linear | tanh (or phi1/phi2/phi3)"),
    Key("diffusion", float, 1.0, "sigma^2 / 2"),
    Key("transaction_cost", float, 1.0, "a"),
    Key("epsilon", float, 0.01, "initial perturbation amplitude"),
    Key("perturbation", str, "even", "initial perturbation shape: even | odd | none"),
    Key("rho", float, 1.0, "equilibrium / wave amplitude"),
    Key("left_bc", float, 1.0, "Dirichlet value at x_min"),
    Key("right_bc", float, -1.0, "Dirichlet value at x_max"),
    Key("picard_iters", int, 2, "Picard sweeps per step"),
    Key("wx_guard", float, 1e-6, "minimum |w_x(0)|"),
    Key("snapshot_stride", int, 10, "steps between stored snapshots"),
    Key("advection", str, "central", "central | upwind"),
    Key("snapshot_times", _floats, [], "times of snapshot CSV/SVG files (comma list)"),
    Key("discard_fraction", float, 0.5, "transient fraction skipped by the period estimate"),
    Key("a_max", float, 25.0, "largest a scanned for crossings"),
    Key("c", float, 2.0, "wave speed"),
    Key("x_plot", float, 5.0, "wave profiles are sampled on [-x_plot, x_plot]"),
    Key("n_plot", int, 401, "number of wave samples"),
    Key("R_values", _floats, [0.0, 5.0, 9.0, 12.0, 15.0], "R list for sweep / existence map"),
    Key("workers", int, 1, "parallel simulations in sweep"),
    Key("delta_mass", float, 1.0, "discrete delta mass (test hook; 1 is correct)"),
]}


def parse_text(text: str, source: str = "<config>") -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key] = value
    return out


def resolve(file_values: dict | None = None, overrides: dict | None = None,
            allowed=None) -> dict:
    """Merge defaults, file values and CLI overrides; parse and validate keys."""
    allowed = set(KEYS) if allowed is None else set(allowed)
    raw = dict(file_values or {})
    raw.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = {k: KEYS[k].default for k in allowed}
    for key, value in raw.items():
        if key not in KEYS or key not in allowed:
            raise ConfigError(f"unknown key {key!r}")
        try:
            cfg[key] = KEYS[key].parse(value) if isinstance(value, str) else value
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {value!r} ({exc})") from None
    return cfg


def load_values(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_text(text, str(path))


def load(path: str | Path | None, overrides: dict | None = None, allowed=None) -> dict:
    values = load_values(path) if path is not None else {}
    return resolve(values, overrides, allowed)


def sim_config(cfg: dict) -> SimConfig:
    try:
        grid = Grid1D.from_spacing(cfg["grid.x_min"], cfg["grid.x_max"], cfg["grid.h"])
        model = ModelConfig(cfg["diffusion"], cfg["transaction_cost"], cfg["R"],
                            NonlinearitySpec(cfg["phi"]))
        init = InitialCondition(cfg["epsilon"], cfg["perturbation"], cfg["rho"])
        return SimConfig(grid=grid, dt=cfg["dt"], t_end=cfg["t_end"], model=model,
                         left_bc=cfg["left_bc"], right_bc=cfg["right_bc"], initial=init,
                         picard_iters=cfg["picard_iters"], wx_guard=cfg["wx_guard"],
                         snapshot_stride=cfg["snapshot_stride"], advection=cfg["advection"],
                         delta_mass=cfg["delta_mass"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


SIM_KEYS = ["grid.x_min", "grid.x_max", "grid.h", "dt", "t_end", "R", "phi", "diffusion",
            "transaction_cost", "epsilon", "perturbation", "rho", "left_bc", "right_bc",
            "picard_iters", "wx_guard", "snapshot_stride", "advection", "delta_mass"]
