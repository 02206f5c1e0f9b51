"""Crank-Nicolson integrator for the moving-frame free-boundary equation

    w_t = k w_xx + p' w_x - k w_x(0) [d(-a) - d(a)]
          - R p' [phi(w(-a)) d(-a) - phi(w(a)) d(a)],
    w(0, t) = 0,   p' = -k w_xx(0) / w_x(0),

on a bounded interval with Dirichlet data.  Diffusion is treated
Crank-Nicolson; advection and the two point sources are explicit with a
few Picard sweeps that average the old and the latest iterate.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_banded

from .model import EquilibriumProfile, ModelConfig, equilibrium_eval, phi_eval

OK = "OK"
BLOWUP = "BLOWUP"
GUARD = "GUARD"


class SolverError(RuntimeError):
    pass


class GuardTripped(SolverError):
    """|w_x(0)| fell below the guard: the profile went flat at the free boundary."""


class NonFinite(SolverError):
    """A node became inf or nan."""


class OffGridError(ValueError):
    pass


_NODE_TOL = 1e-9


@dataclass(frozen=True)
class Grid1D:
    x_min: float = -5.0
    x_max: float = 5.0
    n_cells: int = 200

    def __post_init__(self):
        if not (self.x_min < -1.0 < 0.0 < 1.0 < self.x_max):
            raise ValueError("grid must satisfy x_min < -1 < 0 < 1 < x_max")
        if self.n_cells < 4:
            raise ValueError("n_cells too small")
        for x0 in (-1.0, 0.0, 1.0):
            s = (x0 - self.x_min) / self.h
            if abs(s - round(s)) > _NODE_TOL:
                raise OffGridError(f"x = {x0} is not a grid node (h = {self.h})")

    @classmethod
    def from_spacing(cls, x_min: float = -5.0, x_max: float = 5.0, h: float = 0.05) -> "Grid1D":
        n = (x_max - x_min) / h
        if abs(n - round(n)) > _NODE_TOL:
            raise OffGridError(f"h = {h} does not divide [{x_min}, {x_max}]")
        return cls(x_min, x_max, int(round(n)))

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    @property
    def n_nodes(self) -> int:
        return self.n_cells + 1

    @property
    def zero_index(self) -> int:
        return self.index_of(0.0)

    @functools.cached_property
    def x(self) -> np.ndarray:
        # Built outward from the node at 0 so that 0 and +-1 are exact.
        i0 = int(round(-self.x_min / self.h))
        x = (np.arange(self.n_nodes) - i0) * self.h
        x[0], x[-1] = self.x_min, self.x_max
        x.setflags(write=False)
        return x

    def index_of(self, x0: float) -> int:
        s = (x0 - self.x_min) / self.h
        i = int(round(s))
        if abs(s - i) > _NODE_TOL or not 0 <= i < self.n_nodes:
            raise OffGridError(f"x0 = {x0} is not a grid node")
        return i

    def is_symmetric(self) -> bool:
        return abs(self.x_min + self.x_max) < _NODE_TOL * self.h

    def mirror(self, f):
        """Values of ``f`` at the mirrored nodes -x (symmetric grids only)."""
        if not self.is_symmetric():
            raise ValueError("grid is not symmetric about 0")
        return np.asarray(f)[..., ::-1]


def discrete_delta(grid: Grid1D, x0: float) -> np.ndarray:
    """Kronecker delta of unit discrete mass at the node ``x0``."""
    out = np.zeros(grid.n_nodes)
    out[grid.index_of(x0)] = 1.0 / grid.h
    return out


@dataclass(frozen=True)
class InitialCondition:
    """Equilibrium of amplitude ``rho`` plus ``epsilon`` times a bump on |x| < a.

    shape: ``even`` = sin^2(pi x / a), ``odd`` = sin(pi x / a), ``none``.
    Both bumps vanish at 0 and at +-a, so the pinning and the kink
    values are untouched.
    """

    epsilon: float = 0.01
    shape: str = "even"
    rho: float = 1.0

    def __post_init__(self):
        if self.shape not in ("even", "odd", "none"):
            raise ValueError(f"unknown perturbation shape {self.shape!r}")

    def sample(self, grid: Grid1D, a: float = 1.0) -> np.ndarray:
        x = grid.x
        w = equilibrium_eval(EquilibriumProfile(self.rho), a, x)
        inside = np.abs(x) <= a
        if self.shape == "even":
            w = w + self.epsilon * np.where(inside, np.sin(np.pi * x / a) ** 2, 0.0)
        elif self.shape == "odd":
            w = w + self.epsilon * np.where(inside, np.sin(np.pi * x / a), 0.0)
        w[grid.zero_index] = 0.0
        return w


@dataclass(frozen=True)
class SimConfig:
    grid: Grid1D = field(default_factory=lambda: Grid1D.from_spacing(-5.0, 5.0, 0.05))
    dt: float = 1e-4
    t_end: float = 2.0
    model: ModelConfig = field(default_factory=ModelConfig)
    left_bc: float = 1.0
    right_bc: float = -1.0
    initial: InitialCondition = field(default_factory=InitialCondition)
    picard_iters: int = 2
    wx_guard: float = 1e-6
    snapshot_stride: int = 10
    advection: str = "central"
    delta_mass: float = 1.0  # test hook: 1.0 is the only consistent value

    def __post_init__(self):
        if not self.dt > 0 or not self.t_end > 0:
            raise ValueError("dt and t_end must be positive")
        if self.picard_iters < 1:
            raise ValueError("picard_iters must be >= 1")
        if not self.wx_guard > 0:
            raise ValueError("wx_guard must be positive")
        if self.snapshot_stride < 1:
            raise ValueError("snapshot_stride must be >= 1")
        if self.advection not in ("central", "upwind"):
            raise ValueError("advection must be 'central' or 'upwind'")
        a = self.model.transaction_cost
        if not (self.grid.x_min < -a and a < self.grid.x_max):
            raise ValueError("transaction cost points must lie inside the grid")
        self.grid.index_of(-a)
        self.grid.index_of(a)

    @property
    def n_steps(self) -> int:
        return int(round(self.t_end / self.dt))

    def with_R(self, R: float) -> "SimConfig":
        return replace(self, model=replace(self.model, trend_coupling=R))


@dataclass
class SimState:
    w: np.ndarray
    t: float = 0.0
    p: float = 0.0
    p_prime: float = 0.0


def _d1_zero(w, i0, h):
    return (w[i0 + 1] - w[i0 - 1]) / (2.0 * h)


def compute_p_prime(state: SimState, grid: Grid1D, guard: float = 1e-6,
                    diffusion: float = 1.0) -> float:
    """Free-boundary speed -k D2 w(0) / D1 w(0) from central differences."""
    w = state.w
    i0 = grid.zero_index
    h = grid.h
    d1 = _d1_zero(w, i0, h)
    if not abs(d1) >= guard:
        raise GuardTripped(f"|w_x(0)| = {abs(d1):.3e} below guard {guard:g} at t = {state.t:g}")
    # pinned value w(0) = 0 is used regardless of what is stored
    d2 = (w[i0 - 1] + w[i0 + 1]) / (h * h)
    return -diffusion * d2 / d1


class _Stepper:
    """Per-config cache of the banded CN matrix and index bookkeeping."""

    def __init__(self, config: SimConfig):
        g = config.grid
        n = g.n_nodes
        h = g.h
        k = config.model.diffusion
        self.config = config
        self.h = h
        self.k = k
        self.i0 = g.zero_index
        a = config.model.transaction_cost
        self.im = g.index_of(-a)
        self.ip = g.index_of(a)
        self.R = config.model.trend_coupling
        self.phi = config.model.nonlinearity
        self.free = np.ones(n, dtype=bool)
        self.free[[0, n - 1, self.i0]] = False
        r = 0.5 * config.dt * k / (h * h)
        ab = np.zeros((3, n))
        ab[1, :] = 1.0
        idx = np.nonzero(self.free)[0]
        ab[1, idx] = 1.0 + 2.0 * r
        ab[0, idx + 1] = -r  # super-diagonal: row i, column i + 1
        ab[2, idx - 1] = -r  # sub-diagonal: row i, column i - 1
        self.ab = ab
        self.r = r
        self.src = config.delta_mass / h

    def laplacian(self, w):
        out = np.zeros_like(w)
        out[1:-1] = (w[:-2] - 2.0 * w[1:-1] + w[2:]) / (self.h * self.h)
        return out

    def explicit(self, w, pp):
        """Advection plus point sources, with p' = ``pp`` given."""
        h = self.h
        out = np.zeros_like(w)
        if self.config.advection == "central":
            out[1:-1] = pp * (w[2:] - w[:-2]) / (2.0 * h)
        elif pp >= 0.0:
            out[1:-1] = pp * (w[2:] - w[1:-1]) / h
        else:
            out[1:-1] = pp * (w[1:-1] - w[:-2]) / h
        flux = self.k * _d1_zero(w, self.i0, h)
        out[self.im] += (-flux - self.R * pp * phi_eval(self.phi, float(w[self.im]))) * self.src
        out[self.ip] += (flux + self.R * pp * phi_eval(self.phi, float(w[self.ip]))) * self.src
        return out

    def p_prime(self, w, t):
        return compute_p_prime(SimState(w, t), self.config.grid, self.config.wx_guard, self.k)

    def step(self, state: SimState) -> SimState:
        with np.errstate(over="ignore", invalid="ignore"):
            return self._step(state)

    def _step(self, state: SimState) -> SimState:
        cfg = self.config
        dt = cfg.dt
        w0 = state.w
        pp0 = state.p_prime
        t1 = state.t + dt
        base = w0 + 0.5 * dt * self.k * self.laplacian(w0)
        e0 = self.explicit(w0, pp0)
        e = e0
        w = w0
        for it in range(cfg.picard_iters):
            if it > 0:
                e = 0.5 * (e0 + self.explicit(w, self.p_prime(w, t1)))
            rhs = base + dt * e
            rhs[0] = cfg.left_bc
            rhs[-1] = cfg.right_bc
            rhs[self.i0] = 0.0
            w = solve_banded((1, 1), self.ab, rhs, check_finite=False)
            if not np.all(np.isfinite(w)):
                raise NonFinite(f"non-finite field at t = {t1:g}")
        w[self.i0] = 0.0
        w[0] = cfg.left_bc
        w[-1] = cfg.right_bc
        pp1 = self.p_prime(w, t1)
        if not math.isfinite(pp1):
            raise NonFinite(f"non-finite p' at t = {t1:g}")
        p1 = state.p + 0.5 * dt * (pp0 + pp1)
        return SimState(w, t1, p1, pp1)


@functools.lru_cache(maxsize=32)
def _stepper(config: SimConfig) -> _Stepper:
    return _Stepper(config)


def initial_state(config: SimConfig) -> SimState:
    w = config.initial.sample(config.grid, config.model.transaction_cost)
    w[0] = config.left_bc
    w[-1] = config.right_bc
    st = SimState(w, 0.0, 0.0, 0.0)
    st.p_prime = _stepper(config).p_prime(w, 0.0)
    return st


def cn_step(state: SimState, config: SimConfig) -> SimState:
    """Advance one time step.  Raises GuardTripped or NonFinite."""
    return _stepper(config).step(state)


@dataclass(frozen=True)
class SimTrace:
    times: np.ndarray
    p_series: np.ndarray
    p_prime_series: np.ndarray
    flux_series: np.ndarray
    snapshot_times: np.ndarray
    snapshots: np.ndarray  # (n_snapshots, n_nodes)
    x: np.ndarray
    status: str = OK
    message: str = ""
    config: SimConfig | None = None

    @property
    def complete(self) -> bool:
        return self.status == OK

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0]) if len(self.times) > 1 else 0.0


def simulate(config: SimConfig, state: SimState | None = None) -> SimTrace:
    """Run from the configured initial condition to ``t_end``.

    Failures do not raise: the trace is truncated and tagged BLOWUP or GUARD.
    """
    stepper = _stepper(config)
    n = config.n_steps
    k = config.model.diffusion
    i0 = config.grid.zero_index
    h = config.grid.h
    status, message = OK, ""
    times = np.empty(n + 1)
    p = np.empty(n + 1)
    pp = np.empty(n + 1)
    flux = np.empty(n + 1)
    snap_t, snaps = [], []
    try:
        st = initial_state(config) if state is None else state
    except GuardTripped as exc:
        st = SimState(config.initial.sample(config.grid, config.model.transaction_cost))
        return SimTrace(np.empty(0), np.empty(0), np.empty(0), np.empty(0),
                        np.array([0.0]), st.w[None, :].copy(), config.grid.x,
                        GUARD, str(exc), config)

    def record(j, s):
        times[j] = s.t
        p[j] = s.p
        pp[j] = s.p_prime
        flux[j] = -k * _d1_zero(s.w, i0, h)
        if j % config.snapshot_stride == 0:
            snap_t.append(s.t)
            snaps.append(s.w.copy())

    record(0, st)
    last = 0
    for j in range(1, n + 1):
        try:
            st = stepper.step(st)
        except GuardTripped as exc:
            status, message = GUARD, str(exc)
            break
        except NonFinite as exc:
            status, message = BLOWUP, str(exc)
            break
        record(j, st)
        last = j
    m = last + 1
    return SimTrace(times[:m].copy(), p[:m].copy(), pp[:m].copy(), flux[:m].copy(),
                    np.array(snap_t), np.array(snaps), config.grid.x, status, message, config)
