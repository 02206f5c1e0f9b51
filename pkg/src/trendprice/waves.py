"""Closed-form traveling waves.

A wave of speed c solves w'' + c w' = w'(0) [d(-1) - d(1)]
+ R c [phi(w(-1)) d(-1) - phi(w(1)) d(1)] with w(0) = 0, and is piecewise
A + B exp(-c x) on (-inf, -1), (-1, 1), (1, inf).  For c > 0 it is
parametrized by w(-inf) = rho; for c < 0 by w(+inf) = -rho, obtained by
the reflection w_c(x) = -w_{-c}(-x).  The coupling is forced to
R = -rho / phi(rho).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .model import Nonlinearity, NonlinearitySpec, as_spec, phi_eval

ALL_RHO = "ALL_RHO"
RHO_SCAN = 100.0
_ROOT_TOL = 1e-12


@dataclass(frozen=True)
class WaveProfile:
    c: float
    rho: float
    nonlinearity: NonlinearitySpec
    a1: float
    a2: float
    b1: float
    b2: float
    d1: float
    d2: float
    required_R: float

    def __call__(self, x):
        return wave_eval(self, x)

    @property
    def left_limit(self) -> float:
        return self.a1

    @property
    def right_limit(self) -> float:
        return self.d1


@dataclass(frozen=True)
class ExistenceMap:
    nonlinearity: NonlinearitySpec
    R: float
    admissible_rho: object  # list of floats, or ALL_RHO

    @property
    def is_continuum(self) -> bool:
        return self.admissible_rho == ALL_RHO

    @property
    def nonempty(self) -> bool:
        return self.is_continuum or len(self.admissible_rho) > 0


def required_R(rho: float, phi) -> float:
    if not rho > 0:
        raise ValueError("rho must be positive")
    return -rho / phi_eval(as_spec(phi), rho)


def build_wave(c: float, rho: float, phi) -> WaveProfile:
    if c == 0:
        raise ValueError("c = 0 is the equilibrium; use equilibrium_eval")
    if not rho > 0:
        raise ValueError("rho must be positive")
    phi = as_spec(phi)
    if c < 0:
        m = build_wave(-c, rho, phi)
        # w_c(x) = -w_{-c}(-x): branches swap sides, exp(c' x) == exp(-c x)
        return replace(m, c=c, a1=-m.d1, a2=-m.d2, b1=-m.b1, b2=-m.b2, d1=-m.a1, d2=-m.a2)
    ratio = phi_eval(phi, rho * math.exp(-c)) / phi_eval(phi, rho)
    b1 = -rho / math.expm1(c)
    return WaveProfile(
        c=c, rho=rho, nonlinearity=phi,
        a1=rho, a2=0.0, b1=b1, b2=-b1,
        d1=-rho * ratio, d2=-rho + math.exp(c) * rho * ratio,
        required_R=required_R(rho, phi),
    )


def wave_eval(profile: WaveProfile, x):
    """Piecewise evaluation; at x = +-1 the middle branch is used."""
    x = np.asarray(x, dtype=float)
    p = profile
    c = p.c
    # clip exponents per branch so unused branches cannot overflow
    left = p.a1 + p.a2 * np.exp(-c * np.minimum(x, -1.0)) if p.a2 else np.full_like(x, p.a1)
    mid = p.b1 + p.b2 * np.exp(-c * np.clip(x, -1.0, 1.0))
    right = p.d1 + p.d2 * np.exp(-c * np.maximum(x, 1.0)) if p.d2 else np.full_like(x, p.d1)
    out = np.where(x < -1, left, np.where(x > 1, right, mid))
    return float(out) if out.ndim == 0 else out


def _branch(p: WaveProfile, x: float):
    if x < -1:
        return p.a1, p.a2
    if x > 1:
        return p.d1, p.d2
    return p.b1, p.b2


def _value(A, B, c, x):
    return A + B * math.exp(-c * x)


def _slope(B, c, x):
    return -c * B * math.exp(-c * x)


@dataclass(frozen=True)
class WaveResidual:
    ode: float
    continuity_left: float
    continuity_right: float
    jump_left: float
    jump_right: float
    origin: float

    @property
    def worst(self) -> float:
        return max(self.ode, self.continuity_left, self.continuity_right,
                   self.jump_left, self.jump_right, self.origin)

    def ok(self, tol: float = 1e-10) -> bool:
        return self.worst < tol


def wave_residual(profile: WaveProfile, samples=None, R: float | None = None) -> WaveResidual:
    """Check the ODE on samples, continuity at +-1, both jump conditions and w(0).

    Derivatives are taken analytically from the exponential branches; ``R``
    defaults to the profile's required coupling.
    """
    p = profile
    c = p.c
    R = p.required_R if R is None else R
    phi = p.nonlinearity
    if samples is None:
        samples = [x for x in np.linspace(-4.95, 4.95, 67) if min(abs(x), abs(abs(x) - 1)) > 1e-9]
    ode = 0.0
    for x in samples:
        A, B = _branch(p, float(x))
        wx = _slope(B, c, x)
        wxx = -c * wx
        ode = max(ode, abs(wxx + c * wx))
    wm = _value(p.b1, p.b2, c, -1.0)
    wp = _value(p.b1, p.b2, c, 1.0)
    cont_l = abs(_value(p.a1, p.a2, c, -1.0) - wm)
    cont_r = abs(_value(p.d1, p.d2, c, 1.0) - wp)
    wx0 = _slope(p.b2, c, 0.0)
    jump_l = (_slope(p.b2, c, -1.0) - _slope(p.a2, c, -1.0)) - (wx0 + R * c * phi_eval(phi, wm))
    jump_r = (_slope(p.d2, c, 1.0) - _slope(p.b2, c, 1.0)) - (-wx0 - R * c * phi_eval(phi, wp))
    return WaveResidual(ode, cont_l, cont_r, abs(jump_l), abs(jump_r), abs(p.b1 + p.b2))


def solve_rho(R: float, phi, rho_scan: float = RHO_SCAN) -> ExistenceMap:
    """Amplitudes rho > 0 with phi(rho) = -rho / R (traveling waves exist iff nonempty)."""
    phi = as_spec(phi)
    if R >= 0:
        return ExistenceMap(phi, R, [])
    kind = phi.kind
    if kind is Nonlinearity.SIGN:
        return ExistenceMap(phi, R, [-R])
    if kind is Nonlinearity.LINEAR:
        # phi(rho) + rho / R = rho (1 + 1/R): identically zero at R = -1 only
        return ExistenceMap(phi, R, ALL_RHO if abs(R + 1.0) <= _ROOT_TOL else [])

    def f(r):
        return phi_eval(phi, r) + r / R

    grid = np.geomspace(1e-6, rho_scan, 2000)
    vals = np.array([f(r) for r in grid])
    roots = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        flo = vals[i]
        while hi - lo > _ROOT_TOL * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            fm = f(mid)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        roots.append(0.5 * (lo + hi))
    return ExistenceMap(phi, R, roots)
