"""Spectrum of the linearization around the equilibrium w^1.

Even modes with Re(alpha) > 0 solve exp(alpha) - 1 + R alpha = 0,
lambda = alpha^2.  Real roots give the real instability for R < -1;
roots with alpha = a(1 + i) sit on the imaginary axis and mark Hopf
crossings.  Odd modes and the even modes with Re(alpha) = 0 fill
(-inf, 0] and are only exposed through their evaluation functions.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

SCAN_STEP = 0.01
BISECT_WIDTH = 1e-13
R_AGREEMENT = 1e-9
DEFAULT_A_MAX = 25.0

BAND_NOTE = ("(-inf, 0] is filled with eigenvalues whose eigenfunctions are merely "
             "bounded (odd and even families); not enumerated")


class Parity(str, enum.Enum):
    ODD = "odd"
    EVEN = "even"


class SpuriousBracket(ArithmeticError):
    """The two expressions for R disagree at a bracketed root."""


@dataclass(frozen=True)
class SpectralPoint:
    alpha: complex
    parity: Parity = Parity.EVEN

    def __post_init__(self):
        if self.alpha.real < 0 or self.alpha.imag < 0:
            raise ValueError("alpha is restricted to the closed first quadrant")

    @property
    def lam(self) -> complex:
        return self.alpha * self.alpha


@dataclass(frozen=True)
class CrossingRecord:
    index: int
    a_value: float
    R_value: float
    direction: int

    @property
    def alpha(self) -> complex:
        return complex(self.a_value, self.a_value)

    @property
    def lam(self) -> complex:
        return 2j * self.a_value ** 2

    @property
    def R_from_sine(self) -> float:
        return crossing_R_sine(self.a_value)

    @property
    def R_from_cosine(self) -> float:
        return crossing_R_cosine(self.a_value)

    @property
    def period(self) -> float:
        """Linear oscillation period 2 pi / |lambda| at the crossing."""
        return 2.0 * math.pi / abs(self.lam)


@dataclass(frozen=True)
class SpectrumReport:
    R: float
    real_unstable: float | None  # lambda = a^2
    crossings: list = field(default_factory=list)
    band_note: str = BAND_NOTE

    @property
    def unstable_crossings(self) -> list:
        """Crossings already passed at this R (their pair has Re(lambda) > 0)."""
        return [c for c in self.crossings
                if (c.R_value > 0 and self.R > c.R_value) or (c.R_value < 0 and self.R < c.R_value)]


# -- bounded-eigenfunction families ------------------------------------------

def odd_eigenfunction(b: float, x):
    """Odd eigenfunction for lambda = -b^2 (unnormalized)."""
    if not b > 0:
        raise ValueError("b must be positive")
    x = np.asarray(x, dtype=float)
    inner = np.sin(b * x)
    out = np.where(x > 1, inner - np.sin(b * (x - 1)),
                   np.where(x < -1, inner - np.sin(b * (x + 1)), inner))
    return float(out) if out.ndim == 0 else out


def even_band_eigenfunction(b: float, R: float, x):
    """Even eigenfunction for lambda = -b^2; exists for every R."""
    if not b > 0:
        raise ValueError("b must be positive")
    s = np.abs(np.asarray(x, dtype=float))
    outer = (np.cos(b * s) * (1 - math.cos(b) + R * b * math.sin(b))
             - np.sin(b * s) * (math.sin(b) + R * b * math.cos(b)))
    out = np.where(s <= 1, np.cos(b * s) - 1, outer)
    return float(out) if out.ndim == 0 else out


# -- real instability ---------------------------------------------------------

def _bisect(f, lo, hi, width=BISECT_WIDTH):
    flo = f(lo)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def real_unstable_eigenvalue(R: float):
    """Positive root a of exp(a) - 1 + R a = 0 and lambda = a^2, or None.

    Exists only for R < -1; at R = -1 the root merges into lambda = 0.
    """
    if not R < -1.0:
        return None

    def f(a):
        return math.expm1(a) + R * a

    # f < 0 just right of 0, f -> +inf; double until the sign flips
    hi = 1.0
    while f(hi) <= 0:
        hi *= 2.0
    lo = hi / 2.0 if hi > 1.0 else 0.0
    a = _bisect(f, lo, hi)
    fp = math.exp(a) + R
    if fp != 0.0:
        a -= f(a) / fp
    return a, a * a


# -- imaginary-axis crossings -------------------------------------------------

def crossing_residual(a: float) -> float:
    return math.cos(a) - math.sin(a) - math.exp(-a)


def _crossing_residual_prime(a: float) -> float:
    return -math.sin(a) - math.cos(a) + math.exp(-a)


def crossing_R_cosine(a: float) -> float:
    return (1.0 - math.exp(a) * math.cos(a)) / a


def crossing_R_sine(a: float) -> float:
    return -math.exp(a) * math.sin(a) / a


def crossing_direction(a: float, R: float) -> int:
    """Sign of d Re(lambda) / dR at the crossing, 4 a^3 R / |e^alpha + R|^2."""
    if not a > 0:
        raise ValueError("a must be positive")
    if R == 0:
        raise ValueError("R = 0 is never a crossing for a > 0")
    alpha = complex(a, a)
    val = 4.0 * a ** 3 * R / abs(cmath.exp(alpha) + R) ** 2
    return 1 if val > 0 else -1


def find_crossings(a_max: float = DEFAULT_A_MAX, step: float = SCAN_STEP) -> list:
    """All roots of cos a - sin a = exp(-a) on (0, a_max], as CrossingRecords."""
    if not a_max > 0:
        raise ValueError("a_max must be positive")
    if not 0 < step <= SCAN_STEP:
        raise ValueError(f"scan step must lie in (0, {SCAN_STEP}]")
    n = int(math.ceil(a_max / step))
    grid = np.minimum(np.arange(1, n + 1) * step, a_max)
    vals = np.cos(grid) - np.sin(grid) - np.exp(-grid)
    out = []
    for i in np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]:
        lo, hi = float(grid[i]), float(grid[i + 1])
        if vals[i] == 0.0:
            a = lo
        else:
            a = _bisect(crossing_residual, lo, hi)
            d = _crossing_residual_prime(a)
            if d != 0.0:
                polished = a - crossing_residual(a) / d
                if abs(crossing_residual(polished)) <= abs(crossing_residual(a)):
                    a = polished
        if out and abs(a - out[-1].a_value) < 1e-9:
            continue
        r_cos, r_sin = crossing_R_cosine(a), crossing_R_sine(a)
        if abs(r_cos - r_sin) > R_AGREEMENT * max(1.0, abs(r_cos)):
            raise SpuriousBracket(f"R formulas disagree at a = {a!r}: {r_cos!r} vs {r_sin!r}")
        out.append(CrossingRecord(len(out), a, r_cos, crossing_direction(a, r_cos)))
    return out


def spectrum(R: float, a_max: float = DEFAULT_A_MAX) -> SpectrumReport:
    real = real_unstable_eigenvalue(R)
    return SpectrumReport(R, None if real is None else real[1], find_crossings(a_max))


def crossing_eigenfunction(a: float, R: float, x):
    """Even eigenfunction at a crossing alpha = a(1 + i); complex valued."""
    alpha = complex(a, a)
    s = np.abs(np.asarray(x, dtype=float))
    inner = np.exp(alpha * s) + np.exp(-alpha * s) - 2.0
    coef = 1.0 - cmath.exp(alpha) - R * alpha * cmath.exp(alpha)
    # the outer branch is evaluated only where it is used; exp(alpha s) overflows otherwise
    outer = coef * np.exp(-alpha * np.maximum(s, 1.0))
    out = np.where(s <= 1, inner, outer)
    return complex(out) if out.ndim == 0 else out


def crossing_eigenfunction_branches(a: float, R: float, x: float):
    """Both branch formulas at one point, for continuity checks."""
    alpha = complex(a, a)
    inner = cmath.exp(alpha * x) + cmath.exp(-alpha * x) - 2.0
    outer = (cmath.exp(alpha * x) * (1 - cmath.exp(-alpha) + R * alpha * cmath.exp(-alpha))
             + cmath.exp(-alpha * x) * (1 - cmath.exp(alpha) - R * alpha * cmath.exp(alpha)))
    return inner, outer


def operator_residual(lam: complex, g, R: float, grid) -> float:
    """max |L g - lam g| of the discrete linearized operator over interior nodes.

    L g = g_xx - g_xx(0) chi(-1,1) - g_x(0) [d(-1) - d(1)] - R g_xx(0) [d(-1) + d(1)],
    with the same stencils and single-node deltas as the time stepper.  The
    two delta nodes are excluded from the maximum.
    """
    g = np.asarray(g)
    h = grid.h
    x = grid.x
    i0 = grid.zero_index
    im, ip = grid.index_of(-1.0), grid.index_of(1.0)
    lg = np.zeros_like(g, dtype=complex)
    lg[1:-1] = (g[:-2] - 2 * g[1:-1] + g[2:]) / (h * h)
    gxx0 = lg[i0]
    gx0 = (g[i0 + 1] - g[i0 - 1]) / (2 * h)
    lg[np.abs(x) < 1 - 0.5 * h] -= gxx0
    lg[im] += (-gx0 - R * gxx0) / h
    lg[ip] += (gx0 - R * gxx0) / h
    res = np.abs(lg - lam * g)
    mask = np.zeros(len(g), dtype=bool)
    mask[1:-1] = True
    mask[[im, ip]] = False
    return float(res[mask].max()) if np.any(mask) else 0.0
