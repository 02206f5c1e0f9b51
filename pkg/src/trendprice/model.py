"""Physical parameters, nonlinearities and equilibrium profiles of the
trend-dependent price formation model.

Everything here is a pointwise evaluation; sampled fields live on grids
owned by :mod:`trendprice.solver`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

TANH1 = math.tanh(1.0)


class Nonlinearity(str, enum.Enum):
    SIGN = "sign"
    LINEAR = "linear"
    TANH = "tanh"

    @classmethod
    def parse(cls, name: "str | Nonlinearity") -> "Nonlinearity":
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        aliases = {"phi1": cls.SIGN, "phi2": cls.LINEAR, "phi3": cls.TANH,
                   "1": cls.SIGN, "2": cls.LINEAR, "3": cls.TANH}
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown nonlinearity {name!r}") from None


@dataclass(frozen=True)
class NonlinearitySpec:
    """Odd reaction nonlinearity normalized so that phi(1) = 1."""

    kind: Nonlinearity = Nonlinearity.TANH

    def __post_init__(self):
        object.__setattr__(self, "kind", Nonlinearity.parse(self.kind))

    def __call__(self, r):
        return phi_eval(self, r)

    @property
    def label(self) -> str:
        return {Nonlinearity.SIGN: "phi1", Nonlinearity.LINEAR: "phi2",
                Nonlinearity.TANH: "phi3"}[self.kind]


PHI1 = NonlinearitySpec(Nonlinearity.SIGN)
PHI2 = NonlinearitySpec(Nonlinearity.LINEAR)
PHI3 = NonlinearitySpec(Nonlinearity.TANH)


def as_spec(phi) -> NonlinearitySpec:
    if isinstance(phi, NonlinearitySpec):
        return phi
    return NonlinearitySpec(Nonlinearity.parse(phi))


def phi_eval(spec: NonlinearitySpec, r):
    """Evaluate the nonlinearity; works on scalars and arrays.

    ``sign`` maps 0 to 0 so that oddness holds everywhere.
    """
    kind = as_spec(spec).kind
    scalar = np.isscalar(r)
    r = np.asarray(r, dtype=float)
    if kind is Nonlinearity.SIGN:
        out = np.sign(r)
    elif kind is Nonlinearity.LINEAR:
        out = r.copy()
    else:
        out = np.tanh(r) / TANH1
    return float(out) if scalar else out


@dataclass(frozen=True)
class ModelConfig:
    diffusion: float = 1.0  # sigma^2 / 2
    transaction_cost: float = 1.0
    trend_coupling: float = 0.0
    nonlinearity: NonlinearitySpec = field(default_factory=lambda: PHI3)

    def __post_init__(self):
        if not self.diffusion > 0:
            raise ValueError("diffusion must be positive")
        if not self.transaction_cost > 0:
            raise ValueError("transaction_cost must be positive")
        if not math.isfinite(self.trend_coupling):
            raise ValueError("trend_coupling must be finite")
        object.__setattr__(self, "nonlinearity", as_spec(self.nonlinearity))

    @property
    def R(self) -> float:
        return self.trend_coupling

    @property
    def is_normalized(self) -> bool:
        return self.diffusion == 1.0 and self.transaction_cost == 1.0


@dataclass(frozen=True)
class EquilibriumProfile:
    rho: float = 1.0
    price_offset: float = 0.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")

    def __call__(self, x, a: float = 1.0):
        return equilibrium_eval(self, a, x)


def equilibrium_eval(prof: EquilibriumProfile, a: float, x):
    """Trapezoidal equilibrium: rho left of p0 - a, -rho right of p0 + a,
    linear in between."""
    if not a > 0:
        raise ValueError("transaction cost a must be positive")
    scalar = np.isscalar(x)
    s = np.asarray(x, dtype=float) - prof.price_offset
    out = np.where(s < -a, prof.rho, np.where(s > a, -prof.rho, -prof.rho * s / a))
    return float(out) if scalar else out


def sign_parts(w):
    """Split a sampled field into its buyer (positive) and vendor parts.

    Returns ``(f_B, f_V)`` with ``w == f_B - f_V`` exactly.
    """
    w = np.asarray(w, dtype=float)
    return np.maximum(w, 0.0), np.maximum(-w, 0.0)
