"""Simulation and analysis of the trend-dependent price formation model."""

from .model import (PHI1, PHI2, PHI3, EquilibriumProfile, ModelConfig, Nonlinearity,
                    NonlinearitySpec, equilibrium_eval, phi_eval, sign_parts)
from .solver import (Grid1D, GuardTripped, InitialCondition, NonFinite, SimConfig, SimState,
                     SimTrace, cn_step, compute_p_prime, discrete_delta, initial_state, simulate)
from .spectral import (CrossingRecord, SpectrumReport, crossing_direction, crossing_eigenfunction,
                       crossing_residual, even_band_eigenfunction, find_crossings, odd_eigenfunction,
                       operator_residual, real_unstable_eigenvalue, spectrum)
from .waves import ALL_RHO, ExistenceMap, WaveProfile, build_wave, required_R, solve_rho, wave_eval, wave_residual
from .analysis import (BifurcationPoint, Classification, PeriodEstimate, classify, estimate_period,
                       half_period_antisymmetry, sign_sanity, sweep_R)

__version__ = "0.1.0"
