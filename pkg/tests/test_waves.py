import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import least_squares

from trendprice import waves
from trendprice.model import PHI1, PHI2, PHI3, EquilibriumProfile, equilibrium_eval, phi_eval

PHIS = [PHI1, PHI2, PHI3]


def test_phi1_wave_by_hand():
    p = waves.build_wave(2.0, 1.0, PHI1)
    # middle branch b1 (1 - exp(-2x)) with b1 = -1 / (e^2 - 1)
    b1 = -1.0 / (math.exp(2) - 1)
    assert p.b1 == pytest.approx(b1, rel=1e-15)
    assert waves.wave_eval(p, 1.0) == pytest.approx(-math.exp(-2), rel=1e-14)
    assert waves.wave_eval(p, 3.0) == pytest.approx(-1 + (math.exp(2) - 1) * math.exp(-6), rel=1e-14)
    assert waves.wave_eval(p, -3.0) == 1.0
    assert p.required_R == -1.0
    assert (p.left_limit, p.right_limit) == (1.0, -1.0)


@pytest.mark.parametrize("rho,phi,expected", [
    (2.0, PHI1, -2.0), (0.5, PHI2, -1.0),
    (2.0, PHI3, -2.0 * math.tanh(1) / math.tanh(2)),
])
def test_required_R(rho, phi, expected):
    assert waves.required_R(rho, phi) == pytest.approx(expected, rel=1e-15)


def test_required_R_rejects_nonpositive_rho():
    with pytest.raises(ValueError):
        waves.required_R(0.0, PHI1)


def test_zero_speed_rejected():
    with pytest.raises(ValueError):
        waves.build_wave(0.0, 1.0, PHI1)


# mpmath.findroot references for rho tanh(1) / tanh(rho) = -R
@pytest.mark.parametrize("R,rho", [(-2.0, 2.59708839948246771406), (-10.0, 13.1303528548899353491),
                                   (-0.8, 0.390921068839390411883)])
def test_solve_rho_tanh(R, rho):
    em = waves.solve_rho(R, PHI3)
    assert len(em.admissible_rho) == 1
    assert em.admissible_rho[0] == pytest.approx(rho, rel=1e-10)


def test_existence_ranges():
    for R in (-0.1, -1.0, -10.0):
        assert waves.solve_rho(R, PHI1).admissible_rho == [-R]
    assert not waves.solve_rho(-0.7, PHI3).nonempty
    assert not waves.solve_rho(0.5, PHI1).nonempty
    assert waves.solve_rho(-1.0, PHI2).is_continuum
    assert waves.solve_rho(-1.0, PHI2).admissible_rho == waves.ALL_RHO
    for R in (-0.5, -2.0):
        assert not waves.solve_rho(R, PHI2).nonempty
    # tanh(1) is the threshold
    assert not waves.solve_rho(-math.tanh(1) + 1e-6, PHI3).nonempty
    assert waves.solve_rho(-math.tanh(1) - 1e-4, PHI3).nonempty


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.2, 5.0), st.sampled_from(PHIS), st.booleans())
def test_residual_small_everywhere(c, rho, phi, negative):
    p = waves.build_wave(-c if negative else c, rho, phi)
    assert waves.wave_residual(p).ok(1e-10 * max(1.0, rho))


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 5.0), st.floats(0.2, 5.0), st.sampled_from(PHIS))
def test_reflection_identity(c, rho, phi):
    x = np.linspace(-6, 6, 97)
    pos = waves.wave_eval(waves.build_wave(c, rho, phi), -x)
    neg = waves.wave_eval(waves.build_wave(-c, rho, phi), x)
    np.testing.assert_array_equal(neg, -pos)


@pytest.mark.parametrize("c,rho,phi", [(-0.5, 1.0, PHI1), (-2.0, 2.598, PHI3), (-1.3, 0.5, PHI2)])
def test_negative_speed_matches_direct_solve(c, rho, phi):
    """Solve the matching conditions for c < 0 directly, without the reflection shortcut."""
    R = waves.required_R(rho, phi)
    e = lambda x: math.exp(-c * x)  # noqa: E731

    def eqs(u):
        a1, a2, b2 = u
        b1 = -b2  # w(0) = 0
        wm, wp = b1 + b2 * e(-1), b1 + b2 * e(1)
        wx0 = -c * b2
        return [a1 + a2 * e(-1) - wm,                                   # continuity at -1
                -rho - wp,                                             # continuity at +1 (right limit -rho)
                (-c * b2 * e(-1)) - (-c * a2 * e(-1)) - wx0 - R * c * phi_eval(phi, wm),
                0.0 - (-c * b2 * e(1)) + wx0 + R * c * phi_eval(phi, wp)]

    sol = least_squares(eqs, [rho, 0.0, rho], xtol=1e-15, ftol=1e-15, gtol=1e-15)
    assert max(abs(v) for v in sol.fun) < 1e-12
    p = waves.build_wave(c, rho, phi)
    assert p.d2 == 0.0 and p.d1 == pytest.approx(-rho)
    np.testing.assert_allclose([p.a1, p.a2, p.b2], sol.x, rtol=1e-9, atol=1e-12)


def test_perturbed_coefficient_flagged():
    from dataclasses import replace
    c = 2.0
    p = waves.build_wave(c, 1.0, PHI1)
    bad = replace(p, d2=p.d2 + 1e-3)
    res = waves.wave_residual(bad)
    assert res.continuity_right == pytest.approx(1e-3 * math.exp(-c), rel=1e-9)
    assert res.jump_right == pytest.approx(1e-3 * c * math.exp(-c), rel=1e-9)
    assert not res.ok()


def test_small_speed_tends_to_equilibrium():
    x = np.linspace(-5, 5, 1001)
    eq = equilibrium_eval(EquilibriumProfile(1.0), 1.0, x)
    for phi in (PHI1, PHI3):
        devs = [np.max(np.abs(waves.wave_eval(waves.build_wave(c, 1.0, phi), x) - eq))
                for c in (0.1, 0.01, 0.001)]
        assert devs[0] > devs[1] > devs[2]
        assert devs[2] < 2e-3


def test_far_field_limits():
    for c in (0.7, -0.7, 3.0):
        for phi in PHIS:
            p = waves.build_wave(c, 1.5, phi)
            assert waves.wave_eval(p, -50.0) == pytest.approx(p.left_limit, abs=1e-12)
            assert waves.wave_eval(p, 50.0) == pytest.approx(p.right_limit, abs=1e-12)
            assert np.isfinite(waves.wave_eval(p, np.array([-1e3, 1e3]))).all()


def test_solve_rho_consistent_with_required_R():
    for R in (-0.9, -3.0, -40.0):
        for rho in waves.solve_rho(R, PHI3).admissible_rho:
            assert waves.required_R(rho, PHI3) == pytest.approx(R, rel=1e-10)
