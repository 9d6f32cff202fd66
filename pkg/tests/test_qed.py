import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from swapentropy.oracle import IntegratorConfig, integrate_path
from swapentropy.qed import (CouplingParams, alpha_n, dark_amplitude, delta_from_frequencies,
                             evolve_triple, gamma_n, manifold_propagator, propagator_matrix,
                             rabi_frequency)

UNIT = CouplingParams(1.0, 1.0, 0.0)
T_PI = math.pi / math.sqrt(3)


@pytest.mark.parametrize("g1,g2,n,expected", [
    (1, 1, 0, math.sqrt(3)),
    (1, 1, 2, math.sqrt(7)),
    (2, 1, 0, math.sqrt(6)),
])
def test_alpha_n(g1, g2, n, expected):
    assert alpha_n(CouplingParams(g1, g2), n) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("delta,n,expected", [
    (0, 0, math.sqrt(3)),
    (3, 0, math.sqrt(5.25)),
    (50, 2, math.sqrt(632)),
])
def test_rabi_frequency(delta, n, expected):
    assert rabi_frequency(CouplingParams(1, 1, delta), n) == pytest.approx(expected, rel=1e-15)


def test_invalid_params_rejected():
    with pytest.raises(ValueError, match="g1"):
        CouplingParams(0.0, 1.0)
    with pytest.raises(ValueError, match="g2"):
        CouplingParams(1.0, -1.0)
    with pytest.raises(ValueError, match="delta"):
        CouplingParams(1.0, 1.0, float("nan"))
    with pytest.raises(ValueError):
        alpha_n(UNIT, -1)


def test_delta_from_frequencies():
    assert delta_from_frequencies(10.0, 25.0, 18.0) == pytest.approx(3.0)
    assert CouplingParams.from_frequencies(1, 1, 10.0, 25.0, 18.0).delta == pytest.approx(3.0)


def test_gamma_vanishes_at_zero():
    for delta in (0, 3, -7, 200):
        assert gamma_n(CouplingParams(1.3, 0.4, delta), 3, 0.0) == 0


def test_gamma_resonant_half_period():
    assert gamma_n(UNIT, 0, T_PI) == pytest.approx(-2 * math.sqrt(3), abs=1e-14)


def _gamma_mp(delta, alpha_sq, t, expanded):
    mpmath.mp.dps = 40
    d, t = mpmath.mpf(delta), mpmath.mpf(t)
    lam = mpmath.sqrt(d**2 / 4 + alpha_sq)
    ph = mpmath.exp(-1j * d * t / 2)
    if expanded:
        return lam * mpmath.cos(lam * t) * ph + 1j * d / 2 * mpmath.sin(lam * t) * ph - lam
    return (lam * mpmath.cos(lam * t) + 1j * d / 2 * mpmath.sin(lam * t)
            - lam * mpmath.exp(1j * d * t / 2)) * ph


def test_gamma_detuned_value():
    # frozen from two high-precision evaluations (bracketed and expanded forms)
    expected = complex(-1.2738217285168987, 1.5876363547126851)
    assert complex(_gamma_mp(3, 3, 1, False)) == pytest.approx(expected, abs=1e-15)
    assert complex(_gamma_mp(3, 3, 1, True)) == pytest.approx(expected, abs=1e-15)
    assert gamma_n(CouplingParams(1, 1, 3), 0, 1.0) == pytest.approx(expected, abs=1e-14)


def test_propagator_identity_at_zero():
    for n in (0, 1, 5):
        u = manifold_propagator(CouplingParams(0.7, 2.1, -12.0), n, 0.0).u
        assert np.array_equal(u, np.eye(3))


def test_propagator_resonant_half_period():
    u = manifold_propagator(UNIT, 0, T_PI).u
    np.testing.assert_allclose(u[:, 0], [1 / 3, 0, -2 * math.sqrt(2) / 3], atol=1e-14)
    assert np.linalg.norm(u[:, 0]) == pytest.approx(1.0, abs=1e-14)


def test_propagator_matches_rk4_detuned():
    params = CouplingParams(1, 1, 10)
    u = manifold_propagator(params, 2, 7.3).u
    numeric = integrate_path(params, 2, [7.3])[0]
    assert np.max(np.abs(u - numeric)) < 1e-6


def test_evolve_triple():
    np.testing.assert_array_equal(evolve_triple(UNIT, 0, [1, 0, 0], 0.0), [1, 0, 0])
    # C_g = 1 + (2/3)(cos(pi) - 1) = -1/3; orthogonal to the (e,0) column
    out = evolve_triple(UNIT, 0, [0, 0, 1], T_PI)
    np.testing.assert_allclose(out, [-2 * math.sqrt(2) / 3, 0, -1 / 3], atol=1e-14)
    rk4 = integrate_path(UNIT, 0, [T_PI], IntegratorConfig(1e-4))[0][:, 2]
    np.testing.assert_allclose(rk4, [-2 * math.sqrt(2) / 3, 0, -1 / 3], atol=1e-8)

    params = CouplingParams(1, 2, 4)
    u = propagator_matrix(params, 1, 2.5)
    sup = evolve_triple(params, 1, [2**-0.5, 0, 2**-0.5], 2.5)
    np.testing.assert_allclose(sup, (u[:, 0] + u[:, 2]) / math.sqrt(2), atol=1e-15)

    with pytest.raises(ValueError):
        evolve_triple(UNIT, 0, [1, 1, 0], 1.0)


def test_dark_amplitude():
    assert dark_amplitude("g", 0, 0.0) == 1
    assert dark_amplitude("g", 0, 100.0) == 1
    with pytest.raises(ValueError):
        dark_amplitude("e", 0, 1.0)
    with pytest.raises(ValueError):
        dark_amplitude("g", 2, 1.0)


def test_resonant_f_amplitude_is_imaginary():
    t = np.linspace(0, 20, 101)
    for n in (0, 2):
        params = CouplingParams(1.2, 0.8, 0.0)
        c_f = propagator_matrix(params, n, t)[:, 1, 0]
        lam = rabi_frequency(params, n)
        expected = -1j * 1.2 * math.sqrt(n + 1) / lam * np.sin(lam * t)
        np.testing.assert_allclose(c_f, expected, atol=1e-14)


def test_continuity():
    params = CouplingParams(1, 1, 150)
    for t in (0.0, 3.1, 999.7):
        a = propagator_matrix(params, 2, t)
        b = propagator_matrix(params, 2, t + 1e-9)
        assert np.max(np.abs(a - b)) < 1e-6


@settings(max_examples=300, deadline=None)
@given(
    g1=st.floats(0.1, 10), g2=st.floats(0.1, 10), delta=st.floats(-200, 200),
    n=st.integers(0, 10), t=st.floats(0, 2000),
)
def test_unitarity(g1, g2, delta, n, t):
    u = manifold_propagator(CouplingParams(g1, g2, delta), n, t).unitarity_error()
    assert u < 1e-9


@settings(max_examples=25, deadline=None)
@given(
    g1=st.floats(0.1, 3), g2=st.floats(0.1, 3), delta=st.floats(-20, 20),
    n=st.integers(0, 4), t=st.floats(0, 5),
)
def test_matches_rk4(g1, g2, delta, n, t):
    params = CouplingParams(g1, g2, delta)
    numeric = integrate_path(params, n, [t])[0]
    assert np.max(np.abs(propagator_matrix(params, n, t) - numeric)) < 1e-6
