import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from cavityshake.bogoliubov import (dce_photon_number, extract_asymptotics, integrate_bogoliubov,
                                    sudden_photon_number)
from cavityshake.errors import InputError, WindowTooShortError
from cavityshake.model import FrequencyProfile, NumericsConfig


def mode_function_beta(w1, w2, tau, window):
    """|beta_inf|^2 from the classical equation x'' + w(t)^2 x = 0 (independent route)."""
    p = FrequencyProfile.smooth(w1, w2, tau)
    lo, hi = window

    def rhs(t, y):
        w = p.omega(t)
        return [y[1], -w * w * y[0]]

    x0 = np.exp(-1j * w1 * lo) / math.sqrt(2 * w1)
    sol = solve_ivp(rhs, window, [x0, -1j * w1 * x0], method="DOP853", rtol=1e-12, atol=1e-14)
    x, v = sol.y[:, -1]
    # x = (alpha e^{-i w2 t} + beta e^{+i w2 t}) / sqrt(2 w2) at late times
    beta = math.sqrt(w2 / 2) * (x + v / (1j * w2)) / np.exp(1j * w2 * hi)
    return abs(beta) ** 2


def test_sudden_closed_form():
    assert sudden_photon_number(0.5, 5.0) == pytest.approx(2.025)
    assert dce_photon_number(1 + 1j) == pytest.approx(2.0)
    with pytest.raises(InputError):
        sudden_photon_number(0.0, 1.0)


def test_fast_switch_approaches_sudden():
    traj = integrate_bogoliubov(FrequencyProfile.smooth(0.5, 5.0, 1e-3))
    assert traj.n_dce == pytest.approx(2.025, rel=1e-3)
    tr0 = integrate_bogoliubov(FrequencyProfile.sudden(0.5, 5.0))
    assert tr0.n_dce == pytest.approx(2.025, rel=1e-12)


# Values frozen from this implementation (rtol 1e-11) and cross-checked
# against the mode-function integration below.
@pytest.mark.parametrize("tau,expected", [(0.1, 1.17676), (1.0, 3.44139e-3), (2.0, 6.68e-6)])
def test_frozen_photon_numbers(tau, expected):
    n = integrate_bogoliubov(FrequencyProfile.smooth(0.5, 5.0, tau)).n_dce
    assert n == pytest.approx(expected, rel=2e-3)


@pytest.mark.parametrize("tau", [0.3, 1.0])
def test_matches_mode_function_integration(tau):
    p = FrequencyProfile.smooth(0.5, 5.0, tau)
    traj = integrate_bogoliubov(p)
    ref = mode_function_beta(0.5, 5.0, tau, traj.window)
    assert traj.n_dce == pytest.approx(ref, rel=1e-6)


def test_trajectory_shape_and_interior_maximum():
    traj = integrate_bogoliubov(FrequencyProfile.smooth(0.5, 5.0, 1.0))
    b2 = np.abs(traj.beta) ** 2
    assert traj.times.shape == traj.alpha.shape == traj.beta.shape
    assert b2.max() > 5 * traj.n_dce
    assert abs(traj.beta[0]) == 0.0
    assert traj.symplectic_defect() < 1e-9
    a, b = extract_asymptotics(traj)
    assert a == traj.alpha_inf and b == traj.beta_inf
    header, cols = traj.csv_rows()
    assert header[0] == "t" and cols.shape == (traj.times.size, 6)


def test_constant_frequency_creates_nothing():
    traj = integrate_bogoliubov(FrequencyProfile.smooth(2.0, 2.0, 1.0))
    assert traj.n_dce == 0.0


def test_window_too_short():
    p = FrequencyProfile.smooth(0.5, 5.0, 1.0)
    with pytest.raises(WindowTooShortError):
        integrate_bogoliubov(p, NumericsConfig(window=(-3.0, 40.0)))
    with pytest.raises(WindowTooShortError):
        integrate_bogoliubov(p, NumericsConfig(window=(-60.0, 3.0)))


@settings(max_examples=12)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.05, 1.5))
def test_symplectic_property(w1, w2, tau):
    traj = integrate_bogoliubov(FrequencyProfile.smooth(w1, w2, tau))
    assert traj.symplectic_defect() < 1e-9


@settings(max_examples=10)
@given(st.floats(0.3, 3.0), st.floats(0.3, 3.0), st.floats(0.05, 1.0))
def test_time_reversal_symmetry(w1, w2, tau):
    # swapping the end frequencies is the time-reversed switch: same |beta_inf|^2
    n12 = integrate_bogoliubov(FrequencyProfile.smooth(w1, w2, tau)).n_dce
    n21 = integrate_bogoliubov(FrequencyProfile.smooth(w2, w1, tau)).n_dce
    assert n12 == pytest.approx(n21, rel=1e-6, abs=1e-12)


@settings(max_examples=10)
@given(st.floats(0.2, 10.0), st.floats(0.2, 10.0))
def test_sudden_photon_number_symmetric(w1, w2):
    assert sudden_photon_number(w1, w2) == pytest.approx(sudden_photon_number(w2, w1), rel=1e-14)
    assert sudden_photon_number(w1, w2) >= 0


def test_slower_switch_creates_fewer_photons():
    ns = [integrate_bogoliubov(FrequencyProfile.smooth(0.5, 5.0, t)).n_dce for t in (0.01, 0.1, 0.5, 1, 2)]
    assert all(a > b for a, b in zip(ns, ns[1:]))
