import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cavityshake.backreaction import delta_N, eta, eta_sweep, loglog_slope, tail_average
from cavityshake.bogoliubov import integrate_bogoliubov
from cavityshake.errors import BaselineUndefinedError, InputError
from cavityshake.model import ModelParams, NumericsConfig
from cavityshake.oracle import TruncationWarning, auto_fock_max, evolve
from cavityshake.transient import compute_B, excitation_efficiency_F

FIG = ModelParams()


def test_frozen_eta_at_unit_tau():
    r = eta(FIG.with_(tau=1.0))
    assert r.eta == pytest.approx(11.20135806, rel=1e-7)
    assert r.eta_window_change < 1e-6 * abs(r.eta)
    assert r.N_dce == pytest.approx(3.44139e-3, rel=1e-5)


def test_lambda_cancels_exactly():
    e1 = eta(FIG.with_(lam=0.01), sensitivity=False).eta
    e2 = eta(FIG.with_(lam=0.1), sensitivity=False).eta
    assert abs(e1 - e2) <= 1e-10 * abs(e1)


def test_delta_N_scales_with_lambda_squared():
    traj = integrate_bogoliubov(FIG.profile())
    B = compute_B(traj, FIG.E0)
    d1 = delta_N(traj, B, FIG.E0, 0.01)
    d2 = delta_N(traj, B, FIG.E0, 0.02)
    assert np.allclose(d2, 4 * d1, rtol=1e-14, atol=0)


def test_delta_N_shape_check():
    traj = integrate_bogoliubov(FIG.profile())
    with pytest.raises(InputError):
        delta_N(traj, np.zeros(5), FIG.E0, 0.01)


def test_sudden_jump_gives_zero_correction():
    # after an instantaneous jump the two terms of dN cancel identically
    r = eta(FIG.with_(tau=0.0), sensitivity=False)
    assert abs(r.eta) < 1e-12
    assert np.max(np.abs(r.delta_N_samples)) < 1e-15


def test_quadratic_onset_at_very_small_tau():
    taus = np.array([2e-4, 5e-4, 1e-3, 2e-3])
    vals = eta_sweep(FIG, taus)[:, 1]
    assert np.all(vals < 0)
    assert loglog_slope(taus, vals) == pytest.approx(2.0, abs=0.02)


def test_sign_change_between_small_and_unit_tau():
    vals = eta_sweep(FIG, [0.1, 0.25])[:, 1]
    assert vals[0] < 0 < vals[1]


def test_adiabatic_baseline_refused():
    with pytest.raises(BaselineUndefinedError):
        eta(FIG.with_(tau=5.0))
    rows = eta_sweep(FIG, [5.0])
    assert np.isnan(rows[0, 1])


def test_combined_correction_includes_absorption():
    r = eta(FIG.with_(tau=0.5), sensitivity=False)
    F = excitation_efficiency_F(integrate_bogoliubov(FIG.with_(tau=0.5).profile()), FIG.E0)
    assert r.eta_with_absorption == pytest.approx(r.eta - FIG.E0 ** 2 * F / FIG.delta2 ** 2, rel=1e-12)


@pytest.mark.parametrize("tau", [0.05, 0.15, 1.0])
def test_against_exact_evolution(tau):
    p = FIG.with_(tau=tau)
    r = eta(p, sensitivity=False)
    n_max = max(64, auto_fock_max(r.N_dce, 1e-13))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        o = evolve(p, rwa=True, n_max=n_max)
    excess = o.N_tail - r.N_dce
    assert excess == pytest.approx(r.delta_N_inf, abs=1e-9 + 10 * p.lam ** 4)


def test_tail_average():
    t = np.linspace(0, 10, 101)
    v = np.where(t >= 9, 3.0, 100.0)
    assert tail_average(t, v) == 3.0


@given(st.floats(-3, 3), st.floats(0.01, 100))
def test_loglog_slope_of_power_law(k, c):
    x = np.geomspace(0.1, 10, 7)
    assert loglog_slope(x, c * x ** k) == pytest.approx(k, abs=1e-9)
