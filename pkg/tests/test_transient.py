import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from cavityshake.bogoliubov import integrate_bogoliubov
from cavityshake.errors import BaselineUndefinedError, ResonanceError
from cavityshake.model import FrequencyProfile, ModelParams, NumericsConfig
from cavityshake.sudden import excitation_probability_sudden
from cavityshake.transient import (B_two_term, compute_B, excitation_efficiency_F,
                                   excitation_probability_transient, transient_sweep)

FIG = ModelParams()


def traj_for(tau, cfg=None):
    return integrate_bogoliubov(FIG.with_(tau=tau).profile(), cfg)


def J_by_quadrature(traj, E0):
    """J from finite differences of beta(t) e^{i w2 t} and trapezoid quadrature."""
    t = traj.times
    g = traj.beta * np.exp(1j * traj.profile.omega2 * t)
    d2 = E0 - traj.profile.omega2
    dg = np.gradient(g, t, edge_order=2)
    return np.trapezoid(np.exp(1j * d2 * t) * dg, t)


def test_F_is_one_for_sudden_jump():
    traj = integrate_bogoliubov(FrequencyProfile.sudden(0.5, 5.0))
    assert excitation_efficiency_F(traj, 0.8) == pytest.approx(1.0, abs=1e-14)
    r = excitation_probability_transient(traj, FIG.with_(tau=0))
    assert r.w_up == pytest.approx((0.01 / 4.2) ** 2 * 2.025, rel=1e-12)


@pytest.mark.parametrize("tau,F", [(2e-4, 1.0000069), (0.5, 57.58), (1.0, 224.2), (2.0, 712.1)])
def test_frozen_F(tau, F):
    assert excitation_efficiency_F(traj_for(tau), FIG.E0) == pytest.approx(F, rel=1e-3)


@pytest.mark.parametrize("tau", [0.3, 1.0])
def test_F_against_finite_difference_quadrature(tau):
    cfg = NumericsConfig(sample_count=60001)
    traj = traj_for(tau, cfg)
    J = J_by_quadrature(traj, FIG.E0)
    F = abs(J / traj.beta_inf) ** 2
    assert excitation_efficiency_F(traj, FIG.E0) == pytest.approx(F, rel=1e-3)


def test_small_tau_matches_sudden_weak_coupling():
    p = FIG.with_(tau=1e-3)
    r = excitation_probability_transient(traj_for(1e-3), p)
    # first order in lam of the sudden series is xi^2 N
    assert r.w_up == pytest.approx(excitation_probability_sudden(p.rho, p.xi), rel=1e-3)


def test_w_up_scales_as_lambda_squared():
    traj = traj_for(1.0)
    w1 = excitation_probability_transient(traj, FIG.with_(lam=0.01)).w_up
    w2 = excitation_probability_transient(traj, FIG.with_(lam=0.03)).w_up
    assert w2 / w1 == pytest.approx(9.0, rel=1e-12)


def test_B_late_time_two_term_form():
    traj = traj_for(1.0)
    r = excitation_probability_transient(traj, FIG)
    late = traj.times > 0.9 * traj.times[-1]
    approx = B_two_term(traj, FIG.E0, r.J, traj.times[late])
    assert np.max(np.abs(r.B_samples[late] - approx)) < 1e-10 * np.max(np.abs(r.B_samples))
    assert np.allclose(compute_B(traj, FIG.E0), r.B_samples)
    assert r.tail_error < 1e-6


def test_resonance_refused():
    p = ModelParams(E0=5.0, omega1=0.5, omega2=5.0, tau=1.0)
    with pytest.raises(ResonanceError):
        excitation_probability_transient(integrate_bogoliubov(p.profile()), p)


def test_adiabatic_baseline_refused():
    with pytest.raises(BaselineUndefinedError):
        excitation_efficiency_F(traj_for(12.0), FIG.E0)


def test_sweep_rows_and_nan():
    rows = transient_sweep(FIG, [0.5, 12.0])
    assert rows.shape == (2, 4)
    assert np.isfinite(rows[0]).all()
    assert np.isnan(rows[1, 1]) and np.isnan(rows[1, 2])


@settings(max_examples=8)
@given(st.floats(0.3, 2.0), st.floats(2.0, 6.0), st.floats(0.1, 1.0), st.floats(0.2, 3.0))
def test_F_finite_and_positive(w1, w2, tau, E0):
    # a finite switching time only ever enhances the atom's share relative to N
    assume(w2 - w1 > 0.5 and abs(E0 - w2) > 0.3)
    p = ModelParams(E0=E0, omega1=w1, omega2=w2, tau=tau)
    F = excitation_efficiency_F(integrate_bogoliubov(p.profile()), E0)
    assert np.isfinite(F) and F > 0
