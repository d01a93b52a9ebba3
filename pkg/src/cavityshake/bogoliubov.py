"""Bogoliubov coefficients of a single mode with time-dependent frequency.

The equations

    alpha' = -i w alpha - (w'/2w) conj(beta)
    beta'  = -i w beta  - (w'/2w) conj(alpha)

are integrated in the demodulated variables ``a = alpha e^{i phase}``,
``b = beta e^{i phase}`` so that the step size is set by the switching time
instead of the optical period.  With the phase convention of
:class:`~cavityshake.model.FrequencyProfile`, ``a`` and ``b`` tend to
``alpha_inf`` and ``beta_inf`` directly, and the global phase of the
asymptotic constants is fixed by ``alpha_inf = lim alpha(t) e^{i omega2 t}``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InputError, IntegratorError, WindowTooShortError
from .model import FrequencyProfile, NumericsConfig, ProfileKind, sample_grid

EDGE_REL_TOL = 1e-8
TAIL_FRACTION = 0.1
TAIL_ABS_TOL = 1e-6


@dataclass(frozen=True)
class BogoliubovTrajectory:
    times: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    alpha_inf: complex
    beta_inf: complex
    profile: FrequencyProfile
    window: tuple
    rtol: float
    atol: float

    @property
    def n_dce(self) -> float:
        return abs(self.beta_inf) ** 2

    def symplectic_defect(self) -> float:
        return float(np.max(np.abs(np.abs(self.alpha) ** 2 - np.abs(self.beta) ** 2 - 1.0)))

    def demodulated(self):
        """``(alpha, beta) * exp(i omega2 t)`` on the grid."""
        ph = np.exp(1j * self.profile.omega2 * self.times)
        return self.alpha * ph, self.beta * ph

    def csv_rows(self):
        header = ["t", "re_alpha", "im_alpha", "re_beta", "im_beta", "abs_beta2"]
        cols = np.column_stack([self.times, self.alpha.real, self.alpha.imag,
                                self.beta.real, self.beta.imag, np.abs(self.beta) ** 2])
        return header, cols


def _scalar_profile(profile: FrequencyProfile):
    """Fast scalar ``t -> (omega, omega_dot, phase)`` for the ODE right-hand side."""
    w1, w2 = profile.omega1, profile.omega2
    if profile.kind is ProfileKind.SMOOTH:
        tau = profile.tau
        dw = w2 - w1

        def f(t):
            x = t / tau
            if x >= 0:
                e = math.exp(-x)
                s = 1.0 / (1.0 + e)
                sp = x + math.log1p(e)
            else:
                e = math.exp(x)
                s = e / (1.0 + e)
                sp = math.log1p(e)
            return w1 + dw * s, dw * e / (1.0 + e) ** 2 / tau, w1 * t + dw * tau * sp
        return f

    def f(t):
        w, wd = profile.evaluate(t)
        return w, wd, profile.phase(t)
    return f


def check_window(profile: FrequencyProfile, window):
    lo, hi = window
    if not lo < 0 < hi:
        raise WindowTooShortError("left" if lo >= 0 else "right", f"window {window} must straddle 0")
    w_lo, _ = profile.evaluate(lo)
    w_hi, _ = profile.evaluate(hi)
    if abs(w_lo - profile.omega1) > EDGE_REL_TOL * profile.omega1:
        raise WindowTooShortError("left", f"omega(t_min)={w_lo!r} differs from omega1={profile.omega1!r}")
    if abs(w_hi - profile.omega2) > EDGE_REL_TOL * profile.omega2:
        raise WindowTooShortError("right", f"omega(t_max)={w_hi!r} differs from omega2={profile.omega2!r}")


def integrate_augmented(profile: FrequencyProfile, window, t_eval, rtol, atol, E0=None):
    """Integrate (a, b) and, when ``E0`` is given, three running integrals.

    Returned dict holds complex arrays on ``t_eval``:

    ``a, b``  demodulated Bogoliubov coefficients;
    ``B``     int beta(t') e^{i E0 t'} dt';
    ``C``     int B(t') conj(alpha(t')) e^{-i E0 t'} dt';
    ``J``     int e^{i D2 t'} d/dt'[beta e^{i omega2 t'}] dt',  D2 = E0 - omega2,
              with the derivative taken from the equations of motion.
    All integrals start at ``window[0]``.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    lo, hi = window
    if profile.kind is ProfileKind.SUDDEN:
        return _sudden_closed_form(profile, t_eval, E0)

    f = _scalar_profile(profile)
    w2 = profile.omega2
    _, _, ph0 = f(lo)
    a0 = cmath.exp(1j * (ph0 - profile.omega1 * lo))

    if E0 is None:
        def rhs(t, y):
            w, wd, ph = f(t)
            k = -0.5 * wd / w
            e2 = cmath.exp(2j * ph)
            a, b = y[0], y[1]
            return np.array([k * b.conjugate() * e2, k * a.conjugate() * e2])
        y0 = np.array([a0, 0j])
    else:
        def rhs(t, y):
            w, wd, ph = f(t)
            k = -0.5 * wd / w
            e2 = cmath.exp(2j * ph)
            a, b, B = y[0], y[1], y[2]
            ac = a.conjugate()
            db = k * ac * e2
            em = cmath.exp(1j * (E0 * t - ph))
            return np.array([k * b.conjugate() * e2, db, b * em,
                             B * ac / em, em * (db + 1j * (w2 - w) * b)])
        y0 = np.array([a0, 0j, 0j, 0j, 0j])

    ys, nfev = _piecewise_solve(rhs, y0, window, t_eval, rtol, atol, profile)
    out = {"a": ys[0], "b": ys[1], "nfev": nfev}
    if E0 is not None:
        out.update(B=ys[2], C=ys[3], J=ys[4])
    return out


def _sudden_closed_form(profile: FrequencyProfile, t, E0=None):
    """Exact solution for an instantaneous jump at t = 0.

    The jump maps (a, b) = (1, 0) onto (cosh th, -sinh th), th = ln(omega2/omega1)/2;
    afterwards a and b are constant and the running integrals are elementary.
    """
    th = 0.5 * math.log(profile.omega2 / profile.omega1)
    post = t >= 0
    a = np.where(post, math.cosh(th), 1.0).astype(complex)
    b = np.where(post, -math.sinh(th), 0.0).astype(complex)
    out = {"a": a, "b": b, "nfev": 0}
    if E0 is None:
        return out
    d2 = E0 - profile.omega2
    tp = np.where(post, t, 0.0)
    bb, aa = -math.sinh(th), math.cosh(th)
    if d2 == 0:
        B = bb * tp
        C = 0.5 * bb * aa * tp ** 2
    else:
        x = 1j * d2
        B = bb * np.expm1(x * tp) / x
        C = (bb * aa / x) * (tp + np.expm1(-x * tp) / x)
    out.update(B=B.astype(complex), C=C.astype(complex), J=b.copy())
    return out


def _segments(profile, window):
    """Split the window so the switching region gets a bounded step size."""
    lo, hi = window
    if profile.kind is ProfileKind.SMOOTH:
        s0, s1, h = -12 * profile.tau, 12 * profile.tau, profile.tau / 2
    else:
        s0, s1 = profile.switch_span
        h = max(np.min(np.diff(profile.table_t)), 1e-12)
    cuts = [lo] + [c for c in (s0, s1) if lo < c < hi] + [hi]
    return [(a, b, h if (a >= s0 and b <= s1) else np.inf) for a, b in zip(cuts[:-1], cuts[1:])]


def _piecewise_solve(rhs, y0, window, t_eval, rtol, atol, profile):
    segs = _segments(profile, window)
    cols = []
    nfev = 0
    y = y0
    for k, (a, b, h) in enumerate(segs):
        last = k == len(segs) - 1
        te = t_eval[(t_eval >= a) & ((t_eval <= b) if last else (t_eval < b))]
        # always sample the segment end so the next segment restarts exactly there
        extra = te.size == 0 or te[-1] != b
        if extra:
            te = np.append(te, b)
        # scipy's error norm divides 0/0 when a step is exact; the step is then retried
        with np.errstate(invalid="ignore"):
            sol = solve_ivp(rhs, (a, b), y, method="DOP853", t_eval=te,
                            rtol=rtol, atol=atol, max_step=h)
        if not sol.success:
            raise IntegratorError(f"ODE integration failed on [{a:g}, {b:g}]: {sol.message}")
        nfev += sol.nfev
        y = sol.y[:, -1]
        cols.append(sol.y[:, :-1] if extra else sol.y)
    return np.concatenate(cols, axis=1), nfev


def extract_asymptotics(traj: BogoliubovTrajectory) -> tuple[complex, complex]:
    """Return ``(alpha_inf, beta_inf)`` at the window edge after checking the tail is flat."""
    al, be = traj.demodulated()
    n = len(traj.times)
    start = min(int(np.searchsorted(traj.times, (1 - TAIL_FRACTION) * traj.times[-1])), n - 2)
    ai, bi = complex(al[-1]), complex(be[-1])
    dev = max(np.max(np.abs(al[start:] - ai)), np.max(np.abs(be[start:] - bi)))
    if dev > TAIL_ABS_TOL:
        raise WindowTooShortError("right", f"demodulated tail varies by {dev:.3g} > {TAIL_ABS_TOL:g}")
    return ai, bi


def integrate_bogoliubov(profile: FrequencyProfile, cfg: NumericsConfig | None = None) -> BogoliubovTrajectory:
    cfg = cfg or NumericsConfig()
    window = cfg.window_for(profile)
    check_window(profile, window)
    t = sample_grid(profile, window, cfg.sample_count)
    res = integrate_augmented(profile, window, t, cfg.ode_rel_tol, cfg.ode_abs_tol)
    ph = np.exp(-1j * profile.phase(t))
    alpha, beta = res["a"] * ph, res["b"] * ph
    defect = float(np.max(np.abs(np.abs(alpha) ** 2 - np.abs(beta) ** 2 - 1.0)))
    if defect > max(1e-9, 100 * cfg.ode_rel_tol):
        raise IntegratorError(f"symplectic invariant violated: worst |alpha|^2-|beta|^2-1 = {defect:.3g}")
    traj = BogoliubovTrajectory(t, alpha, beta, 0j, 0j, profile, tuple(window),
                                cfg.ode_rel_tol, cfg.ode_abs_tol)
    ai, bi = extract_asymptotics(traj)
    return BogoliubovTrajectory(t, alpha, beta, ai, bi, profile, tuple(window),
                                cfg.ode_rel_tol, cfg.ode_abs_tol)


def dce_photon_number(beta_inf: complex) -> float:
    return abs(beta_inf) ** 2


def sudden_photon_number(omega1: float, omega2: float) -> float:
    """(omega2 - omega1)^2 / (4 omega1 omega2): photons from an instantaneous jump."""
    for name, v in (("omega1", omega1), ("omega2", omega2)):
        if not (math.isfinite(v) and v > 0):
            raise InputError(f"{name} must be finite and > 0, got {v!r}")
    return (omega2 - omega1) ** 2 / (4 * omega1 * omega2)
