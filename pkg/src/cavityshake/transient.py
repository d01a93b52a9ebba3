"""First-order excitation of the atom for a finite switching time.

To first order in the coupling the excited amplitude is ``-i lam B(t)`` with
``B(t) = int beta(t') exp(i E0 t') dt'``.  At late times B splits into a
constant and a term oscillating at the out-detuning D2 = E0 - omega2; only
the constant part is a transition amplitude.  Integrating by parts gives

    w_up = (lam/D2)^2 |beta_inf|^2 F,
    F    = | int exp(i D2 t) d/dt[beta(t) exp(i omega2 t) / beta_inf] dt |^2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bogoliubov import BogoliubovTrajectory, integrate_augmented, integrate_bogoliubov
from .errors import BaselineUndefinedError, ResonanceError
from .model import ModelParams, NumericsConfig

BASELINE_MIN = 1e-12


@dataclass(frozen=True)
class TransientResult:
    times: np.ndarray
    B_samples: np.ndarray
    F: float
    w_up: float
    Delta2: float
    N_dce: float
    J: complex
    tail_error: float
    coupling_strength: float  # lam * max|B|, should be << 1

    def csv_row(self, tau):
        return (tau, self.F, self.w_up, self.N_dce)


def _aux(traj: BogoliubovTrajectory, E0: float):
    return integrate_augmented(traj.profile, traj.window, traj.times, traj.rtol, traj.atol, E0=E0)


def compute_B(traj: BogoliubovTrajectory, E0: float) -> np.ndarray:
    """Running integral ``B(t)`` on the trajectory grid, starting from zero at t_min."""
    return _aux(traj, E0)["B"]


def _check_baseline(traj, E0):
    d2 = E0 - traj.profile.omega2
    if d2 == 0:
        raise ResonanceError("E0 == omega2: the oscillating part of B(t) cannot be separated")
    if abs(traj.beta_inf) < BASELINE_MIN:
        raise BaselineUndefinedError(
            f"|beta_inf| = {abs(traj.beta_inf):.3g} < {BASELINE_MIN:g}; no Casimir baseline to compare with")
    return d2


def _tail_error(times, J):
    t_end = times[-1]
    k = int(np.searchsorted(times, 0.9 * t_end))
    return float(np.max(np.abs(J[k:] - J[-1])))


def excitation_efficiency_F(traj: BogoliubovTrajectory, E0: float) -> float:
    _check_baseline(traj, E0)
    J = _aux(traj, E0)["J"][-1]
    return float(abs(J / traj.beta_inf) ** 2)


def excitation_probability_transient(traj: BogoliubovTrajectory, params: ModelParams) -> TransientResult:
    d2 = _check_baseline(traj, params.E0)
    aux = _aux(traj, params.E0)
    J = complex(aux["J"][-1])
    F = float(abs(J / traj.beta_inf) ** 2)
    N = traj.n_dce
    w = (params.lam / d2) ** 2 * N * F
    tail = _tail_error(traj.times, aux["J"]) / abs(J) if J != 0 else 0.0
    return TransientResult(traj.times, aux["B"], F, w, d2, N, J, tail,
                           float(params.lam * np.max(np.abs(aux["B"]))))


def B_two_term(traj: BogoliubovTrajectory, E0: float, J: complex, t) -> np.ndarray:
    """Late-time form of B: (-i/D2)(beta_inf exp(i D2 t) - J)."""
    d2 = E0 - traj.profile.omega2
    return (-1j / d2) * (traj.beta_inf * np.exp(1j * d2 * np.asarray(t)) - J)


def transient_sweep(params: ModelParams, taus, cfg: NumericsConfig | None = None):
    """Rows (tau, F, w_up, N_dce); points without a Casimir baseline give NaN."""
    rows = []
    for tau in taus:
        p = params.with_(tau=float(tau))
        traj = integrate_bogoliubov(p.profile(), cfg)
        try:
            r = excitation_probability_transient(traj, p)
            rows.append((tau, r.F, r.w_up, r.N_dce))
        except BaselineUndefinedError:
            rows.append((tau, np.nan, np.nan, traj.n_dce))
    return np.array(rows, dtype=float)
