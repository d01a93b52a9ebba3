"""Lamb shift of the dressed ground state and the "shaking" excitation channel.

With the counter-rotating terms kept, the ground state |0,down> is dressed
and shifted by E_L = -lam^2/(omega + E0).  A sudden change of omega leaves
the atom in the old dressed ground state, which overlaps the new excited
states; to first order the excitation probability is (dE_L/lam)^2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NearResonanceError
from .model import ModelParams
from .sudden import squeezed_one_photon_amplitudes, squeezed_vacuum_amplitudes

RESONANCE_REL = 1e-6


def lamb_shift(omega: float, E0: float, lam: float) -> float:
    return -lam * lam / (omega + E0)


@dataclass(frozen=True)
class LambShiftReport:
    E_L_initial: float
    E_L_final: float
    delta_E_L: float
    w_shake: float
    lam: float

    def rows(self):
        return [("E_L_initial", self.E_L_initial), ("E_L_final", self.E_L_final),
                ("delta_E_L", self.delta_E_L), ("w_shake", self.w_shake), ("lambda", self.lam)]


def shaking_probability(params: ModelParams) -> LambShiftReport:
    E0, lam = params.E0, params.lam
    e1 = lamb_shift(params.omega1, E0, lam)
    e2 = lamb_shift(params.omega2, E0, lam)
    w = lam * lam * (1 / (params.omega2 + E0) - 1 / (params.omega1 + E0)) ** 2
    return LambShiftReport(e1, e2, e2 - e1, w, lam)


@dataclass(frozen=True)
class FirstOrderDressed:
    """First-order dressed states of the stationary model.

    ``down`` and ``up`` map bare labels ``(n, s)`` (s = 0 down, 1 up) to
    coefficients; energies are correct to second order.
    """

    n: int
    down: dict
    up: dict
    E_down: float
    E_up: float
    frequency_shift: float  # the n-proportional renormalization of omega (down level)


def dressed_states_first_order(n: int, omega: float, E0: float, lam: float) -> FirstOrderDressed:
    if abs(omega - E0) < RESONANCE_REL * E0:
        raise NearResonanceError(f"omega={omega!r} is resonant with E0={E0!r}; perturbation theory fails")
    down = {(n, 0): 1.0, (n + 1, 1): -lam * math.sqrt(n + 1) / (omega + E0)}
    up = {(n, 1): 1.0, (n + 1, 0): -lam * math.sqrt(n + 1) / (omega - E0)}
    if n > 0:
        down[(n - 1, 1)] = lam * math.sqrt(n) / (omega - E0)
        up[(n - 1, 0)] = lam * math.sqrt(n) / (omega + E0)
    shift = 2 * lam * lam * E0 / (omega * omega - E0 * E0)
    E_down = (omega + shift) * n - lam * lam / (omega + E0)
    E_up = (omega - shift) * n + E0 - lam * lam / (omega - E0)
    return FirstOrderDressed(n, down, up, E_down, E_up, shift)


def _overlap(bra: dict, ket: dict) -> float:
    return sum(v * ket.get(k, 0.0) for k, v in bra.items())


def amplitude_split(n: int, params: ModelParams, *, zero_W: bool = False) -> tuple[complex, complex]:
    """Shaking and Casimir parts of the sudden excitation amplitude, first order in lam.

    ``zero_W`` drops the Casimir kick (W = 0) while keeping the frequency jump.
    """
    E0, lam, w1, w2 = params.E0, params.lam, params.omega1, params.omega2
    ground = dressed_states_first_order(0, w1, E0, lam).down
    final_up = dressed_states_first_order(n, w2, E0, lam).up
    A_L = _overlap(final_up, ground)
    if zero_W or w1 == w2:
        return complex(A_L), 0j
    n_top = n + 3
    c = squeezed_vacuum_amplitudes(params.rho, j_max=n_top // 2).fock_vector(n_top)
    u1 = squeezed_one_photon_amplitudes(params.rho, n_top)
    # (e^{-iW} - 1) applied to the dressed ground state, bare-basis coefficients
    kicked = {}
    for m in range(n_top + 1):
        kicked[(m, 0)] = c[m] - (1.0 if m == 0 else 0.0)
        kicked[(m, 1)] = ground[(1, 1)] * (u1[m] - (1.0 if m == 1 else 0.0))
    A_C = _overlap(final_up, kicked)
    return complex(A_L), complex(A_C)


def sudden_excitation_first_order(params: ModelParams, n_max: int = 200) -> float:
    """sum_n |A_L + A_C|^2: total excitation after a sudden jump, full model, order lam^2."""
    tot = 0.0
    for n in range(1, n_max + 1, 2):
        a, b = amplitude_split(n, params)
        tot += abs(a + b) ** 2
    return tot
