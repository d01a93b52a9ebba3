"""Instantaneous frequency jump in the Jaynes-Cummings model.

Dressed states, the squeezed vacuum left behind by the jump, and the
resulting atomic excitation probability with its weak- and strong-coupling
limits.  Everything here is closed form or a rapidly convergent series.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InputError

LN2 = math.log(2.0)


@dataclass(frozen=True)
class DressedCoeffs:
    """Mixing coefficients of the dressed pair built from |n,down> and |n-1,up>.

    ``|n,down>_d   = S_minus |n,down> - R_minus |n-1,up>``
    ``|n-1,up>_d   = R_plus |n-1,up> + S_plus |n,down>``
    The second vector is the upper level.
    """

    n: int
    R_plus: float
    R_minus: float
    S_plus: float
    S_minus: float
    Delta: float
    lam: float

    def vectors(self):
        """Both dressed vectors in the bare basis (|n,down>, |n-1,up>)."""
        return (np.array([self.S_minus, -self.R_minus]),
                np.array([self.S_plus, self.R_plus]))

    @property
    def up_weight_of_upper(self) -> float:
        return self.R_plus ** 2


@dataclass(frozen=True)
class UndressedGround:
    """|0,down> is an exact eigenstate of the Jaynes-Cummings model."""

    n: int = 0
    energy: float = 0.0


def dressed_coeffs(n: int, Delta: float, lam: float):
    if n < 0:
        raise InputError(f"photon index must be >= 0, got {n}")
    if n == 0:
        return UndressedGround()
    if Delta == 0 and lam == 0:
        raise InputError("Delta and lambda both zero: dressed basis undefined")
    g2 = lam * lam * n
    half = 0.5 * Delta
    om = math.sqrt(half * half + g2)
    # (om - |half|) computed without cancellation
    big = om + abs(half)
    small = g2 / big
    hi, lo = (big, small) if Delta >= 0 else (small, big)
    R_plus = math.sqrt(hi / (2 * om))
    S_plus = math.sqrt(lo / (2 * om))
    return DressedCoeffs(n, R_plus, S_plus, S_plus, R_plus, float(Delta), float(lam))


def dressed_energies(n: int, omega: float, E0: float, lam: float) -> tuple[float, float]:
    """``(E_{n,down}, E_{n-1,up})`` of the stationary model at mode frequency ``omega``."""
    if n < 1:
        raise InputError("dressed pairs start at n = 1")
    d = E0 - omega
    root = math.sqrt(d * d / 4 + lam * lam * n)
    base = omega * n + d / 2
    return base - root, base + root


# -- squeezed vacuum ---------------------------------------------------------

def _q(rho):
    if not (rho > 0 and math.isfinite(rho)):
        raise InputError(f"rho must be finite and > 0, got {rho!r}")
    return (rho - 1.0) / (rho + 1.0)


def _log_sq_ratio(j):
    """log of (2j-1)!!/(2^j j!) = (2j)!/(4^j j!^2)."""
    j = np.asarray(j, dtype=float)
    return gammaln(2 * j + 1) - 2 * gammaln(j + 1) - 2 * j * LN2


def _jmax_for(q2, tol, moment=0):
    """Smallest index whose geometric tail bound (ratio <= q2) is below ``tol``.

    ``moment = 1`` bounds the photon-number weighted tail instead.
    """
    if q2 == 0:
        return 0
    j = 0
    step = 64
    while True:
        js = np.arange(j, j + step)
        # term ~ q2^j (2j-1)!!/(2^j j!) * (2j)^moment, tail ratio < q2*(1 + 1/j)^moment
        lt = js * math.log(q2) + _log_sq_ratio(js) + moment * np.log(np.maximum(2 * js, 1))
        r = q2 * (1 + 1 / np.maximum(js, 1)) ** moment
        bound = np.where(r < 1, np.exp(lt) * r / np.maximum(1 - r, 1e-300), np.inf)
        ok = np.nonzero(bound < tol)[0]
        if ok.size:
            return int(js[ok[0]])
        j += step
        step *= 2
        if j > 10**8:
            raise InputError("series does not converge within 1e8 terms")


@dataclass(frozen=True)
class SqueezedVacuum:
    rho: float
    amplitudes: np.ndarray  # c_{2j}, j = 0..j_max
    j_max: int
    deficit: float  # 1 - sum c^2, not renormalized

    def fock_vector(self, n_max=None):
        n_max = 2 * self.j_max if n_max is None else n_max
        v = np.zeros(n_max + 1)
        k = min(self.j_max, n_max // 2)
        v[0:2 * k + 1:2] = self.amplitudes[:k + 1]
        return v


def squeezed_vacuum_amplitudes(rho: float, series_tol: float = 1e-14, moment: int = 0,
                               j_max: int | None = None) -> SqueezedVacuum:
    """Fock amplitudes of the state left by a sudden jump omega1 -> rho*omega1.

    The series stops once the neglected weight is below ``series_tol``, or at
    ``j_max`` when given.
    """
    q = _q(rho)
    q2 = q * q
    jmax = _jmax_for(q2, series_tol, moment) if j_max is None else int(j_max)
    j = np.arange(jmax + 1)
    pref = 0.5 * math.log(2 * math.sqrt(rho) / (1 + rho))
    if q == 0:
        c = np.zeros(jmax + 1)
        c[0] = 1.0
    else:
        logc = pref + 0.5 * j * math.log(q2) + 0.5 * _log_sq_ratio(j)
        # (-1)^j q^j = (-q)^j
        sign = np.where(j % 2 == 0, 1.0, -np.sign(q))
        c = sign * np.exp(logc)
    return SqueezedVacuum(float(rho), c, jmax, float(1.0 - math.fsum(c * c)))


def squeezed_one_photon_amplitudes(rho: float, n_max: int) -> np.ndarray:
    """<m| e^{-iW} |1> for m = 0..n_max (nonzero only for odd m)."""
    th = 0.5 * math.log(rho)
    c = squeezed_vacuum_amplitudes(rho, j_max=(n_max + 2) // 2).fock_vector(n_max + 2)
    out = np.zeros(n_max + 1)
    m = np.arange(1, n_max + 1, 2)
    # e^{-iW} a^dag e^{iW} = cosh(th) a^dag + sinh(th) a
    out[m] = math.cosh(th) * np.sqrt(m) * c[m - 1] + math.sinh(th) * np.sqrt(m + 1) * c[m + 1]
    return out


# -- excitation probability ----------------------------------------------------

def n_dce(rho: float) -> float:
    """Photons created by a sudden jump without the atom, (rho-1)^2/(4 rho)."""
    _q(rho)
    return (rho - 1.0) ** 2 / (4.0 * rho)


def _series_terms(q2, xi, jmax):
    j = np.arange(jmax + 1, dtype=float)
    # (2j+1)!!/(2^j j!) = (2j+1) * (2j-1)!!/(2^j j!)
    la = np.log(2 * j + 1) + _log_sq_ratio(j) + j * math.log(q2) if q2 > 0 else None
    x = j + 1
    ax = abs(xi)
    if ax > 1.0:
        # xi^2 divided through; finite as xi -> inf
        u = 1.0 / (ax * ax)
        weight = 1.0 / (0.5 * u + 4 * x + np.sqrt(0.25 * u * u + 2 * u * x))
    else:
        weight = ax * ax / (0.5 + 4 * ax * ax * x + np.sqrt(0.25 + 2 * ax * ax * x))
    return np.exp(la) * weight


def excitation_probability_sudden(rho: float, xi: float, series_tol: float = 1e-14) -> float:
    """Total excitation probability after a sudden jump (exact in the coupling)."""
    q = _q(rho)
    if not math.isfinite(xi):
        raise InputError("xi must be finite; use excitation_strong_coupling for xi -> inf")
    if q == 0 or xi == 0:
        return 0.0
    q2 = q * q
    jmax = _jmax_for(q2, series_tol * 1e-2, moment=1)
    terms = _series_terms(q2, xi, jmax)
    s = math.fsum(terms)
    # 2 xi^2 sqrt(rho)(rho-1)^2/(1+rho)^3 = 2 q^2 sqrt(rho)/(1+rho) * xi^2, xi^2 already in terms
    return 2.0 * q2 * math.sqrt(rho) / (1.0 + rho) * s


def excitation_weak_coupling(rho: float, xi: float) -> float:
    """Closed-form weak-coupling approximation in its reference form.

    Its leading term xi^2 N is exact; its xi^4 coefficient does not
    agree with the expansion of the full series (see
    :func:`weak_coupling_expansion`).
    """
    N = n_dce(rho)
    return xi ** 2 * N * (1 - 6 * xi ** 2 / (N + 1) * (1 + N / (2 * (N + 1)) * (1 - 3 * (N + 1) ** -1.25)))


def weak_coupling_expansion(rho: float, xi: float) -> float:
    """Taylor expansion of the exact series through xi^4.

    Uses <n> = N and <n^2> = 3N^2 + 2N for the squeezed vacuum:
    w = xi^2 N - 3 xi^4 <n^2>.
    """
    N = n_dce(rho)
    return xi ** 2 * N * (1 - 3 * xi ** 2 * (3 * N + 2))


def excitation_strong_coupling(rho: float) -> float:
    N = n_dce(rho)
    return N / (2 * (1 + N + math.sqrt(N + 1)))


# -- amplitudes and photon number ----------------------------------------------

@dataclass(frozen=True)
class SuddenAmplitudes:
    """Amplitudes onto the final dressed states, indexed by photon number.

    ``down[n]`` belongs to the ground-like member of each dressed pair,
    ``up[n]`` to the excited-like member carrying n photons.
    """

    down: np.ndarray
    up: np.ndarray


def sudden_amplitudes(rho: float, xi: float, series_tol: float = 1e-14) -> SuddenAmplitudes:
    sv = squeezed_vacuum_amplitudes(rho, series_tol * 1e-2, moment=1)
    size = 2 * sv.j_max + 1
    down = np.zeros(size)
    up = np.zeros(size)
    down[0] = sv.amplitudes[0]
    # Delta scaled to 1: the dressed pair depends on lambda/Delta only
    for j in range(1, sv.j_max + 1):
        m = 2 * j
        c = sv.amplitudes[j]
        if xi == 0:
            down[m] = c
            continue
        dc = dressed_coeffs(m, 1.0, abs(xi))
        # |m,down> = S_minus |m,down>_d + S_plus |m-1,up>_d
        down[m] = dc.S_minus * c
        up[m - 1] = dc.S_plus * c
    return SuddenAmplitudes(down, up)


@dataclass(frozen=True)
class MeanPhotons:
    n_bar: float
    n_dce: float
    w_up: float
    direct_sum: float


def mean_photons_with_atom(rho: float, xi: float, series_tol: float = 1e-14) -> MeanPhotons:
    N = n_dce(rho)
    w = excitation_probability_sudden(rho, xi, series_tol)
    amps = sudden_amplitudes(rho, xi, series_tol)
    n = np.arange(amps.down.size)
    direct = math.fsum(n * (amps.down ** 2 + amps.up ** 2))
    return MeanPhotons(N - w, N, w, direct)


def excitation_grid(rhos, xis, series_tol: float = 1e-14) -> np.ndarray:
    """Rows (rho, xi, w_up) over the outer product of the two axes."""
    rows = [(r, x, excitation_probability_sudden(r, x, series_tol)) for r in rhos for x in xis]
    return np.array(rows, dtype=float)
