"""Physical parameters, mode-frequency profiles and numerical controls.

Units are hbar = 1; every frequency is an inverse time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from enum import Enum

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import InputError

# Reference parameter set: the atom sits between the initial and final mode frequency.
REF_E0 = 0.8
REF_OMEGA1 = 0.5
REF_OMEGA2 = 5.0


@dataclass(frozen=True)
class ModelParams:
    E0: float = REF_E0
    omega1: float = REF_OMEGA1
    omega2: float = REF_OMEGA2
    lam: float = 0.01
    tau: float = 1.0

    def __post_init__(self):
        for name in ("E0", "omega1", "omega2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be finite and > 0, got {v!r}")
        for name in ("lam", "tau"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise InputError(f"{name} must be finite and >= 0, got {v!r}")

    @property
    def rho(self) -> float:
        return self.omega2 / self.omega1

    @property
    def delta(self) -> float:
        """Detuning used by the sudden formulas (out-frequency convention)."""
        return self.E0 - self.omega2

    @property
    def delta2(self) -> float:
        return self.E0 - self.omega2

    @property
    def xi(self) -> float:
        if self.delta == 0:
            return math.inf if self.lam > 0 else 0.0
        return self.lam / self.delta

    @property
    def theta(self) -> float:
        return 0.5 * math.log(self.rho)

    @property
    def n_dce_sudden(self) -> float:
        return (self.omega2 - self.omega1) ** 2 / (4 * self.omega1 * self.omega2)

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)

    def profile(self) -> "FrequencyProfile":
        """Smooth logistic profile, or the sudden jump when tau == 0."""
        if self.tau == 0:
            return FrequencyProfile.sudden(self.omega1, self.omega2)
        return FrequencyProfile.smooth(self.omega1, self.omega2, self.tau)


class ProfileKind(str, Enum):
    SMOOTH = "smooth"
    SUDDEN = "sudden"
    CUSTOM = "custom"


def _softplus(x):
    return np.logaddexp(0.0, x)


def _sigmoid(x):
    # two-branch evaluation keeps exp() from overflowing for |x| up to 1e3 and beyond
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    e = np.exp(-x[pos])
    out[pos] = 1.0 / (1.0 + e)
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def _sigmoid_prime(x):
    # s(1-s) = e^{-|x|}/(1+e^{-|x|})^2, symmetric in x
    e = np.exp(-np.abs(np.asarray(x, dtype=float)))
    return e / (1.0 + e) ** 2


@dataclass(frozen=True)
class FrequencyProfile:
    """Mode frequency omega(t) between asymptotic values omega1 and omega2.

    ``phase(t)`` is the accumulated phase with the convention
    ``phase(t) - omega1*t -> 0`` as t -> -inf and ``phase(t) - omega2*t -> 0``
    as t -> +inf (exact for the smooth and sudden kinds), which makes the
    demodulated Bogoliubov variables converge to the asymptotic constants.
    """

    kind: ProfileKind
    omega1: float
    omega2: float
    tau: float = 0.0
    table_t: tuple = field(default=(), repr=False)
    table_omega: tuple = field(default=(), repr=False)
    _spline: object = field(default=None, repr=False, compare=False)

    @classmethod
    def smooth(cls, omega1, omega2, tau):
        if tau == 0:
            raise InputError("tau = 0 with the smooth profile; use FrequencyProfile.sudden")
        if not (tau > 0 and math.isfinite(tau)):
            raise InputError(f"tau must be finite and > 0, got {tau!r}")
        _check_freq(omega1, omega2)
        return cls(ProfileKind.SMOOTH, float(omega1), float(omega2), float(tau))

    @classmethod
    def sudden(cls, omega1, omega2):
        _check_freq(omega1, omega2)
        return cls(ProfileKind.SUDDEN, float(omega1), float(omega2))

    @classmethod
    def custom(cls, t, omega):
        """Tabulated profile, interpolated by a clamped cubic spline.

        Outside the table the frequency is held at its end values.
        """
        t = np.asarray(t, dtype=float)
        omega = np.asarray(omega, dtype=float)
        if t.ndim != 1 or t.shape != omega.shape or t.size < 4:
            raise InputError("custom profile needs matching 1-D tables with >= 4 points")
        if np.any(np.diff(t) <= 0):
            raise InputError("custom profile times must be strictly increasing")
        if np.any(omega <= 0) or not np.all(np.isfinite(omega)):
            raise InputError("custom profile frequencies must be finite and > 0")
        spline = CubicSpline(t, omega, bc_type="clamped")
        if np.any(spline(np.linspace(t[0], t[-1], 20 * t.size)) <= 0):
            raise InputError("interpolated custom profile is not positive")
        return cls(ProfileKind.CUSTOM, float(omega[0]), float(omega[-1]),
                   table_t=tuple(t), table_omega=tuple(omega),
                   _spline=(spline, spline.derivative(), spline.antiderivative()))

    # -- evaluation ---------------------------------------------------------

    def omega(self, t):
        return self.evaluate(t)[0]

    def evaluate(self, t):
        """Return ``(omega(t), omega_dot(t))``; scalars in, scalars out."""
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        if not np.all(np.isfinite(t)):
            raise InputError("time must be finite")
        w1, w2 = self.omega1, self.omega2
        if self.kind is ProfileKind.SMOOTH:
            x = t / self.tau
            s = _sigmoid(x)
            w = w1 + (w2 - w1) * s
            wd = (w2 - w1) * _sigmoid_prime(x) / self.tau
        elif self.kind is ProfileKind.SUDDEN:
            # derivative is a delta function at t = 0; reported as zero
            w = np.where(t < 0, w1, w2)
            wd = np.zeros_like(t)
        else:
            spl, dspl, _ = self._spline
            t0, t1 = self.table_t[0], self.table_t[-1]
            tc = np.clip(t, t0, t1)
            w = spl(tc)
            wd = np.where((t < t0) | (t > t1), 0.0, dspl(tc))
        if scalar:
            return float(w), float(wd)
        return w, wd

    def phase(self, t):
        scalar = np.ndim(t) == 0
        t = np.asarray(t, dtype=float)
        w1, w2 = self.omega1, self.omega2
        if self.kind is ProfileKind.SMOOTH:
            p = w1 * t + (w2 - w1) * self.tau * _softplus(t / self.tau)
        elif self.kind is ProfileKind.SUDDEN:
            p = np.where(t < 0, w1 * t, w2 * t)
        else:
            _, _, anti = self._spline
            t0, t1 = self.table_t[0], self.table_t[-1]
            # anchored so that phase = omega1*t left of the table
            tc = np.clip(t, t0, t1)
            p = w1 * t0 + anti(tc) - anti(t0)
            p = np.where(t < t0, w1 * t, p)
            p = np.where(t > t1, p + w2 * (t - t1), p)
        return float(p) if scalar else p

    @property
    def switch_span(self) -> tuple[float, float]:
        """Interval outside which omega is constant to double precision."""
        if self.kind is ProfileKind.SMOOTH:
            return (-40 * self.tau, 40 * self.tau)
        if self.kind is ProfileKind.SUDDEN:
            return (0.0, 0.0)
        return (self.table_t[0], self.table_t[-1])


def _check_freq(omega1, omega2):
    for name, v in (("omega1", omega1), ("omega2", omega2)):
        if not (math.isfinite(v) and v > 0):
            raise InputError(f"{name} must be finite and > 0, got {v!r}")


def eval_frequency(profile: FrequencyProfile, t: float) -> tuple[float, float]:
    if not math.isfinite(t):
        raise InputError(f"non-finite time {t!r}")
    return profile.evaluate(t)


def default_window(profile: FrequencyProfile) -> tuple[float, float]:
    w1, w2 = profile.omega1, profile.omega2
    if profile.kind is ProfileKind.SMOOTH:
        return (-max(30 * profile.tau, 40 / w1), max(30 * profile.tau, 40 / w2))
    if profile.kind is ProfileKind.SUDDEN:
        return (-40 / w1, 40 / w2)
    t0, t1 = profile.table_t[0], profile.table_t[-1]
    return (t0 - 40 / w1, t1 + 40 / w2)


@dataclass(frozen=True)
class NumericsConfig:
    window: tuple[float, float] | None = None
    ode_rel_tol: float = 1e-11
    ode_abs_tol: float = 1e-13
    series_tol: float = 1e-14
    fock_max: int = 64
    sample_count: int = 4001
    truncation_tol: float = 1e-6

    def __post_init__(self):
        if self.window is not None:
            lo, hi = self.window
            if not (lo < 0 < hi):
                raise InputError(f"window must satisfy t_min < 0 < t_max, got {self.window}")
        for name in ("ode_rel_tol", "ode_abs_tol", "series_tol", "truncation_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be > 0")
        if self.fock_max < 2:
            raise InputError("fock_max must be >= 2")
        if self.sample_count < 16:
            raise InputError("sample_count must be >= 16")

    def window_for(self, profile: FrequencyProfile) -> tuple[float, float]:
        return tuple(self.window) if self.window is not None else default_window(profile)

    def with_(self, **kw) -> "NumericsConfig":
        return replace(self, **kw)


def sample_grid(profile: FrequencyProfile, window, count: int) -> np.ndarray:
    """Uniform grid over the window, refined across the switching region."""
    lo, hi = window
    grid = np.linspace(lo, hi, count)
    if profile.kind is ProfileKind.SMOOTH:
        a, b = max(lo, -15 * profile.tau), min(hi, 15 * profile.tau)
        if b > a:
            grid = np.union1d(grid, np.linspace(a, b, max(count // 4, 201)))
    elif profile.kind is ProfileKind.SUDDEN:
        grid = np.union1d(grid, [0.0])
    return grid


def param_names():
    return [f.name for f in fields(ModelParams)]
