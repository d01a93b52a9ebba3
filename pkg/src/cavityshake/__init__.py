"""Two-level atom in a cavity whose mode frequency is switched in time.

Photon creation from vacuum (Bogoliubov coefficients), atomic excitation in the
sudden and transient regimes, excitation by the jump of the ground-state shift,
the atom's second-order effect on the photon number, and an exact truncated
Fock-space evolution used to cross-check all of them.
"""
from .errors import (BaselineUndefinedError, CavityShakeError, InputError, NumericalError,
                     ResonanceError, WindowTooShortError)
from .model import FrequencyProfile, ModelParams, NumericsConfig

__version__ = "0.1.0"

__all__ = [
    "BaselineUndefinedError", "CavityShakeError", "FrequencyProfile", "InputError",
    "ModelParams", "NumericalError", "NumericsConfig", "ResonanceError",
    "WindowTooShortError", "__version__",
]
