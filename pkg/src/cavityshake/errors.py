"""Exception hierarchy shared by the physics modules and the CLI."""


class CavityShakeError(Exception):
    """Base class for every error raised by this package."""


class InputError(CavityShakeError, ValueError):
    """Invalid or inconsistent user input (CLI exit code 1)."""


class NumericalError(CavityShakeError, RuntimeError):
    """A computation could not meet its numerical contract (CLI exit code 2)."""


class WindowTooShortError(NumericalError):
    def __init__(self, edge, detail=""):
        self.edge = edge
        msg = f"integration window too short at the {edge} edge"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class IntegratorError(NumericalError):
    pass


class BaselineUndefinedError(NumericalError):
    """|beta_inf| is too small for a ratio against the Casimir baseline."""


class ResonanceError(InputError):
    """Out-frequency detuning E0 - omega2 vanishes."""


class NearResonanceError(InputError):
    """Non-degenerate perturbation theory requested with omega ~ E0."""


class NormDriftError(NumericalError):
    pass
