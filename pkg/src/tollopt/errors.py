"""Exception types shared across the package."""


class TollOptError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(TollOptError, ValueError):
    """A configuration value is invalid or inconsistent."""


class SamplingError(TollOptError, RuntimeError):
    """A rejection sampler failed to produce an in-bounds draw."""


class EncodingError(TollOptError, ValueError):
    """A decision vector cannot be decoded into a toll profile."""


class GridlockError(TollOptError, RuntimeError):
    """The network reached jam accumulation with travelers still inside.

    ``stall_time`` is the minute at which the travel speed first dropped to
    zero while trips were unfinished.
    """

    def __init__(self, stall_time: float, accumulation: int):
        self.stall_time = float(stall_time)
        self.accumulation = int(accumulation)
        super().__init__(
            f"network speed reached zero at t={stall_time:.3f} min with "
            f"{accumulation} travelers still inside"
        )


class NumericalError(TollOptError, RuntimeError):
    """A linear-algebra operation failed even after jitter escalation."""
