class FwiForgeError(Exception):
    """Base class for all errors raised by fwiforge."""


class ConfigError(FwiForgeError, ValueError):
    """Invalid parameter value or parameter combination."""


class DimensionError(FwiForgeError, ValueError):
    """Arrays with incompatible shapes."""


class StabilityError(ConfigError):
    """Courant number above the bound of the 2-4 stencil."""

    def __init__(self, courant, c_max, dt, dx, bound):
        self.courant = courant
        self.c_max = c_max
        self.dt = dt
        self.dx = dx
        self.bound = bound
        msg = "unstable time step: Courant number {0:.4f} > {1} " \
              "(c_max={2} m/s, dt={3} s, dx={4} m)".format(courant, bound, c_max, dt, dx)
        super(StabilityError, self).__init__(msg)


class NumericalBlowupError(FwiForgeError, RuntimeError):
    """Non-finite values appeared in the simulated wavefield."""

    def __init__(self, step):
        self.step = step
        super(NumericalBlowupError, self).__init__(
            "non-finite wavefield detected at time step {0}".format(step))


class FormatError(FwiForgeError, ValueError):
    """Malformed array file."""


class UnsupportedFormatError(FormatError):
    """Well-formed array file using a layout that is not supported."""


class PairingError(FwiForgeError):
    """Seismic data file without its velocity counterpart (or vice versa)."""


class DatasetError(FwiForgeError):
    """Empty or inconsistent dataset."""
