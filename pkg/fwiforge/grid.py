"""Grid containers shared by every part of the toolkit.

Arrays are stored as read-only float64; axis order is depth first
(row = z, column = x).
"""
import numpy as np

from .base import BaseParams
from .exceptions import ConfigError, DimensionError


# velocity range and geometry of the Vel / Fault / Style datasets
OPENFWI_VRANGE = (1500., 4500.)
OPENFWI_SHAPE = (70, 70)
OPENFWI_GATHER_SHAPE = (5, 1000, 70)


def _frozen(values, ndim, name):
    values = np.array(values, dtype=np.float64)
    if values.ndim != ndim:
        raise DimensionError("{0} must be {1}D, got shape {2}".format(name, ndim, values.shape))
    if values.size == 0:
        raise DimensionError("{0} must not be empty".format(name))
    if not np.all(np.isfinite(values)):
        raise ValueError("{0} contains non-finite values".format(name))
    values.flags.writeable = False
    return values


def meters_to_cell(position, dx):
    """Convert a coordinate in meters to a cell index.

    The first cell sits at 1 * `dx`, as in the acquisition scripts
    the datasets were generated with.

    Examples
    --------
    >>> meters_to_cell(10., 10.)
    0
    >>> meters_to_cell(690., 10.)
    68
    """
    return int(round(position / float(dx))) - 1


class VelocityMap(object):
    """2D map of acoustic velocities in m/s.

    Parameters
    ----------
    values : (nz, nx) array-like
        Velocities, strictly positive and finite.
    dx : positive float, optional
        Grid spacing in meters.
    n_layers : None or int, optional
        Number of flat layers the map was generated from, if known.

    Examples
    --------
    >>> m = VelocityMap([[1500., 1500.], [3000., 3000.]])
    >>> m.nz, m.nx, m.dx
    (2, 2, 10.0)
    >>> VelocityMap([[1500., 0.]])
    Traceback (most recent call last):
        ...
    ValueError: velocity map must be strictly positive
    """
    def __init__(self, values, dx=10., n_layers=None):
        self.values = _frozen(values, 2, 'velocity map')
        if np.any(self.values <= 0.):
            raise ValueError('velocity map must be strictly positive')
        if dx <= 0:
            raise ConfigError("grid spacing must be positive, got {0}".format(dx))
        self.dx = float(dx)
        self.n_layers = n_layers

    @property
    def nz(self):
        return self.values.shape[0]

    @property
    def nx(self):
        return self.values.shape[1]

    @property
    def shape(self):
        return self.values.shape

    def replace(self, values):
        """New map on the same grid with `values`."""
        return VelocityMap(values, dx=self.dx, n_layers=self.n_layers)

    def in_range(self, vmin=OPENFWI_VRANGE[0], vmax=OPENFWI_VRANGE[1]):
        return bool(self.values.min() >= vmin and self.values.max() <= vmax)

    def __repr__(self):
        return "VelocityMap(nz={0}, nx={1}, dx={2}, vmin={3:.1f}, vmax={4:.1f})".format(
            self.nz, self.nx, self.dx, self.values.min(), self.values.max())


class SeismicGather(object):
    """Pressure traces of all shots, (ns, nt_stored, nr).

    Parameters
    ----------
    traces : (ns, nt_stored, nr) array-like
    dt : positive float
        Time sampling in seconds.
    """
    def __init__(self, traces, dt=0.001):
        self.traces = _frozen(traces, 3, 'seismic gather')
        if dt <= 0:
            raise ConfigError("time step must be positive, got {0}".format(dt))
        self.dt = float(dt)

    @property
    def ns(self):
        return self.traces.shape[0]

    @property
    def nt_stored(self):
        return self.traces.shape[1]

    @property
    def nr(self):
        return self.traces.shape[2]

    @property
    def shape(self):
        return self.traces.shape

    def replace(self, traces):
        return SeismicGather(traces, dt=self.dt)

    def __repr__(self):
        return "SeismicGather(ns={0}, nt_stored={1}, nr={2}, dt={3})".format(
            self.ns, self.nt_stored, self.nr, self.dt)


class AcquisitionGeometry(BaseParams):
    """Grid, time stepping and source/receiver layout of a survey.

    Parameters
    ----------
    dx : positive float
        Grid spacing in meters.
    dt : positive float
        Time step in seconds.
    nt_sim : int
        Number of simulated time steps.
    nt_stored : int
        Number of stored samples, `nt_stored` <= `nt_sim`.
    nbc : int
        Width of the absorbing boundary in cells, >= 1.
    source_positions : sequence of (x_cell, z_cell)
    receiver_positions : sequence of (x_cell, z_cell)
    source_freq : positive float
        Peak frequency of the Ricker source in Hz.
    source_gain : float
        Global scale of the injected wavelet.
    sponge_decay : positive float
        Strength of the exponential sponge.
    wavelet_delay : None or float
        Source delay in seconds; 1 / `source_freq` if None.

    Examples
    --------
    >>> geom = AcquisitionGeometry.openfwi()
    >>> geom.ns, geom.nr, geom.nt_sim, geom.nt_stored, geom.nbc
    (5, 70, 1001, 1000, 120)
    >>> [x * geom.dx + geom.dx for x, _ in geom.source_positions]
    [10.0, 150.0, 290.0, 430.0, 570.0]
    >>> AcquisitionGeometry(nt_sim=10, nt_stored=20)
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: nt_stored (20) must not exceed nt_sim (10)
    """
    def __init__(self, dx=10., dt=0.001, nt_sim=1001, nt_stored=1000, nbc=120,
                 source_positions=None, receiver_positions=None, source_freq=15.,
                 source_gain=1., sponge_decay=3., wavelet_delay=None):
        self.dx = dx
        self.dt = dt
        self.nt_sim = nt_sim
        self.nt_stored = nt_stored
        self.nbc = nbc
        if source_positions is None:
            source_positions = self.surface_positions(OPENFWI_SHAPE[1], n=5)
        if receiver_positions is None:
            receiver_positions = self.surface_positions(OPENFWI_SHAPE[1])
        self.source_positions = tuple(tuple(int(c) for c in p) for p in source_positions)
        self.receiver_positions = tuple(tuple(int(c) for c in p) for p in receiver_positions)
        self.source_freq = source_freq
        self.source_gain = source_gain
        self.sponge_decay = sponge_decay
        self.wavelet_delay = wavelet_delay
        super(AcquisitionGeometry, self).__init__()

    @staticmethod
    def surface_positions(nx, n=None, spacing=None, depth=0):
        """`n` positions evenly spread over the top of a grid `nx` cells
        wide starting from the first column (one per column if `n` is None).

        Examples
        --------
        >>> AcquisitionGeometry.surface_positions(70, n=5)
        ((0, 0), (14, 0), (28, 0), (42, 0), (56, 0))
        >>> AcquisitionGeometry.surface_positions(3)
        ((0, 0), (1, 0), (2, 0))
        """
        if n is None:
            return tuple((x, depth) for x in range(nx))
        spacing = spacing or max(1, nx // n)
        return tuple((i * spacing, depth) for i in range(n))

    @classmethod
    def surface(cls, nx, ns=5, source_spacing=None, depth=0, **params):
        """Sources and receivers evenly distributed on the surface."""
        return cls(source_positions=cls.surface_positions(nx, n=ns, spacing=source_spacing, depth=depth),
                   receiver_positions=cls.surface_positions(nx, depth=depth),
                   **params)

    @classmethod
    def openfwi(cls, nx=OPENFWI_SHAPE[1], **params):
        """Acquisition used for the Vel, Fault and Style datasets."""
        return cls.surface(nx, ns=5, source_spacing=14, **params)

    def _check_params(self):
        if self.dx <= 0 or self.dt <= 0:
            raise ConfigError("dx and dt must be positive, got dx={0}, dt={1}".format(self.dx, self.dt))
        if self.nbc < 1:
            raise ConfigError("nbc must be >= 1, got {0}".format(self.nbc))
        if self.nt_stored < 1:
            raise ConfigError("nt_stored must be >= 1, got {0}".format(self.nt_stored))
        if self.nt_stored > self.nt_sim:
            raise ConfigError("nt_stored ({0}) must not exceed nt_sim ({1})".format(self.nt_stored, self.nt_sim))
        if self.source_freq <= 0:
            raise ConfigError("source frequency must be positive, got {0}".format(self.source_freq))
        if self.sponge_decay <= 0:
            raise ConfigError("sponge decay must be positive, got {0}".format(self.sponge_decay))
        if not self.source_positions or not self.receiver_positions:
            raise ConfigError('at least one source and one receiver are required')

    @property
    def ns(self):
        return len(self.source_positions)

    @property
    def nr(self):
        return len(self.receiver_positions)

    @property
    def delay(self):
        if self.wavelet_delay is None:
            return 1. / self.source_freq
        return self.wavelet_delay

    def check_map(self, vmap):
        """Ensure `vmap` shares the grid spacing and contains every
        source and receiver position."""
        if not np.isclose(vmap.dx, self.dx):
            raise ConfigError("grid spacing mismatch: map dx={0}, geometry dx={1}".format(vmap.dx, self.dx))
        for kind, positions in (('source', self.source_positions),
                                ('receiver', self.receiver_positions)):
            for x, z in positions:
                if not (0 <= x < vmap.nx and 0 <= z < vmap.nz):
                    raise ConfigError("{0} position ({1}, {2}) lies outside the {3}x{4} grid"
                                      .format(kind, x, z, vmap.nz, vmap.nx))
        return self
