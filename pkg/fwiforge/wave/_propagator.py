from functools import partial

import numpy as np

from ..exceptions import ConfigError, NumericalBlowupError, StabilityError
from ..grid import SeismicGather
from ..kernels import laplacian_weights
from ..utils import Stopwatch, parallel_map, print_inline
from ._model import pad_with_sponge
from ._source import make_wavelet


# sqrt(3/8), rounded down: 2D limit of the 2-4 leapfrog scheme
COURANT_BOUND = 0.606
BLOWUP_CHECK_EVERY = 10

_W4 = laplacian_weights(4)


def check_stability(vmap, geom):
    """Courant number c_max dt / dx of `vmap` sampled with `geom`.

    Raises
    ------
    StabilityError
        If it exceeds COURANT_BOUND.

    Examples
    --------
    >>> from fwiforge.grid import VelocityMap, AcquisitionGeometry
    >>> vmap = VelocityMap(np.full((4, 4), 4500.))
    >>> round(check_stability(vmap, AcquisitionGeometry()), 6)
    0.45
    >>> check_stability(vmap, AcquisitionGeometry(dt=0.0015))
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.StabilityError: unstable time step: Courant number 0.6750 > 0.606 (c_max=4500.0 m/s, dt=0.0015 s, dx=10.0 m)
    """
    c_max = float(vmap.values.max())
    courant = c_max * geom.dt / geom.dx
    if courant > COURANT_BOUND:
        raise StabilityError(courant, c_max, geom.dt, geom.dx, COURANT_BOUND)
    return courant


def laplacian(p, dx, out=None):
    """4th-order 5-point-per-axis Laplacian of `p`.

    Only cells at least 2 away from the border are written; the
    border of `out` is left untouched (zero for a fresh array).

    Examples
    --------
    >>> p = np.tile((np.arange(7.) ** 2)[:, np.newaxis], (1, 7))
    >>> round(float(laplacian(p, 1.)[3, 3]), 10)
    2.0
    """
    if out is None:
        out = np.zeros_like(p)
    w_far, w_near, w_center = _W4[:3] / float(dx * dx)
    c = p[2:-2, 2:-2]
    inner = out[2:-2, 2:-2]
    np.multiply(c, 2. * w_center, out=inner)
    inner += w_near * (p[1:-3, 2:-2] + p[3:-1, 2:-2] + p[2:-2, 1:-3] + p[2:-2, 3:-1])
    inner += w_far * (p[:-4, 2:-2] + p[4:, 2:-2] + p[2:-2, :-4] + p[2:-2, 4:])
    return out


class Wavefield(object):
    """Interior pressure snapshots p^n taken every `every` steps.

    Attributes
    ----------
    steps : list of int
        Time indices of the stored snapshots.
    """
    def __init__(self, every=1):
        if every < 1:
            raise ConfigError("snapshot interval must be >= 1, got {0}".format(every))
        self.every = every
        self.steps = []
        self._frames = []

    def record(self, n, field):
        if n % self.every == 0:
            self.steps.append(n)
            self._frames.append(np.array(field))

    @property
    def snapshots(self):
        """(n_snapshots, nz, nx) np.ndarray"""
        return np.array(self._frames)

    def __len__(self):
        return len(self._frames)


def _check_finite(field, step):
    if not np.isfinite(field).all():
        raise NumericalBlowupError(step)


def propagate_shot(model, geom, wavelet, shot_index, wavefield=None, nt=None):
    """Simulate one shot and record its traces.

    Leapfrog update with sponge damping D and m = c^2:

        p^{n+1} = D (2 p^n - D p^{n-1} + dt^2 m (L p^n + s^n))

    where s^n is the wavelet sample (times `geom.source_gain`) at the
    source cell. Receivers sample p^n at their cells, p^0 = 0.

    Parameters
    ----------
    model : PaddedModel
    geom : AcquisitionGeometry
    wavelet : RickerWavelet
        At least `nt` - 1 samples.
    shot_index : int
    wavefield : None or Wavefield, optional
        Receives interior snapshots.
    nt : None or int, optional
        Number of time levels p^0 .. p^{nt-1}; `geom.nt_sim` if None.

    Returns
    -------
    traces : (min(nt, nt_stored), nr) np.ndarray
    """
    nt = geom.nt_sim if nt is None else nt
    if not 0 <= shot_index < geom.ns:
        raise ConfigError("shot index {0} out of range for {1} sources".format(shot_index, geom.ns))
    if len(wavelet.samples) < nt - 1:
        raise ConfigError("wavelet has {0} samples, {1} steps requested".format(len(wavelet.samples), nt - 1))
    n_record = min(nt, geom.nt_stored)

    coef = (geom.dt ** 2) * model.padded_values ** 2
    damping = model.damping
    src_row, src_col = model.cells([geom.source_positions[shot_index]])
    src_row, src_col = int(src_row[0]), int(src_col[0])
    rec_rows, rec_cols = model.cells(geom.receiver_positions)
    source = geom.source_gain * wavelet.samples
    interior = model.interior_slice

    cur = np.zeros(model.shape)
    prev_damped = np.zeros(model.shape)
    lap = np.zeros(model.shape)
    traces = np.zeros((n_record, geom.nr))

    for n in range(nt):
        if n < n_record:
            traces[n] = cur[rec_rows, rec_cols]
        if wavefield is not None:
            wavefield.record(n, cur[interior])
        if n == nt - 1:
            break
        laplacian(cur, model.dx, out=lap)
        lap[src_row, src_col] += source[n]
        nxt = coef * lap
        nxt += 2. * cur
        nxt -= prev_damped
        nxt *= damping
        np.multiply(cur, damping, out=prev_damped)
        cur = nxt
        if (n + 1) % BLOWUP_CHECK_EVERY == 0:
            _check_finite(cur, n + 1)
    _check_finite(cur, nt - 1)
    return traces


def _prepare(vmap, geom, wavelet):
    geom.check_map(vmap)
    check_stability(vmap, geom)
    model = pad_with_sponge(vmap, geom.nbc, geom.sponge_decay)
    wavelet = make_wavelet(geom) if wavelet is None else wavelet
    return model, wavelet


def forward_model(vmap, geom, wavelet=None, n_jobs=1, verbose=False):
    """Simulate every shot of `geom` over `vmap`.

    Parameters
    ----------
    vmap : VelocityMap
    geom : AcquisitionGeometry
    wavelet : None or RickerWavelet, optional
        Defaults to the Ricker wavelet described by `geom`.
    n_jobs : int, optional
        Number of processes shots are spread over.
    verbose : bool, optional

    Returns
    -------
    gather : SeismicGather
        (ns, nt_stored, nr) traces.
    """
    model, wavelet = _prepare(vmap, geom, wavelet)
    with Stopwatch(verbose=False) as timer:
        traces = parallel_map(partial(propagate_shot, model, geom, wavelet),
                              range(geom.ns), n_jobs=n_jobs)
    if verbose:
        print_inline("Simulated " + timer.throughput(geom.ns, 'shots') + "\n")
    return SeismicGather(np.stack(traces), dt=geom.dt)


def first_break(traces, dt, threshold=1e-3):
    """First-arrival time of each trace: the first sample whose
    amplitude exceeds `threshold` times the trace maximum.

    Parameters
    ----------
    traces : (nt, nr) array-like
    dt : float

    Returns
    -------
    times : (nr,) np.ndarray
        In seconds; NaN for all-zero traces.

    Examples
    --------
    >>> first_break([[0., 0.], [0., 1.], [2., 1.]], 0.5)
    array([1. , 0.5])
    """
    traces = np.abs(np.asarray(traces, dtype=np.float64))
    peak = traces.max(axis=0)
    above = traces > threshold * peak[np.newaxis, :]
    times = np.argmax(above, axis=0) * dt
    return np.where(peak > 0., times, np.nan)
