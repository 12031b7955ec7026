import numpy as np
import pandas as pd

from ..base import BaseParams
from ..exceptions import ConfigError
from ..grid import OPENFWI_VRANGE
from ..optimizers import get_optimizer
from ..utils import Stopwatch, print_inline
from ._misfit import FILTER_ORDER, MASK_TOP_ROWS, lowpass, mask_gradient, misfit_and_gradient, misfit_value


TRACE_COLUMNS = ('stage', 'cutoff', 'iteration', 'loss', 'rel_change', 'status')


class InversionConfig(BaseParams):
    """Parameters of the multi-scale inversion.

    Parameters
    ----------
    cutoffs : sequence of float
        Low-pass cutoffs in Hz, one stage each, strictly increasing.
    max_iters_per_stage : int
    stop_rel_loss_change : float in (0, 1)
        A stage stops once the relative loss change of an iteration
        drops below it.
    max_step_halvings : int
        Step reductions allowed per line search.
    initial_step : positive float
        First trial step in m/s.
    bounds : (float, float)
        Velocity box in m/s every iterate is projected into.
    optimizer : str
        Name understood by `fwiforge.optimizers.get_optimizer`.
    filter_order : int
        Butterworth order of the low-pass filters.
    mask_top_rows : int
        Number of top rows whose gradient is zeroed.

    Examples
    --------
    >>> InversionConfig().cutoffs
    (1.0, 3.0, 5.0, 10.0, 20.0, 30.0)
    >>> InversionConfig(cutoffs=(5, 3))
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: cutoffs must be strictly increasing, got (5.0, 3.0)
    """
    def __init__(self, cutoffs=(1., 3., 5., 10., 20., 30.), max_iters_per_stage=20,
                 stop_rel_loss_change=1e-3, max_step_halvings=10, initial_step=50.,
                 bounds=OPENFWI_VRANGE, optimizer='NonlinearCG', filter_order=FILTER_ORDER,
                 mask_top_rows=MASK_TOP_ROWS):
        self.cutoffs = tuple(float(c) for c in cutoffs)
        self.max_iters_per_stage = max_iters_per_stage
        self.stop_rel_loss_change = stop_rel_loss_change
        self.max_step_halvings = max_step_halvings
        self.initial_step = initial_step
        self.bounds = tuple(bounds)
        self.optimizer = optimizer
        self.filter_order = filter_order
        self.mask_top_rows = mask_top_rows
        super(InversionConfig, self).__init__()

    def _check_params(self):
        self.cutoffs = tuple(float(c) for c in self.cutoffs)
        self.bounds = tuple(self.bounds)
        if not self.cutoffs:
            raise ConfigError('at least one cutoff is required')
        if any(c <= 0. for c in self.cutoffs):
            raise ConfigError("cutoffs must be positive, got {0}".format(self.cutoffs))
        if any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise ConfigError("cutoffs must be strictly increasing, got {0}".format(self.cutoffs))
        if not 0. < self.stop_rel_loss_change < 1.:
            raise ConfigError("stop_rel_loss_change must lie within (0, 1), got {0}"
                              .format(self.stop_rel_loss_change))
        if self.max_iters_per_stage < 1:
            raise ConfigError("max_iters_per_stage must be >= 1, got {0}".format(self.max_iters_per_stage))
        if self.max_step_halvings < 0:
            raise ConfigError("max_step_halvings must be >= 0, got {0}".format(self.max_step_halvings))
        if self.initial_step <= 0:
            raise ConfigError("initial_step must be positive, got {0}".format(self.initial_step))
        if len(self.bounds) != 2 or not 0. < self.bounds[0] < self.bounds[1]:
            raise ConfigError("bounds must be (vmin, vmax) with 0 < vmin < vmax, got {0}".format(self.bounds))
        if self.filter_order < 1:
            raise ConfigError("filter_order must be >= 1, got {0}".format(self.filter_order))
        if self.mask_top_rows < 0:
            raise ConfigError("mask_top_rows must be >= 0, got {0}".format(self.mask_top_rows))
        try:
            get_optimizer(self.optimizer)
        except ValueError as e:
            raise ConfigError(str(e))

    @property
    def n_stages(self):
        return len(self.cutoffs)


class InversionTrace(object):
    """Per-iteration record of an inversion.

    Every stage contributes one 'start' row (the loss of its starting
    map, `rel_change` NaN) followed by one row per accepted iterate.
    A stage that cannot leave its starting map adds a single
    'stalled' row instead.

    Attributes
    ----------
    records : list of dict
        Rows with keys `TRACE_COLUMNS`.
    stage_maps : list of VelocityMap
        Final map of every stage.
    wall_time : float
        Seconds spent, summed over stages.
    """
    def __init__(self):
        self.records = []
        self.stage_maps = []
        self.wall_time = 0.

    def record(self, stage, cutoff, iteration, loss, rel_change, status):
        self.records.append(dict(stage=stage, cutoff=cutoff, iteration=iteration,
                                 loss=float(loss), rel_change=float(rel_change), status=status))

    def extend(self, other):
        self.records.extend(other.records)
        self.stage_maps.extend(other.stage_maps)
        self.wall_time += other.wall_time
        return self

    @property
    def n_stages(self):
        return len(self.stage_maps)

    def stage_losses(self, stage):
        """Losses of the starting map and accepted iterates of `stage`."""
        return [r['loss'] for r in self.records
                if r['stage'] == stage and r['status'] not in ('stalled', 'line-search-failed')]

    def final_status(self, stage):
        rows = [r for r in self.records if r['stage'] == stage]
        return rows[-1]['status'] if rows else None

    @property
    def stalled_stages(self):
        return [s for s in sorted(set(r['stage'] for r in self.records))
                if self.final_status(s) == 'stalled']

    def to_frame(self):
        """
        Examples
        --------
        >>> trace = InversionTrace()
        >>> trace.record(1, 30., 0, 2., np.nan, 'start')
        >>> trace.record(1, 30., 1, 1., 0.5, 'ok')
        >>> frame = trace.to_frame()
        >>> list(frame.columns)
        ['stage', 'cutoff', 'iteration', 'loss', 'rel_change', 'status']
        >>> frame['loss'].tolist(), frame['status'].tolist()
        ([2.0, 1.0], ['start', 'ok'])
        """
        return pd.DataFrame(self.records, columns=list(TRACE_COLUMNS))

    def to_csv(self, filepath):
        self.to_frame().to_csv(filepath, index=False)

    def __repr__(self):
        return "InversionTrace(n_stages={0}, n_records={1}, wall_time={2:.2f})".format(
            self.n_stages, len(self.records), self.wall_time)


def cg_stage(map0, obs_filtered, cutoff, config, geom, wavelet=None, n_jobs=1,
             stage=1, n_stages=1, verbose=False):
    """Fit `obs_filtered` starting from `map0` with data low-passed
    at `cutoff`.

    Parameters
    ----------
    map0 : VelocityMap
        Starting map within `config.bounds`.
    obs_filtered : SeismicGather
        Observed data already low-passed at `cutoff`.
    cutoff : None or float
        Cutoff in Hz; no filtering of the predicted data if None.
    config : InversionConfig
    geom : AcquisitionGeometry
    wavelet : None or RickerWavelet
    n_jobs : int
        Worker processes over shots.
    stage, n_stages : int
        Position in the multi-scale schedule, used for labels only.
    verbose : bool

    Returns
    -------
    vmap : VelocityMap
        Final map; `map0` itself if the first line search stalls.
    trace : InversionTrace
    """
    vmin, vmax = config.bounds
    if not map0.in_range(vmin, vmax):
        raise ConfigError("initial map range [{0:.1f}, {1:.1f}] leaves the bounds {2}".format(
            map0.values.min(), map0.values.max(), config.bounds))
    shape = map0.shape
    order = config.filter_order

    def fun(x):
        loss, grad = misfit_and_gradient(map0.replace(x.reshape(shape)), geom, wavelet, obs_filtered,
                                         cutoff=cutoff, n_jobs=n_jobs, mask=False, order=order)
        return loss, mask_gradient(grad, config.mask_top_rows).ravel()

    def loss_fun(x):
        return misfit_value(map0.replace(x.reshape(shape)), geom, wavelet, obs_filtered,
                            cutoff=cutoff, n_jobs=n_jobs, order=order)

    trace = InversionTrace()

    def callback(it, loss, rel, status):
        trace.record(stage, cutoff, it, loss, rel, status)

    label = "Stage {0}/{1} ({2} Hz)  ".format(stage, n_stages, cutoff)
    optimizer = get_optimizer(config.optimizer, max_iter=config.max_iters_per_stage,
                              tol=config.stop_rel_loss_change, bounds=config.bounds,
                              initial_step=config.initial_step, max_halvings=config.max_step_halvings,
                              verbose=verbose, label=label)
    with Stopwatch() as timer:
        result = optimizer.minimize(fun, map0.values.ravel(), loss_fun=loss_fun, callback=callback)
    trace.wall_time = timer.elapsed()
    vmap = map0 if result.stalled else map0.replace(result.x.reshape(shape))
    trace.stage_maps.append(vmap)
    if verbose:
        print_inline("{0}done: {1} after {2} iterations, loss {3:.6g} ({4:.1f} sec)\n".format(
            label, result.status, result.n_iter, result.fun, trace.wall_time))
    return vmap, trace


def multiscale_fwi(map0, obs, geom, wavelet=None, config=None, n_jobs=1, verbose=False):
    """Invert `obs` stage by stage with increasing low-pass cutoffs,
    each stage warm-started from the previous one.

    Parameters
    ----------
    map0 : VelocityMap
        Initial map.
    obs : SeismicGather
        Unfiltered observed data.
    geom : AcquisitionGeometry
    wavelet : None or RickerWavelet
        Known source wavelet; the one described by `geom` if None.
    config : None or InversionConfig
    n_jobs : int
    verbose : bool

    Returns
    -------
    vmap : VelocityMap
    trace : InversionTrace
    """
    config = InversionConfig() if config is None else config
    trace = InversionTrace()
    vmap = map0
    for i, cutoff in enumerate(config.cutoffs):
        obs_filtered = lowpass(obs, cutoff, order=config.filter_order)
        vmap, stage_trace = cg_stage(vmap, obs_filtered, cutoff, config, geom, wavelet=wavelet,
                                     n_jobs=n_jobs, stage=i + 1, n_stages=config.n_stages,
                                     verbose=verbose)
        trace.extend(stage_trace)
    if verbose:
        print_inline("Inversion finished in {0:.2f} sec\n".format(trace.wall_time))
    return vmap, trace
