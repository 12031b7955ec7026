from ..base import BaseParams
from ..exceptions import ConfigError
from ..grid import OPENFWI_SHAPE, OPENFWI_VRANGE
from ..utils import RNG, Stopwatch, parallel_map, print_inline, sample_seed
from ._deform import get_transformation
from ._layers import MIN_THICKNESS, draw_count, gen_flat_layers


FAMILIES = ('flatvel', 'curvevel', 'flatfault', 'curvefault')
VERSIONS = ('A', 'B')


def _as_range(value):
    if isinstance(value, (tuple, list)):
        return tuple(value)
    return (value, value)


class GeneratorConfig(BaseParams):
    """Parameters of the layered-map generator.

    Parameters
    ----------
    family : {'flatvel', 'curvevel', 'flatfault', 'curvefault'}
    version : {'A', 'B'}
        'A': velocity increases with depth; 'B': independent
        layer velocities.
    n_layers, n_folds, n_faults : int or (int, int)
        Fixed count or inclusive range drawn per sample. Folds and
        faults default to 0 for families without them.
    nz, nx : int
    dx : positive float
    amp_range : (float, float)
        Fold amplitude range in meters.
    wavenumber_range : (float, float)
        Fold wavenumber range in cycles per map width.
    shift_range : (int, int)
        Fault displacement range in cells (both directions).
    slope_range : (float, float)
        Fault line slope range.
    vmin, vmax : float
        Velocity bounds in m/s.
    first_layer_range, increment_range : (float, float)
        Version A top-layer velocity and per-layer increment ranges.
    seed : int
        Base seed; sample i uses `seed` + i.

    Examples
    --------
    >>> GeneratorConfig(family='curvevel').n_folds
    (1, 2)
    >>> GeneratorConfig(family='flatvel', n_folds=2)
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: family 'flatvel' has no folds, got n_folds=2
    """
    def __init__(self, family='flatvel', version='A', n_layers=(2, 5), n_folds=None, n_faults=None,
                 nz=OPENFWI_SHAPE[0], nx=OPENFWI_SHAPE[1], dx=10.,
                 amp_range=(50., 150.), wavenumber_range=(0.5, 2.), shift_range=(-10, 10),
                 slope_range=(-3., 3.), vmin=OPENFWI_VRANGE[0], vmax=OPENFWI_VRANGE[1],
                 first_layer_range=(1500., 2500.), increment_range=(200., 700.), seed=0):
        self.family = family
        self.version = version
        self.n_layers = n_layers
        if n_folds is None:
            n_folds = (1, 2) if family.startswith('curve') else 0
        if n_faults is None:
            n_faults = (1, 3) if family.endswith('fault') else 0
        self.n_folds = n_folds
        self.n_faults = n_faults
        self.nz = nz
        self.nx = nx
        self.dx = dx
        self.amp_range = tuple(amp_range)
        self.wavenumber_range = tuple(wavenumber_range)
        self.shift_range = tuple(shift_range)
        self.slope_range = tuple(slope_range)
        self.vmin = vmin
        self.vmax = vmax
        self.first_layer_range = tuple(first_layer_range)
        self.increment_range = tuple(increment_range)
        self.seed = seed
        super(GeneratorConfig, self).__init__()

    @property
    def curved(self):
        return self.family.startswith('curve')

    @property
    def faulted(self):
        return self.family.endswith('fault')

    @property
    def name(self):
        return "{0}-{1}".format(self.family, self.version.lower())

    def _check_params(self):
        if self.family not in FAMILIES:
            raise ConfigError("invalid family '{0}'; expected one of {1}".format(self.family, FAMILIES))
        if self.version not in VERSIONS:
            raise ConfigError("invalid version '{0}'; expected 'A' or 'B'".format(self.version))
        if not self.vmin < self.vmax:
            raise ConfigError("vmin ({0}) must be below vmax ({1})".format(self.vmin, self.vmax))
        if self.dx <= 0:
            raise ConfigError("dx must be positive, got {0}".format(self.dx))
        for name in ('n_layers', 'n_folds', 'n_faults', 'amp_range', 'wavenumber_range',
                     'shift_range', 'slope_range', 'first_layer_range', 'increment_range'):
            lo, hi = _as_range(getattr(self, name))
            if lo > hi:
                raise ConfigError("{0}: lower bound {1} exceeds upper bound {2}".format(name, lo, hi))
        lo, hi = _as_range(self.n_layers)
        if lo < 2:
            raise ConfigError("n_layers must be >= 2, got {0}".format(self.n_layers))
        if hi > self.nz // MIN_THICKNESS:
            raise ConfigError("n_layers ({0}) exceeds nz/2 ({1})".format(self.n_layers, self.nz // MIN_THICKNESS))
        if not self.curved and _as_range(self.n_folds) != (0, 0):
            raise ConfigError("family '{0}' has no folds, got n_folds={1}".format(self.family, self.n_folds))
        if not self.faulted and _as_range(self.n_faults) != (0, 0):
            raise ConfigError("family '{0}' has no faults, got n_faults={1}".format(self.family, self.n_faults))
        if min(_as_range(self.n_folds)) < 0 or min(_as_range(self.n_faults)) < 0:
            raise ConfigError('fold and fault counts must be non-negative')
        if self.curved and max(abs(a) for a in self.amp_range) / self.dx > self.nz:
            raise ConfigError("fold amplitudes {0} m exceed the grid height".format(self.amp_range))
        if self.version == 'A' and not (self.vmin <= self.first_layer_range[0]
                                        and self.first_layer_range[1] < self.vmax):
            raise ConfigError("first_layer_range {0} must lie within [vmin, vmax)".format(self.first_layer_range))
        if self.version == 'A' and self.increment_range[0] <= 0:
            raise ConfigError('version A increments must be positive')


PRESETS = {
    'flatvel-a': dict(family='flatvel', version='A'),
    'flatvel-b': dict(family='flatvel', version='B'),
    'curvevel-a': dict(family='curvevel', version='A'),
    'curvevel-b': dict(family='curvevel', version='B', n_folds=(1, 3)),
    'flatfault-a': dict(family='flatfault', version='A'),
    'flatfault-b': dict(family='flatfault', version='B', n_faults=(2, 4), shift_range=(-15, 15)),
    'curvefault-a': dict(family='curvefault', version='A'),
    'curvefault-b': dict(family='curvefault', version='B', n_faults=(2, 4), shift_range=(-15, 15)),
}


def get_preset(preset_name, **overrides):
    """
    Examples
    --------
    >>> get_preset('FlatFault-B', seed=3).n_faults
    (2, 4)
    >>> get_preset('style-a')
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: invalid family 'style-a'; expected one of flatvel-a, flatvel-b, curvevel-a, curvevel-b, flatfault-a, flatfault-b, curvefault-a, curvefault-b
    """
    key = preset_name.lower()
    if key not in PRESETS:
        raise ConfigError("invalid family '{0}'; expected one of {1}".format(preset_name, ', '.join(PRESETS)))
    params = dict(PRESETS[key])
    params.update(overrides)
    return GeneratorConfig(**params)


class VelocityGenerator(object):
    """Draws velocity maps: flat layers, then folds, then faults.

    Sample `index` depends only on (`config`, `index`), so any sample
    can be regenerated alone and batches are identical for any
    number of workers.

    Examples
    --------
    >>> gen = VelocityGenerator(get_preset('curvefault-a', seed=11))
    >>> m = gen.generate(4)
    >>> m.shape, bool(m.in_range())
    ((70, 70), True)
    >>> bool((gen.generate(4).values == m.values).all())
    True
    """
    def __init__(self, config, verbose=False):
        self.config = config
        self.verbose = verbose

    def _transforms(self, rng):
        config = self.config
        n_folds = draw_count(config.n_folds, rng)
        n_faults = draw_count(config.n_faults, rng)
        inner_seeds = rng.randint(2 ** 20, size=n_folds + n_faults)
        folds = [get_transformation('RandomFold', amp_range=config.amp_range,
                                    wavenumber_range=config.wavenumber_range,
                                    random_seed=inner_seeds[i])
                 for i in range(n_folds)]
        faults = [get_transformation('RandomFault', slope_range=config.slope_range,
                                     shift_range=config.shift_range, folded=config.curved,
                                     amp_range=config.amp_range,
                                     wavenumber_range=config.wavenumber_range,
                                     random_seed=inner_seeds[n_folds + i])
                  for i in range(n_faults)]
        return folds, faults

    def generate(self, index):
        rng = RNG(sample_seed(self.config.seed, index))
        base = gen_flat_layers(self.config, rng)
        folds, faults = self._transforms(rng)
        vmap = base
        for fold in folds:
            vmap = fold(vmap)
        for fault in faults:
            vmap = fault(vmap, base=base)
        return vmap

    def generate_batch(self, count, n_jobs=1):
        if count < 1:
            raise ConfigError("count must be >= 1, got {0}".format(count))
        with Stopwatch(verbose=False) as timer:
            maps = parallel_map(self.generate, range(count), n_jobs=n_jobs)
        if self.verbose:
            print_inline("Generated {0}: {1}\n".format(self.config.name, timer.throughput(count, 'maps')))
        return maps


def synthesize_batch(config, count, n_jobs=1, verbose=False):
    """`count` maps drawn with `config`; see `VelocityGenerator`."""
    return VelocityGenerator(config, verbose=verbose).generate_batch(count, n_jobs=n_jobs)
