import numpy as np

from ..exceptions import ConfigError
from ..grid import VelocityMap
from ..utils import RNG


MIN_THICKNESS = 2


def draw_count(value, rng):
    """Return `value` if it is an int, else a uniform draw from the
    inclusive range (lo, hi)."""
    if isinstance(value, (tuple, list)):
        lo, hi = value
        return int(rng.randint(lo, hi + 1))
    return int(value)


def layer_thicknesses(nz, n_layers, rng, min_thickness=MIN_THICKNESS):
    """Random partition of `nz` rows into `n_layers` contiguous bands,
    each at least `min_thickness` rows thick.

    Every composition of the spare rows is equally likely
    (stars and bars).

    Examples
    --------
    >>> t = layer_thicknesses(70, 5, RNG(1))
    >>> int(t.sum()), bool(t.min() >= 2), len(t)
    (70, True, 5)
    >>> layer_thicknesses(4, 3, RNG(1))
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: 3 layers of >= 2 cells do not fit into nz=4
    """
    if n_layers < 1:
        raise ConfigError("n_layers must be positive, got {0}".format(n_layers))
    spare = nz - n_layers * min_thickness
    if spare < 0:
        raise ConfigError("{0} layers of >= {1} cells do not fit into nz={2}"
                          .format(n_layers, min_thickness, nz))
    n_slots = spare + n_layers - 1
    bars = np.sort(rng.choice(n_slots, size=n_layers - 1, replace=False)) if n_layers > 1 \
        else np.array([], dtype=int)
    edges = np.concatenate(([-1], bars, [n_slots]))
    return np.diff(edges) - 1 + min_thickness


def layer_velocities(n_layers, rng, version='A', vmin=1500., vmax=4500.,
                     first_layer_range=(1500., 2500.), increment_range=(200., 700.)):
    """Velocity of each layer, top to bottom.

    Version A draws the first layer from `first_layer_range` and adds
    increments from `increment_range`. A stack that fits under `vmax`
    keeps its drawn increments. Otherwise every increment is shrunk by
    the factor that puts the deepest layer exactly at `vmax`, so the
    increments of a deep stack may fall below `increment_range[0]`
    while the velocities stay strictly increasing. Version B draws
    every layer independently from [`vmin`, `vmax`].

    Examples
    --------
    >>> v = layer_velocities(5, RNG(3))
    >>> bool(np.all(np.diff(v) > 0) and v[0] >= 1500. and v[-1] <= 4500.)
    True
    >>> v = layer_velocities(10, RNG(3), increment_range=(400., 700.))
    >>> bool(np.all(np.diff(v) > 0)), float(v[-1]), bool(np.diff(v).min() < 400.)
    (True, 4500.0, True)
    """
    if version == 'B':
        return rng.uniform(vmin, vmax, size=n_layers)
    v1 = rng.uniform(*first_layer_range)
    increments = rng.uniform(increment_range[0], increment_range[1], size=n_layers - 1)
    velocities = v1 + np.concatenate(([0.], np.cumsum(increments)))
    if velocities[-1] > vmax:
        velocities = v1 + (velocities - v1) * ((vmax - v1) / (velocities[-1] - v1))
        velocities[-1] = vmax
    return velocities


def gen_flat_layers(config, rng=None):
    """Horizontally constant map of randomly thick layers.

    Parameters
    ----------
    config : GeneratorConfig
    rng : None or RNG, optional
        Random source; a fresh RNG(`config.seed`) if None.

    Returns
    -------
    vmap : VelocityMap
        With `n_layers` set.

    Examples
    --------
    >>> from fwiforge.synth import GeneratorConfig
    >>> m = gen_flat_layers(GeneratorConfig(n_layers=2, nz=4, nx=3, seed=7))
    >>> m.n_layers, m.shape
    (2, (4, 3))
    >>> bool(np.all(m.values == m.values[:, :1]))
    True
    """
    rng = rng if rng is not None else RNG(config.seed)
    n_layers = draw_count(config.n_layers, rng)
    if n_layers < 2:
        raise ConfigError("n_layers must be >= 2, got {0}".format(n_layers))
    if n_layers > config.nz // MIN_THICKNESS:
        raise ConfigError("n_layers ({0}) exceeds nz/2 ({1})".format(n_layers, config.nz // MIN_THICKNESS))
    thicknesses = layer_thicknesses(config.nz, n_layers, rng)
    velocities = layer_velocities(n_layers, rng, version=config.version,
                                  vmin=config.vmin, vmax=config.vmax,
                                  first_layer_range=config.first_layer_range,
                                  increment_range=config.increment_range)
    column = np.repeat(velocities, thicknesses)
    values = np.tile(column[:, np.newaxis], (1, config.nx))
    return VelocityMap(values, dx=config.dx, n_layers=n_layers)
