import numpy as np

from ..exceptions import ConfigError, DimensionError
from ..utils import RNG


def get_transformation(transformation_name, **params):
    for k, v in globals().items():
        if k.lower() == transformation_name.lower() and isinstance(v, type) \
                and issubclass(v, RandomTransformation):
            return v(**params)
    raise ValueError("invalid transformation name '{0}'".format(transformation_name))


def fold_shift(nx, dx, a, k):
    """Vertical displacement in cells of every column for a
    sinusoidal fold of amplitude `a` meters and `k` cycles per width.

    Examples
    --------
    >>> fold_shift(4, 10., 20., 1.)
    array([ 0,  2,  0, -2])
    """
    x = np.arange(nx)
    return np.round(a * np.sin(2. * np.pi * k * x / nx) / dx).astype(int)


def apply_fold(vmap, a, k):
    """Shear `vmap` vertically along a sinusoid:
    out(x, y) = in(x, y + shift(x)), rows outside the grid take the
    nearest row.

    Examples
    --------
    >>> from fwiforge.grid import VelocityMap
    >>> m = VelocityMap([[1500.] * 4, [1500.] * 4, [3000.] * 4, [3000.] * 4])
    >>> apply_fold(m, 10., 1.).values[:, 1]
    array([1500., 3000., 3000., 3000.])
    >>> np.array_equal(apply_fold(m, 0., 1.).values, m.values)
    True
    """
    if abs(a) / vmap.dx > vmap.nz:
        raise ConfigError("fold amplitude {0} m exceeds the grid height ({1} cells of {2} m)"
                          .format(a, vmap.nz, vmap.dx))
    shift = fold_shift(vmap.nx, vmap.dx, a, k)
    rows = np.clip(np.arange(vmap.nz)[:, np.newaxis] + shift[np.newaxis, :], 0, vmap.nz - 1)
    return vmap.replace(np.take_along_axis(vmap.values, rows, axis=0))


class FaultLine(object):
    """Line y = `slope` * x + `intercept` (in cells) splitting the grid;
    cells with y >= f(x) are displaced by `shift` = (s, s').

    Examples
    --------
    >>> FaultLine(1., 0.).mask(3, 3).astype(int)
    array([[1, 0, 0],
           [1, 1, 0],
           [1, 1, 1]])
    """
    def __init__(self, slope=0., intercept=0., shift=(0, 0)):
        self.slope = float(slope)
        self.intercept = float(intercept)
        self.shift = (int(shift[0]), int(shift[1]))

    def __call__(self, x):
        return self.slope * x + self.intercept

    def mask(self, nz, nx):
        y, x = np.mgrid[0:nz, 0:nx]
        return y >= self(x)

    def __repr__(self):
        return "FaultLine(slope={0}, intercept={1}, shift={2})".format(
            self.slope, self.intercept, self.shift)


def apply_fault(vmap, base, fault, a=0., k=0.):
    """Replace the part of `vmap` below `fault` with `base` displaced
    by the fault shift (and folded by `a`, `k`).

    Cells with y >= f(x) take base(x + s, y + fold(x) + s'), clamped to
    the grid; all other cells keep `vmap`.
    """
    if vmap.shape != base.shape:
        raise DimensionError("map and base shapes differ: {0} vs {1}".format(vmap.shape, base.shape))
    nz, nx = vmap.shape
    s, s_prime = fault.shift
    y, x = np.mgrid[0:nz, 0:nx]
    shift = fold_shift(nx, vmap.dx, a, k)
    src_x = np.clip(x + s, 0, nx - 1)
    src_y = np.clip(y + shift[x] + s_prime, 0, nz - 1)
    values = np.where(fault.mask(nz, nx), base.values[src_y, src_x], vmap.values)
    return vmap.replace(values)


class RandomTransformation(object):
    def __init__(self, random_seed=None):
        self.random_seed = random_seed
        self.rng = RNG(self.random_seed)

    def __call__(self, vmap, **kwargs):
        self.rng = RNG(self.random_seed)
        return self._call(vmap, **kwargs)

    def _call(self, vmap, **kwargs):
        raise NotImplementedError()


class RandomFold(RandomTransformation):
    def __init__(self, amp_range=(50., 150.), wavenumber_range=(0.5, 2.), random_seed=None):
        self.amp_range = amp_range
        self.wavenumber_range = wavenumber_range
        super(RandomFold, self).__init__(random_seed=random_seed)

    def _call(self, vmap):
        a = self.rng.uniform(*self.amp_range)
        k = self.rng.uniform(*self.wavenumber_range)
        return apply_fold(vmap, a, k)


class RandomFault(RandomTransformation):
    """Fault through a random point of the middle half of the grid.

    With `folded` set, the displaced block is also folded by a fresh
    sinusoid drawn from `amp_range` and `wavenumber_range`.
    """
    def __init__(self, slope_range=(-3., 3.), shift_range=(-10, 10), folded=False,
                 amp_range=(50., 150.), wavenumber_range=(0.5, 2.), random_seed=None):
        self.slope_range = slope_range
        self.shift_range = shift_range
        self.folded = folded
        self.amp_range = amp_range
        self.wavenumber_range = wavenumber_range
        super(RandomFault, self).__init__(random_seed=random_seed)

    def draw_line(self, nz, nx):
        x0 = self.rng.randint(nx // 4, max(nx // 4 + 1, 3 * nx // 4))
        y0 = self.rng.randint(nz // 4, max(nz // 4 + 1, 3 * nz // 4))
        slope = self.rng.uniform(*self.slope_range)
        lo, hi = self.shift_range
        shift = (self.rng.randint(lo, hi + 1), self.rng.randint(lo, hi + 1))
        return FaultLine(slope=slope, intercept=y0 - slope * x0, shift=shift)

    def _call(self, vmap, base=None):
        base = vmap if base is None else base
        fault = self.draw_line(*vmap.shape)
        a, k = 0., 0.
        if self.folded:
            a = self.rng.uniform(*self.amp_range)
            k = self.rng.uniform(*self.wavenumber_range)
        return apply_fault(vmap, base, fault, a=a, k=k)
