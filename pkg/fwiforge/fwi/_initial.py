import numpy as np
import scipy.ndimage

from ..exceptions import ConfigError
from ..grid import VelocityMap


def get_initial_map(name, truth, **params):
    """Build a starting map with one of the initial-map recipes.

    Examples
    --------
    >>> truth = VelocityMap([[1600., 1500.], [3000., 3000.]])
    >>> get_initial_map('homogeneous', truth).values
    array([[1500., 1500.],
           [1500., 1500.]])
    >>> get_initial_map('bogus', truth)
    Traceback (most recent call last):
        ...
    ValueError: invalid initial map name 'bogus'
    """
    builders = {
        'homogeneous': lambda: initial_homogeneous(truth, **params),
        'linear': lambda: initial_linear(nz=truth.nz, nx=truth.nx, dx=truth.dx, **params),
        'smoothed': lambda: initial_smoothed(truth, **params),
    }
    if name.lower() not in builders:
        raise ValueError("invalid initial map name '{0}'".format(name))
    return builders[name.lower()]()


def initial_homogeneous(reference, nz=None, nx=None, dx=10.):
    """Constant map at the minimum velocity of the top row.

    Parameters
    ----------
    reference : VelocityMap or float
        Map whose top row gives the velocity, or the velocity itself
        (then `nz` and `nx` are required).
    nz, nx : None or int
        Shape, taken from `reference` if it is a map.
    dx : float
        Grid spacing, taken from `reference` if it is a map.
    """
    if isinstance(reference, VelocityMap):
        velocity = reference.values[0].min()
        nz = reference.nz if nz is None else nz
        nx = reference.nx if nx is None else nx
        dx = reference.dx
    else:
        velocity = float(reference)
        if nz is None or nx is None:
            raise ConfigError('nz and nx are required for a scalar reference velocity')
    return VelocityMap(np.full((nz, nx), velocity), dx=dx)


def initial_linear(vtop=1500., vbottom=4500., nz=70, nx=70, dx=10.):
    """Map increasing linearly with depth from `vtop` (row 0) to
    `vbottom` (last row).

    Examples
    --------
    >>> initial_linear(1500., 4500., nz=4, nx=2).values[:, 0]
    array([1500., 2500., 3500., 4500.])
    """
    if vbottom < vtop:
        raise ConfigError("vbottom ({0}) must not be below vtop ({1})".format(vbottom, vtop))
    if nz < 2:
        raise ConfigError("nz must be >= 2, got {0}".format(nz))
    column = vtop + (vbottom - vtop) * np.arange(nz) / float(nz - 1)
    return VelocityMap(np.tile(column[:, np.newaxis], (1, nx)), dx=dx)


def initial_smoothed(truth, kernel=9):
    """Box mean filter of `truth` with `kernel` x `kernel` window,
    borders replicated.

    Examples
    --------
    >>> delta = np.full((5, 5), 1500.)
    >>> delta[2, 2] = 2400.
    >>> smoothed = initial_smoothed(VelocityMap(delta), kernel=3).values
    >>> bool(np.allclose(smoothed[1:4, 1:4], 1600.)), bool(np.allclose(smoothed[0], 1500.))
    (True, True)
    """
    if kernel < 3 or kernel % 2 == 0:
        raise ConfigError("kernel must be an odd integer >= 3, got {0}".format(kernel))
    smoothed = scipy.ndimage.uniform_filter(truth.values, size=kernel, mode='nearest')
    # keep round-off inside the range of the truth
    smoothed = np.clip(smoothed, truth.values.min(), truth.values.max())
    return truth.replace(smoothed)
