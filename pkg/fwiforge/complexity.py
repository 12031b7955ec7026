"""Complexity measures of velocity maps: spatial information (mean
Sobel gradient magnitude), gradient sparsity index and Shannon
entropy of the velocity histogram."""
import numpy as np
import pandas as pd
import scipy.ndimage

from .exceptions import ConfigError, DatasetError
from .grid import VelocityMap, OPENFWI_VRANGE


# maps the classic unnormalized Sobel response onto a unit-gradient scale
SI_SCALE = 0.25
GSI_EPS = 1e-3
ENTROPY_BIN_WIDTH = 60.
ENTROPY_TARGET = 2.30


def _values(vmap):
    if isinstance(vmap, VelocityMap):
        return vmap.values
    return np.asarray(vmap, dtype=np.float64)


def _as_maps(maps):
    """List of 2D arrays from maps, a (n, nz, nx) or a (n, 1, nz, nx) array."""
    if isinstance(maps, VelocityMap):
        maps = [maps]
    elif isinstance(maps, np.ndarray):
        if maps.ndim == 4 and maps.shape[1] == 1:
            maps = maps[:, 0]
        if maps.ndim == 2:
            maps = maps[np.newaxis]
        if maps.ndim != 3:
            raise ConfigError("expected a batch of 2D maps, got shape {0}".format(maps.shape))
    maps = [_values(m) for m in maps]
    if not maps:
        raise DatasetError('empty batch of maps')
    return maps


def normalize_unit(vmap, vrange=OPENFWI_VRANGE):
    """Rescale velocities to [0, 1].

    Parameters
    ----------
    vmap : VelocityMap or 2D array-like
    vrange : None or (float, float)
        Fixed (vmin, vmax); if None, the map's own extremes
        (a constant map becomes all zeros).

    Examples
    --------
    >>> normalize_unit([[1500., 3000., 4500.]])
    array([[0. , 0.5, 1. ]])
    >>> normalize_unit([[2., 4.]], vrange=None)
    array([[0., 1.]])
    """
    values = _values(vmap)
    if vrange is None:
        lo, hi = values.min(), values.max()
        if hi == lo:
            return np.zeros_like(values)
    else:
        lo, hi = vrange
        if not hi > lo:
            raise ConfigError("invalid range: hi ({0}) must exceed lo ({1})".format(hi, lo))
    return (values - lo) / float(hi - lo)


def sobel_gradients(field):
    """Horizontal and vertical Sobel responses with replicated borders.

    Returns
    -------
    Gx, Gy : np.ndarray
        Derivative along columns (x) and rows (z), each of the shape
        of `field`.

    Examples
    --------
    >>> step = np.zeros((4, 4))
    >>> step[:, 2:] = 1.
    >>> Gx, Gy = sobel_gradients(step)
    >>> Gx[0]
    array([0., 4., 4., 0.])
    >>> bool(np.all(Gy == 0.))
    True
    """
    field = _values(field)
    Gx = scipy.ndimage.sobel(field, axis=1, mode='nearest')
    Gy = scipy.ndimage.sobel(field, axis=0, mode='nearest')
    return Gx, Gy


def gradient_magnitude(field):
    Gx, Gy = sobel_gradients(field)
    return np.hypot(Gx, Gy)


def spatial_information(vmap, vrange=OPENFWI_VRANGE, scale=SI_SCALE):
    """Mean Sobel gradient magnitude of the [0, 1]-normalized map,
    times `scale`.

    Examples
    --------
    >>> spatial_information(np.full((5, 5), 2000.))
    0.0
    >>> step = np.full((4, 4), 1500.)
    >>> step[:, 2:] = 4500.
    >>> spatial_information(step, scale=1.)
    2.0
    """
    return float(np.mean(gradient_magnitude(normalize_unit(vmap, vrange)))) * scale


def gradient_sparsity_index(vmap, eps=GSI_EPS, vrange=OPENFWI_VRANGE):
    """Fraction of pixels whose normalized Sobel gradient magnitude
    exceeds `eps`.

    Examples
    --------
    >>> step = np.full((4, 4), 1500.)
    >>> step[:, 2:] = 4500.
    >>> gradient_sparsity_index(step)
    0.5
    """
    if eps < 0:
        raise ConfigError("eps must be non-negative, got {0}".format(eps))
    G = gradient_magnitude(normalize_unit(vmap, vrange))
    return np.count_nonzero(G > eps) / float(G.size)


def shannon_entropy(vmap, bin_width=ENTROPY_BIN_WIDTH, vmin=OPENFWI_VRANGE[0], vmax=OPENFWI_VRANGE[1]):
    """Entropy in bits of the velocity histogram.

    Velocities are clipped to [`vmin`, `vmax`] and counted in bins of
    `bin_width` m/s starting at `vmin`. With `bin_width` None every
    distinct velocity is its own bin.

    Examples
    --------
    >>> half = np.full((2, 4), 1500.)
    >>> half[1] = 4500.
    >>> shannon_entropy(half)
    1.0
    >>> shannon_entropy(np.full((3, 3), 2000.))
    0.0
    >>> shannon_entropy([[1500., 1501.]], bin_width=None)
    1.0
    """
    values = _values(vmap).ravel()
    if bin_width is None:
        _, counts = np.unique(values, return_counts=True)
    else:
        if bin_width <= 0:
            raise ConfigError("bin_width must be positive, got {0}".format(bin_width))
        n_bins = max(1, int(np.ceil((vmax - vmin) / float(bin_width))))
        edges = vmin + bin_width * np.arange(n_bins + 1)
        counts, _ = np.histogram(np.clip(values, vmin, vmax), bins=edges)
    p = counts[counts > 0] / float(values.size)
    return 0. - float(np.sum(p * np.log2(p)))


class ComplexityReport(object):
    """Batch means of the complexity measures.

    Attributes
    ----------
    si_mean : float
    gsi : float
    entropy : float
        In bits.
    n_maps : int
    """
    def __init__(self, si_mean, gsi, entropy, n_maps=1):
        self.si_mean = si_mean
        self.gsi = gsi
        self.entropy = entropy
        self.n_maps = n_maps

    def as_dict(self):
        return {'si': self.si_mean, 'gsi': self.gsi, 'entropy': self.entropy}

    def to_text(self):
        """
        Examples
        --------
        >>> print(ComplexityReport(0.07, 0.12, 2.3, n_maps=100).to_text())
        n_maps   100
        si       0.070000
        gsi      0.120000
        entropy  2.300000
        """
        lines = ["{0:<8} {1}".format('n_maps', self.n_maps)]
        lines += ["{0:<8} {1:.6f}".format(k, self.as_dict()[k]) for k in ('si', 'gsi', 'entropy')]
        return '\n'.join(lines)

    def __repr__(self):
        return "ComplexityReport(si_mean={0:.4f}, gsi={1:.4f}, entropy={2:.4f}, n_maps={3})".format(
            self.si_mean, self.gsi, self.entropy, self.n_maps)


def complexity_table(maps, map_ids=None, vrange=OPENFWI_VRANGE, eps=GSI_EPS, bin_width=ENTROPY_BIN_WIDTH):
    """pandas DataFrame with columns map_id, si, gsi, entropy, one row
    per map."""
    maps = _as_maps(maps)
    if map_ids is None:
        map_ids = range(len(maps))
    rows = []
    for map_id, values in zip(map_ids, maps):
        rows.append({'map_id': map_id,
                     'si': spatial_information(values, vrange),
                     'gsi': gradient_sparsity_index(values, eps, vrange),
                     'entropy': shannon_entropy(values, bin_width, *(vrange or OPENFWI_VRANGE))})
    return pd.DataFrame(rows, columns=['map_id', 'si', 'gsi', 'entropy'])


def complexity_report(maps, vrange=OPENFWI_VRANGE, eps=GSI_EPS, bin_width=ENTROPY_BIN_WIDTH):
    """Average SI, GSI and entropy over a batch of maps.

    Examples
    --------
    >>> complexity_report([np.full((4, 4), 3000.)] * 3)
    ComplexityReport(si_mean=0.0000, gsi=0.0000, entropy=0.0000, n_maps=3)
    """
    df = complexity_table(maps, vrange=vrange, eps=eps, bin_width=bin_width)
    return ComplexityReport(si_mean=float(df['si'].mean()), gsi=float(df['gsi'].mean()),
                            entropy=float(df['entropy'].mean()), n_maps=len(df))


def calibrate_bin_width(maps, target=ENTROPY_TARGET, widths=None, vrange=OPENFWI_VRANGE):
    """Histogram bin width whose batch-mean entropy is closest to `target`.

    Returns
    -------
    best_width : float
    sweep : pandas.DataFrame
        Columns bin_width, entropy, error.
    """
    maps = _as_maps(maps)
    if widths is None:
        widths = [10., 20., 30., 60., 100., 150., 300., 500.]
    rows = []
    for width in widths:
        entropy = float(np.mean([shannon_entropy(m, width, *vrange) for m in maps]))
        rows.append({'bin_width': float(width), 'entropy': entropy, 'error': abs(entropy - target)})
    sweep = pd.DataFrame(rows, columns=['bin_width', 'entropy', 'error'])
    best_width = float(sweep.loc[sweep['error'].idxmin(), 'bin_width'])
    return best_width, sweep


def ordering_report(reports):
    """Compare families metric by metric.

    Parameters
    ----------
    reports : dict
        Family name -> ComplexityReport.

    Returns
    -------
    df : pandas.DataFrame
        One row per family with the metric means and, per metric, the
        family's rank (1 = least complex).
    """
    if not reports:
        raise DatasetError('no reports to compare')
    df = pd.DataFrame({name: r.as_dict() for name, r in reports.items()}).T
    df = df[['si', 'gsi', 'entropy']].astype(float)
    for metric in ('si', 'gsi', 'entropy'):
        df[metric + '_rank'] = df[metric].rank(method='min').astype(int)
    df.index.name = 'family'
    return df


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
