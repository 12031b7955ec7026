import warnings

import numpy as np
import pandas as pd
import scipy.ndimage

from .exceptions import DimensionError
from .grid import VelocityMap, OPENFWI_VRANGE
from .kernels import gauss_2d
from .preprocessing import minmax_normalize


def get_metric(metric_name):
    """
    Examples
    --------
    >>> get_metric('MAE')([[0., 0.]], [[1., 3.]])
    2.0
    """
    for k, v in globals().items():
        if k.lower() == metric_name.lower() and callable(v):
            return v
    raise ValueError("invalid metric name '{0}'".format(metric_name))


def _check_a_b(a, b):
    if isinstance(a, VelocityMap):
        a = a.values
    if isinstance(b, VelocityMap):
        b = b.values
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError("shape mismatch: {0} vs {1}".format(a.shape, b.shape))
    return a, b


def mae(a, b):
    """Mean absolute error.

    Examples
    --------
    >>> mae([[-1.]], [[1.]])
    2.0
    """
    a, b = _check_a_b(a, b)
    return float(np.mean(np.abs(a - b)))

def rmse(a, b):
    """Root mean squared error.

    Examples
    --------
    >>> round(rmse([[0., 0.]], [[1., 3.]]), 7)
    2.236068
    """
    a, b = _check_a_b(a, b)
    return float(np.sqrt(np.mean((a - b) ** 2)))

def ssim(a, b, data_range=2., win_size=11, sigma=1.5, K1=0.01, K2=0.03):
    """Mean structural similarity of two images.

    Local statistics are Gaussian-weighted (window `win_size`,
    std `sigma`) with symmetric extension at the borders; the
    SSIM map is averaged over pixels at least half a window away
    from the image border.

    Parameters
    ----------
    a, b : (H, W) array-like or VelocityMap
        Images normalized to a common range of width `data_range`
        (2 for [-1, 1]-normalized maps).
    data_range : positive float, optional
    win_size : odd int, optional
        Shrinks to the largest odd size not exceeding min(H, W)
        if the image is too small (with a warning).

    Returns
    -------
    ssim : float in [-1, 1]

    Examples
    --------
    >>> x = np.linspace(-1., 1., 400).reshape((20, 20))
    >>> ssim(x, x)
    1.0
    >>> round(ssim(np.full((16, 16), 0.3), np.full((16, 16), 0.4)), 6)
    0.960064
    """
    a, b = _check_a_b(a, b)
    if a.ndim != 2:
        raise DimensionError("ssim expects 2D images, got shape {0}".format(a.shape))
    win = min(win_size, min(a.shape))
    if win % 2 == 0:
        win -= 1
    if win < win_size:
        warnings.warn("image of shape {0} is smaller than the {1}x{1} window; "
                      "using {2}x{2}".format(a.shape, win_size, win))

    window = gauss_2d((win, win), sigma)
    filt = lambda x: scipy.ndimage.correlate(x, window, mode='reflect')

    mu_a = filt(a)
    mu_b = filt(b)
    mu_a_sq = mu_a ** 2
    mu_b_sq = mu_b ** 2
    mu_ab = mu_a * mu_b
    sigma_a_sq = filt(a * a) - mu_a_sq
    sigma_b_sq = filt(b * b) - mu_b_sq
    sigma_ab = filt(a * b) - mu_ab

    c_1 = (K1 * data_range) ** 2
    c_2 = (K2 * data_range) ** 2
    ssim_map = ((2. * mu_ab + c_1) * (2. * sigma_ab + c_2)) / \
               ((mu_a_sq + mu_b_sq + c_1) * (sigma_a_sq + sigma_b_sq + c_2))

    pad = (win - 1) // 2
    H, W = ssim_map.shape
    return float(np.mean(ssim_map[pad:H - pad, pad:W - pad]))


class MetricReport(object):
    """MAE, RMSE and SSIM between a predicted and a true map."""

    def __init__(self, mae, rmse, ssim):
        self.mae = mae
        self.rmse = rmse
        self.ssim = ssim

    def as_dict(self):
        return {'mae': self.mae, 'rmse': self.rmse, 'ssim': self.ssim}

    def __eq__(self, other):
        if not isinstance(other, MetricReport):
            return NotImplemented
        return self.as_dict() == other.as_dict()

    __hash__ = None

    def __repr__(self):
        return "MetricReport(mae={0:.5f}, rmse={1:.5f}, ssim={2:.5f})".format(
            self.mae, self.rmse, self.ssim)


def evaluate_maps(pred, truth, vmin=OPENFWI_VRANGE[0], vmax=OPENFWI_VRANGE[1]):
    """Compare two velocity maps after normalizing both with
    [`vmin`, `vmax`] to [-1, 1].

    Examples
    --------
    >>> truth = VelocityMap(np.full((12, 12), 3000.))
    >>> evaluate_maps(truth, truth)
    MetricReport(mae=0.00000, rmse=0.00000, ssim=1.00000)
    >>> evaluate_maps(np.full((12, 12), 4500.), truth).mae
    1.0
    """
    pred, truth = _check_a_b(pred, truth)
    pred = minmax_normalize(pred, vmin, vmax)
    truth = minmax_normalize(truth, vmin, vmax)
    return MetricReport(mae=mae(pred, truth),
                        rmse=rmse(pred, truth),
                        ssim=ssim(pred, truth, data_range=2.))


def reports_table(reports, index=None):
    """pandas DataFrame with one row per MetricReport and a
    final 'mean' row."""
    df = pd.DataFrame([r.as_dict() for r in reports], columns=['mae', 'rmse', 'ssim'],
                      index=index)
    df.loc['mean'] = df.mean(axis=0)
    return df


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
