"""Convolution kernels and stencil weights."""
import numpy as np

from .exceptions import ConfigError


def get_kernel(kernel_name, **kernel_params):
    """
    Examples
    --------
    >>> get_kernel('gauss_2d', shape=(3, 3), sigma=1.).shape
    (3, 3)
    >>> get_kernel('sharpen')
    Traceback (most recent call last):
        ...
    ValueError: invalid kernel name 'sharpen'
    """
    for k, v in globals().items():
        if k.lower() == kernel_name.lower() and callable(v) and k != 'get_kernel':
            return v(**kernel_params)
    raise ValueError("invalid kernel name '{0}'".format(kernel_name))


def laplacian_weights(order=4):
    """Central finite-difference weights of the second derivative
    on a unit grid, from the farthest left neighbour to the
    farthest right one.

    Examples
    --------
    >>> laplacian_weights(2)
    array([ 1., -2.,  1.])
    >>> np.allclose(laplacian_weights(4) * 12, [-1, 16, -30, 16, -1])
    True
    """
    if order == 2:
        return np.array([1., -2., 1.])
    if order == 4:
        return np.array([-1. / 12., 4. / 3., -5. / 2., 4. / 3., -1. / 12.])
    raise ConfigError("unsupported stencil order {0}; expected 2 or 4".format(order))


def gauss_2d(shape=(11, 11), sigma=1.5):
    """Normalized 2D Gaussian window; matches MATLAB's
    fspecial('gaussian', shape, sigma).

    Examples
    --------
    >>> w = gauss_2d((11, 11), 1.5)
    >>> w.shape, float(np.round(w.sum(), 12))
    ((11, 11), 1.0)
    >>> bool(np.allclose(w, w.T) and w.argmax() == 60)
    True
    """
    m, n = [(ss - 1.) / 2. for ss in shape]
    y, x = np.ogrid[-m:m + 1, -n:n + 1]
    h = np.exp(-(x * x + y * y) / (2. * sigma * sigma))
    h[h < np.finfo(h.dtype).eps * h.max()] = 0
    sumh = h.sum()
    if sumh != 0:
        h /= sumh
    return h


def sobel_kernel(axis=1):
    """3x3 Sobel kernel (for correlation) differentiating along `axis`.

    Examples
    --------
    >>> sobel_kernel(axis=1)
    array([[-1.,  0.,  1.],
           [-2.,  0.,  2.],
           [-1.,  0.,  1.]])
    >>> np.array_equal(sobel_kernel(axis=0), sobel_kernel(axis=1).T)
    True
    """
    derivative = np.array([-1., 0., 1.])
    smoothing = np.array([1., 2., 1.])
    if axis == 1:
        return np.outer(smoothing, derivative)
    if axis == 0:
        return np.outer(derivative, smoothing)
    raise ConfigError("axis must be 0 or 1, got {0}".format(axis))


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
