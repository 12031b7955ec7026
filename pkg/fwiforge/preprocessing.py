import numpy as np

from .exceptions import ConfigError
from .grid import OPENFWI_VRANGE


VELOCITY_RANGE = OPENFWI_VRANGE
SEISMIC_RANGE = (-20., 60.)


def _check_range(lo, hi):
    if not hi > lo:
        raise ConfigError("invalid range: hi ({0}) must exceed lo ({1})".format(hi, lo))


def minmax_normalize(field, lo, hi):
    """Affinely map [`lo`, `hi`] onto [-1, 1].

    Examples
    --------
    >>> minmax_normalize([[1500., 4500.]], 1500, 4500)
    array([[-1.,  1.]])
    >>> minmax_normalize([[20.]], -20, 60)
    array([[0.]])
    >>> minmax_normalize([[1.]], 2, 2)
    Traceback (most recent call last):
        ...
    fwiforge.exceptions.ConfigError: invalid range: hi (2) must exceed lo (2)
    """
    _check_range(lo, hi)
    field = np.asarray(field, dtype=np.float64)
    return 2. * (field - lo) / (hi - lo) - 1.


def denormalize(field, lo, hi):
    """Inverse of `minmax_normalize`.

    Examples
    --------
    >>> denormalize([[-1., 0., 1.]], 1500, 4500)
    array([[1500., 3000., 4500.]])
    """
    _check_range(lo, hi)
    field = np.asarray(field, dtype=np.float64)
    return (field + 1.) * 0.5 * (hi - lo) + lo


class MinMaxScaler(object):
    """
    Rescale data to [-1, 1] using a fixed or learned range.

    Parameters
    ----------
    lo, hi : None or float, optional
        Range mapped onto [-1, 1]. If None, it is learned
        by `fit` as the global minimum (maximum) of the data.
    copy : bool, optional
        If False, do inplace scaling of float64 arrays.

    Attributes
    ----------
    lo_, hi_ : float
        Range in use after `fit`.

    Examples
    --------
    >>> X = np.array([[1500., 2250.], [3000., 4500.]])
    >>> mms = MinMaxScaler(*VELOCITY_RANGE).fit(X)
    >>> mms.transform(X)
    array([[-1. , -0.5],
           [ 0. ,  1. ]])
    >>> mms = MinMaxScaler().fit([[0., 5.], [10., 2.]])
    >>> mms.lo_, mms.hi_
    (0.0, 10.0)
    >>> mms.inverse_transform(mms.transform([[0., 5.]]))
    array([[0., 5.]])
    """
    def __init__(self, lo=None, hi=None, copy=True):
        self.lo = lo
        self.hi = hi
        self.copy = copy
        self.lo_ = None
        self.hi_ = None
        self._called_fit = False

    def _check_X(self, X):
        if self.copy or not isinstance(X, np.ndarray) or X.dtype != np.float64:
            return np.array(X, dtype=np.float64)
        return X

    def fit(self, X):
        _X = self._check_X(X)
        self.lo_ = float(_X.min()) if self.lo is None else float(self.lo)
        self.hi_ = float(_X.max()) if self.hi is None else float(self.hi)
        _check_range(self.lo_, self.hi_)
        self._called_fit = True
        return self

    def transform(self, X):
        if not self._called_fit:
            raise ValueError('`fit` must be called before calling `transform`')
        X_new = self._check_X(X)
        X_new -= self.lo_
        X_new *= 2. / (self.hi_ - self.lo_)
        X_new -= 1.
        return X_new

    def inverse_transform(self, X):
        if not self._called_fit:
            raise ValueError('`fit` must be called before calling `inverse_transform`')
        X_new = self._check_X(X)
        X_new += 1.
        X_new *= 0.5 * (self.hi_ - self.lo_)
        X_new += self.lo_
        return X_new

    def fit_transform(self, X):
        self.fit(X)
        return self.transform(X)


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
