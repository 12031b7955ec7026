from functools import lru_cache, partial

import numpy as np
import scipy.signal

from ..exceptions import ConfigError, DimensionError
from ..grid import SeismicGather
from ..utils import parallel_map
from ..wave import Wavefield, laplacian, propagate_shot
from ..wave._propagator import _prepare


FILTER_ORDER = 4
MASK_TOP_ROWS = 2


def butter_lowpass(cutoff, dt, order=FILTER_ORDER):
    """Second-order sections of a Butterworth low-pass filter.

    Raises
    ------
    ConfigError
        If `cutoff` is not within (0, Nyquist).
    """
    nyquist = 0.5 / dt
    if not 0. < cutoff < nyquist:
        raise ConfigError("cutoff {0} Hz must lie within (0, {1}) Hz (Nyquist for dt={2})"
                          .format(cutoff, nyquist, dt))
    return scipy.signal.butter(order, cutoff, btype='low', fs=1. / dt, output='sos')


@lru_cache(maxsize=16)
def lowpass_matrix(cutoff, dt, nt, order=FILTER_ORDER):
    """(nt, nt) matrix F of the zero-phase low-pass filter, so that
    F.dot(x) filters a length-`nt` series `x` forward and backward.

    Examples
    --------
    >>> F = lowpass_matrix(5., 0.001, 200)
    >>> x = np.random.RandomState(0).randn(200)
    >>> sos = butter_lowpass(5., 0.001)
    >>> bool(np.allclose(F.dot(x), scipy.signal.sosfiltfilt(sos, x)))
    True
    """
    sos = butter_lowpass(cutoff, dt, order)
    F = scipy.signal.sosfiltfilt(sos, np.eye(nt), axis=0)
    F.flags.writeable = False
    return F


def _traces(gather):
    if isinstance(gather, SeismicGather):
        return gather.traces
    return np.asarray(gather, dtype=np.float64)


def lowpass(gather, cutoff, order=FILTER_ORDER):
    """Zero-phase low-pass filter every trace of `gather`.

    Examples
    --------
    >>> t = np.arange(1000) * 0.001
    >>> g = SeismicGather(np.sin(2 * np.pi * 100. * t)[np.newaxis, :, np.newaxis])
    >>> bool(np.abs(lowpass(g, 3.).traces).max() < 0.01)
    True
    """
    F = lowpass_matrix(float(cutoff), gather.dt, gather.nt_stored, order)
    return gather.replace(np.stack([F.dot(shot) for shot in gather.traces]))


def misfit_l2(pred, obs):
    """Half the sum of squared differences.

    Examples
    --------
    >>> misfit_l2(np.ones((1, 3, 2)), np.zeros((1, 3, 2)))
    3.0
    """
    pred, obs = _traces(pred), _traces(obs)
    if pred.shape != obs.shape:
        raise DimensionError("shape mismatch: {0} vs {1}".format(pred.shape, obs.shape))
    return 0.5 * float(np.sum((pred - obs) ** 2))


def _check_obs(obs_filtered, geom):
    obs = _traces(obs_filtered)
    expected = (geom.ns, geom.nt_stored, geom.nr)
    if obs.shape != expected:
        raise DimensionError("observed data shape {0} does not match the geometry {1}".format(obs.shape, expected))
    return obs


def _filter_matrix(cutoff, geom, order=FILTER_ORDER):
    if cutoff is None:
        return None
    return lowpass_matrix(float(cutoff), geom.dt, geom.nt_stored, order)


def _shot_loss(model, geom, wavelet, F, obs, shot_index):
    traces = propagate_shot(model, geom, wavelet, shot_index, nt=geom.nt_stored)
    if F is not None:
        traces = F.dot(traces)
    return 0.5 * float(np.sum((traces - obs[shot_index]) ** 2))


def _shot_loss_and_gradient(model, geom, wavelet, F, obs, shot_index):
    nt = geom.nt_stored
    wavefield = Wavefield(every=1)
    traces = propagate_shot(model, geom, wavelet, shot_index, wavefield=wavefield, nt=nt)
    pred = F.dot(traces) if F is not None else traces
    residual = pred - obs[shot_index]
    loss = 0.5 * float(np.sum(residual ** 2))
    adjoint_source = F.T.dot(residual) if F is not None else residual

    p = wavefield.snapshots
    coef = (geom.dt ** 2) * model.padded_values ** 2
    damping = model.damping
    damping_sq = damping ** 2
    rec_rows, rec_cols = model.cells(geom.receiver_positions)
    interior = model.interior_slice

    # adjoint of the damped leapfrog, run backwards from the last sample
    mu_next = np.zeros(model.shape)
    mu_next2 = np.zeros(model.shape)
    grad = np.zeros(model.interior.shape)
    for k in range(nt - 1, 0, -1):
        nu = damping * mu_next
        mu = laplacian(coef * nu, model.dx)
        mu += 2. * nu
        mu -= damping_sq * mu_next2
        np.add.at(mu, (rec_rows, rec_cols), adjoint_source[k])
        d2p = p[k] - 2. * p[k - 1]
        if k >= 2:
            d2p += p[k - 2]
        grad += mu[interior] * d2p
        mu_next2, mu_next = mu_next, mu
    grad *= 2. / model.interior.values
    return loss, grad


def mask_gradient(grad, top_rows=MASK_TOP_ROWS):
    grad = np.array(grad)
    grad[:top_rows] = 0.
    return grad


def misfit_value(vmap, geom, wavelet, obs_filtered, cutoff=None, n_jobs=1, order=FILTER_ORDER):
    """Misfit between low-passed predicted data and `obs_filtered`."""
    obs = _check_obs(obs_filtered, geom)
    model, wavelet = _prepare(vmap, geom, wavelet)
    F = _filter_matrix(cutoff, geom, order)
    losses = parallel_map(partial(_shot_loss, model, geom, wavelet, F, obs), range(geom.ns), n_jobs=n_jobs)
    return float(sum(losses))


def misfit_and_gradient(vmap, geom, wavelet, obs_filtered, cutoff=None, n_jobs=1, mask=True,
                        order=FILTER_ORDER):
    """Misfit and its gradient with respect to the velocities.

    The gradient is the discrete adjoint of the simulation, sponge
    damping and low-pass filter included: per shot,

        dJ/dc = sum_n (2 / c) mu^n (p^n - 2 p^{n-1} + p^{n-2}),

    i.e. (2 / c^3) q d2p/dt2 with q = c^2 dt^2 mu, where mu is
    the back-propagated filtered residual. Contributions through the
    two outermost padded rows and columns and through the replicated
    edge velocities of the sponge are dropped. Cells of the top
    MASK_TOP_ROWS rows are zeroed when `mask` is set.

    Parameters
    ----------
    vmap : VelocityMap
    geom : AcquisitionGeometry
    wavelet : None or RickerWavelet
    obs_filtered : SeismicGather
        Observed data, already low-passed with `cutoff`.
    cutoff : None or float
        Low-pass cutoff in Hz applied to the predicted data; no
        filtering if None.
    n_jobs : int
    mask : bool
    order : int
        Butterworth filter order.

    Returns
    -------
    loss : float
    grad : (nz, nx) np.ndarray
    """
    obs = _check_obs(obs_filtered, geom)
    model, wavelet = _prepare(vmap, geom, wavelet)
    F = _filter_matrix(cutoff, geom, order)
    results = parallel_map(partial(_shot_loss_and_gradient, model, geom, wavelet, F, obs),
                           range(geom.ns), n_jobs=n_jobs)
    loss = 0.
    grad = np.zeros(vmap.shape)
    for shot_loss, shot_grad in results:
        loss += shot_loss
        grad += shot_grad
    if mask:
        grad = mask_gradient(grad)
    return loss, grad


def gradient_adjoint(vmap, geom, wavelet, obs_filtered, cutoff=None, n_jobs=1):
    """Masked misfit gradient; see `misfit_and_gradient`."""
    return misfit_and_gradient(vmap, geom, wavelet, obs_filtered, cutoff=cutoff, n_jobs=n_jobs)[1]
