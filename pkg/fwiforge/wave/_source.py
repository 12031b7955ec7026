import numpy as np

from ..exceptions import ConfigError


class RickerWavelet(object):
    """Sampled source signature.

    Parameters
    ----------
    freq : positive float
        Peak frequency in Hz.
    dt : positive float
        Sampling interval in seconds.
    nt : int
        Number of samples, >= 2.
    delay : None or float
        Time of the peak in seconds, 1 / `freq` if None.
    samples : None or (nt,) array-like
        Explicit samples (e.g. a scaled or muted copy); computed
        from the Ricker formula if None.
    """
    def __init__(self, freq=15., dt=0.001, nt=1001, delay=None, samples=None):
        if freq <= 0 or dt <= 0:
            raise ConfigError("freq and dt must be positive, got freq={0}, dt={1}".format(freq, dt))
        if nt < 2:
            raise ConfigError("wavelet needs at least 2 samples, got {0}".format(nt))
        self.freq = float(freq)
        self.dt = float(dt)
        self.nt = int(nt)
        self.delay = 1. / self.freq if delay is None else float(delay)
        if samples is None:
            tau = np.arange(self.nt) * self.dt - self.delay
            arg = (np.pi * self.freq * tau) ** 2
            samples = (1. - 2. * arg) * np.exp(-arg)
        samples = np.array(samples, dtype=np.float64)
        if samples.shape != (self.nt,):
            raise ConfigError("expected {0} wavelet samples, got shape {1}".format(self.nt, samples.shape))
        samples.flags.writeable = False
        self.samples = samples

    def scale(self, alpha):
        return RickerWavelet(self.freq, self.dt, self.nt, self.delay, samples=alpha * self.samples)

    def __repr__(self):
        return "RickerWavelet(freq={0}, dt={1}, nt={2}, delay={3:.5f})".format(
            self.freq, self.dt, self.nt, self.delay)


def ricker(freq, dt, nt, delay=None):
    """Ricker wavelet (1 - 2 pi^2 f^2 tau^2) exp(-pi^2 f^2 tau^2),
    tau = n dt - `delay`.

    Examples
    --------
    >>> w = ricker(10., 0.01, 21, delay=10 * 0.01)
    >>> float(w.samples[10])
    1.0
    >>> float(w.samples.max()) == float(w.samples[10])
    True
    >>> bool(abs(ricker(15., 1. / (np.sqrt(2.) * np.pi * 15.), 2, delay=0.).samples[1]) < 1e-12)
    True
    """
    return RickerWavelet(freq, dt, nt, delay)


def make_wavelet(geom):
    """Source wavelet of `geom` spanning all `nt_sim` steps."""
    return RickerWavelet(geom.source_freq, geom.dt, geom.nt_sim, geom.delay)
