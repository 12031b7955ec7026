import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_raises

from fwiforge.exceptions import ConfigError, NumericalBlowupError, StabilityError
from fwiforge.grid import AcquisitionGeometry, VelocityMap
from fwiforge.utils import Stopwatch
from fwiforge.wave import (COURANT_BOUND, RickerWavelet, Wavefield, check_stability, first_break,
                           forward_model, laplacian, make_wavelet, pad_with_sponge, propagate_shot,
                           ricker, sponge_profile)


def small_geometry(nx=20, ns=2, nt=200, nbc=20, **params):
    if 'source_positions' in params or 'receiver_positions' in params:
        return AcquisitionGeometry(nt_sim=nt, nt_stored=nt, nbc=nbc, **params)
    return AcquisitionGeometry.surface(nx, ns=ns, nt_sim=nt, nt_stored=nt, nbc=nbc, **params)


def crossing_time(trace, dt, threshold):
    """Time |trace| first reaches `threshold` of its maximum, linearly
    interpolated between samples."""
    a = np.abs(trace)
    level = threshold * a.max()
    k = int(np.argmax(a >= level))
    return (k - 1 + (level - a[k - 1]) / (a[k] - a[k - 1])) * dt


class TestRicker(object):
    def test_peak_at_delay(self):
        w = ricker(15., 0.001, 1001)
        assert w.samples.argmax() == int(round(1. / 15. / 0.001))
        assert_allclose(w.samples.max(), 1., atol=1e-3)

    def test_zero_mean(self):
        w = ricker(15., 0.001, 1001)
        assert abs(w.samples.sum()) < 1e-3 * np.abs(w.samples).sum()

    def test_scale(self):
        w = ricker(10., 0.002, 100)
        assert_allclose(w.scale(3.).samples, 3. * w.samples)
        assert w.scale(3.).delay == w.delay

    def test_from_geometry(self):
        w = make_wavelet(AcquisitionGeometry.openfwi())
        assert (w.nt, w.freq, w.dt) == (1001, 15., 0.001)

    def test_invalid(self):
        assert_raises(ConfigError, RickerWavelet, freq=0.)
        assert_raises(ConfigError, RickerWavelet, nt=1)
        assert_raises(ConfigError, RickerWavelet, nt=3, samples=[1., 2.])


class TestSponge(object):
    def test_profile(self):
        p = sponge_profile(10, 5, decay=3.)
        assert len(p) == 20
        assert_array_equal(p[5:15], 1.)
        assert np.all(np.diff(p[:6]) > 0.)
        assert_allclose(p, p[::-1])

    def test_padding(self):
        vmap = VelocityMap(np.arange(1., 7.).reshape((2, 3)) * 1000.)
        model = pad_with_sponge(vmap, 4)
        assert model.shape == (10, 11)
        assert_array_equal(model.padded_values[model.interior_slice], vmap.values)
        assert_array_equal(model.padded_values[0, 4:7], vmap.values[0])
        assert_array_equal(model.damping[model.interior_slice], 1.)
        rows, cols = model.cells([(2, 1)])
        assert (rows[0], cols[0]) == (5, 6)

    def test_invalid_width(self):
        assert_raises(ConfigError, pad_with_sponge, VelocityMap([[1500.]]), 0)


class TestLaplacian(object):
    def test_exact_on_quartic(self):
        dx = 0.5
        z, x = np.mgrid[0:12, 0:14] * dx
        p = z ** 3 + x ** 4
        lap = laplacian(p, dx)
        expected = 6. * z + 12. * x ** 2
        assert_allclose(lap[2:-2, 2:-2], expected[2:-2, 2:-2], rtol=1e-10, atol=1e-9)

    def test_border_untouched(self):
        p = np.random.RandomState(0).randn(9, 9)
        out = np.full((9, 9), 7.)
        laplacian(p, 1., out=out)
        assert_array_equal(out[:2], 7.)
        assert_array_equal(out[:, -2:], 7.)


class TestStability(object):
    def test_courant(self):
        vmap = VelocityMap(np.full((5, 5), 3000.))
        assert_allclose(check_stability(vmap, AcquisitionGeometry(dt=0.002)), 0.6)

    def test_unstable(self):
        vmap = VelocityMap(np.full((20, 20), 4500.))
        geom = small_geometry(dt=0.002)
        with pytest.raises(StabilityError) as e:
            forward_model(vmap, geom)
        assert e.value.courant > COURANT_BOUND
        assert isinstance(e.value, ConfigError)

    def test_blowup(self):
        vmap = VelocityMap(np.full((20, 20), 2000.))
        geom = small_geometry(nt=50)
        samples = np.zeros(50)
        samples[3] = np.nan
        wavelet = RickerWavelet(15., geom.dt, 50, samples=samples)
        with pytest.raises(NumericalBlowupError) as e:
            forward_model(vmap, geom, wavelet=wavelet)
        assert e.value.step == 10


class TestPropagation(object):
    def setup_method(self):
        self.vmap = VelocityMap(np.full((20, 20), 2000.))
        self.geom = small_geometry()

    def test_output_shape(self):
        geom = small_geometry(ns=3, nt=120).set_params(nt_stored=100)
        gather = forward_model(self.vmap, geom)
        assert gather.shape == (3, 100, 20)
        assert gather.dt == geom.dt
        assert_array_equal(gather.traces[:, 0], 0.)

    def test_zero_source(self):
        wavelet = make_wavelet(self.geom).scale(0.)
        gather = forward_model(self.vmap, self.geom, wavelet=wavelet)
        assert_array_equal(gather.traces, 0.)

    def test_linear_in_source(self):
        wavelet = make_wavelet(self.geom)
        g1 = forward_model(self.vmap, self.geom, wavelet=wavelet)
        g2 = forward_model(self.vmap, self.geom, wavelet=wavelet.scale(-2.5))
        assert_allclose(g2.traces, -2.5 * g1.traces, rtol=1e-10, atol=1e-14)

    def test_source_gain(self):
        g1 = forward_model(self.vmap, self.geom)
        g2 = forward_model(self.vmap, self.geom.set_params(source_gain=2.))
        assert_allclose(g2.traces, 2. * g1.traces, rtol=1e-10, atol=1e-14)

    def test_reciprocity(self):
        a, b = (4, 6), (13, 10)
        geom_ab = small_geometry(nt=250, source_positions=[a], receiver_positions=[b])
        geom_ba = small_geometry(nt=250, source_positions=[b], receiver_positions=[a])
        t_ab = forward_model(self.vmap, geom_ab).traces[0, :, 0]
        t_ba = forward_model(self.vmap, geom_ba).traces[0, :, 0]
        assert_allclose(t_ab, t_ba, rtol=0., atol=1e-6 * np.abs(t_ab).max())

    def test_travel_time(self):
        """Ensure the direct wave moves out at the medium velocity."""
        vmap = VelocityMap(np.full((30, 60), 2000.))
        geom = AcquisitionGeometry(nt_sim=400, nt_stored=400, nbc=20,
                                   source_positions=[(5, 15)], receiver_positions=[(20, 15), (50, 15)])
        traces = forward_model(vmap, geom).traces[0]
        times = first_break(traces, geom.dt, threshold=0.05)
        assert abs((times[1] - times[0]) - 300. / 2000.) < 0.015

    def test_travel_time_openfwi(self):
        """Ensure every receiver of the OpenFWI layout picks the direct wave
        at the wavelet onset plus offset / 1500 in a 1500 m/s medium."""
        vmap = VelocityMap(np.full((70, 70), 1500.))
        geom = AcquisitionGeometry(source_positions=[(0, 0)])
        with Stopwatch() as timer:
            traces = forward_model(vmap, geom, n_jobs=1).traces[0]
        assert timer.elapsed() < 10.

        onset = first_break(make_wavelet(geom).samples[:, np.newaxis], geom.dt, threshold=1e-3)[0]
        offsets = geom.dx * np.array([x for x, _ in geom.receiver_positions], dtype=float)
        times = first_break(traces, geom.dt, threshold=1e-3)
        assert_allclose(times, onset + offsets / 1500., rtol=0., atol=10. * geom.dt)
        assert np.all(times < geom.delay + offsets / 1500. - 0.05)

    def test_faster_medium_arrives_earlier(self):
        geom = small_geometry(ns=1)
        slow = forward_model(self.vmap, geom).traces[0]
        fast = forward_model(self.vmap.replace(np.full((20, 20), 3000.)), geom).traces[0]
        assert first_break(fast, geom.dt, 0.05)[-1] < first_break(slow, geom.dt, 0.05)[-1]

    def test_long_run_bounded(self):
        """Ensure ten times the usual number of steps at 4500 m/s stays bounded."""
        vmap = VelocityMap(np.full((20, 20), 4500.))
        geom = small_geometry(ns=1)
        nt = 10 * geom.nt_sim
        model = pad_with_sponge(vmap, geom.nbc)
        wavelet = RickerWavelet(geom.source_freq, geom.dt, nt)
        wavefield = Wavefield()
        propagate_shot(model, geom, wavelet, 0, wavefield=wavefield, nt=nt)
        amplitude = np.abs(wavefield.snapshots).max(axis=(1, 2))
        assert len(amplitude) == nt
        assert np.all(np.isfinite(amplitude))
        assert amplitude.max() <= 10. * amplitude[:geom.nt_sim].max()

    def test_refinement_keeps_first_arrival(self):
        """Ensure halving dx and dt moves the first arrival by less than one coarse dt."""
        def pick(refine):
            n = 40 * refine
            dx = 10. / refine
            depth = (np.arange(n) + 1.) * dx
            vmap = VelocityMap(np.tile((2000. + depth)[:, np.newaxis], (1, n)), dx=dx)
            # coarse cell i and fine cell 2i + 1 share their center
            cell = lambda i: refine * i + refine - 1
            geom = AcquisitionGeometry(dx=dx, dt=0.001 / refine, nt_sim=300 * refine,
                                       nt_stored=300 * refine, nbc=20 * refine,
                                       source_positions=[(cell(3), cell(2))],
                                       receiver_positions=[(cell(23), cell(2))])
            trace = forward_model(vmap, geom).traces[0, :, 0]
            return crossing_time(trace, geom.dt, 0.05)

        coarse, fine = pick(1), pick(2)
        assert 0.08 < coarse < 0.2
        assert abs(fine - coarse) < 0.001

    def test_lateral_symmetry(self):
        """Ensure a centred source in a constant medium gives mirror-symmetric gathers."""
        vmap = VelocityMap(np.full((20, 41), 2000.))
        geom = AcquisitionGeometry(nt_sim=200, nt_stored=200, nbc=20, source_positions=[(20, 0)],
                                   receiver_positions=AcquisitionGeometry.surface_positions(41))
        traces = forward_model(vmap, geom).traces[0]
        assert np.abs(traces).max() > 0.
        assert_allclose(traces, traces[:, ::-1], rtol=0., atol=1e-10 * np.abs(traces).max())

    def test_wavefield_snapshots(self):
        model = pad_with_sponge(self.vmap, self.geom.nbc)
        wavefield = Wavefield(every=5)
        traces = propagate_shot(model, self.geom, make_wavelet(self.geom), 0, wavefield=wavefield, nt=21)
        assert traces.shape == (21, 20)
        assert wavefield.steps == [0, 5, 10, 15, 20]
        assert wavefield.snapshots.shape == (5, 20, 20)
        assert_array_equal(wavefield.snapshots[-1][0], traces[20])

    def test_invalid_arguments(self):
        model = pad_with_sponge(self.vmap, self.geom.nbc)
        wavelet = make_wavelet(self.geom)
        assert_raises(ConfigError, propagate_shot, model, self.geom, wavelet, 5)
        short = RickerWavelet(15., self.geom.dt, 10)
        assert_raises(ConfigError, propagate_shot, model, self.geom, short, 0)
        assert_raises(ConfigError, Wavefield, every=0)
        assert_raises(ConfigError, forward_model, VelocityMap(np.full((20, 10), 2000.)), self.geom)

    @pytest.mark.slow
    def test_parallel_matches_serial(self):
        geom = small_geometry(ns=4)
        serial = forward_model(self.vmap, geom, n_jobs=1)
        parallel = forward_model(self.vmap, geom, n_jobs=2)
        assert_array_equal(serial.traces, parallel.traces)


class TestFirstBreak(object):
    def test_dead_trace(self):
        times = first_break(np.zeros((5, 2)), 0.1)
        assert np.all(np.isnan(times))
