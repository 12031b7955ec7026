import os

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal, assert_raises

from fwiforge.exceptions import ConfigError, DimensionError
from fwiforge.fwi import (InversionConfig, InversionTrace, butter_lowpass, cg_stage, get_initial_map,
                          gradient_adjoint, initial_homogeneous, initial_linear, initial_smoothed, lowpass,
                          lowpass_matrix, mask_gradient, misfit_and_gradient, misfit_l2,
                          misfit_value, multiscale_fwi)
from fwiforge.grid import AcquisitionGeometry, SeismicGather, VelocityMap
from fwiforge.metrics import evaluate_maps
from fwiforge.synth import VelocityGenerator, get_preset
from fwiforge.utils.read_write import load_params
from fwiforge.wave import forward_model


def two_layer_map(nz=20, nx=20, top=2000., bottom=2500., interface=10):
    values = np.full((nz, nx), top)
    values[interface:] = bottom
    return VelocityMap(values)


def toy_geometry(ns=1, nt=300, nbc=10):
    return AcquisitionGeometry.surface(20, ns=ns, nt_sim=nt, nt_stored=nt, nbc=nbc)


class TestLowpass(object):
    def setup_method(self):
        self.t = np.arange(1000) * 0.001

    def test_passes_dc(self):
        F = lowpass_matrix(5., 0.001, 300)
        assert_allclose(F.dot(np.ones(300)), 1., atol=1e-6)

    def test_keeps_low_frequencies(self):
        x = np.sin(2. * np.pi * 2. * self.t)
        g = SeismicGather(x[np.newaxis, :, np.newaxis])
        y = lowpass(g, 30.).traces[0, :, 0]
        assert_allclose(y[100:-100], x[100:-100], atol=1e-2)

    def test_removes_high_frequencies(self):
        x = np.sin(2. * np.pi * 100. * self.t)
        g = SeismicGather(np.tile(x[np.newaxis, :, np.newaxis], (2, 1, 3)))
        y = lowpass(g, 10.)
        assert y.shape == g.shape
        assert np.abs(y.traces).max() < 1e-2

    def test_pass_and_stop_bands(self):
        cutoff = 10.
        for ratio, check in ((0.2, lambda a: a >= 0.99), (5., lambda a: a <= 0.01)):
            x = np.sin(2. * np.pi * ratio * cutoff * self.t)
            y = lowpass(SeismicGather(x[np.newaxis, :, np.newaxis]), cutoff).traces[0, :, 0]
            assert check(np.abs(y[250:750]).max())

    def test_zero_phase(self):
        x = np.zeros(401)
        x[200] = 1.
        y = lowpass_matrix(20., 0.001, 401).dot(x)
        assert y.argmax() == 200
        assert_allclose(y[150:200], y[201:251][::-1], atol=1e-8)

    def test_invalid_cutoff(self):
        assert_raises(ConfigError, butter_lowpass, 0., 0.001)
        assert_raises(ConfigError, butter_lowpass, 500., 0.001)
        assert_raises(ConfigError, butter_lowpass, 600., 0.001)


class TestMisfit(object):
    def setup_method(self):
        self.rng = np.random.RandomState(1337)

    def test_against_loop(self):
        a = self.rng.randn(2, 5, 3)
        b = self.rng.randn(2, 5, 3)
        expected = 0.
        for i in range(2):
            for j in range(5):
                for k in range(3):
                    expected += 0.5 * (a[i, j, k] - b[i, j, k]) ** 2
        assert_allclose(misfit_l2(a, b), expected)
        assert_allclose(misfit_l2(SeismicGather(a), SeismicGather(b)), expected)

    def test_shape_mismatch(self):
        assert_raises(DimensionError, misfit_l2, np.zeros((1, 2, 3)), np.zeros((1, 3, 2)))

    def test_mask(self):
        grad = self.rng.randn(5, 4)
        masked = mask_gradient(grad, top_rows=2)
        assert_array_equal(masked[:2], 0.)
        assert_array_equal(masked[2:], grad[2:])
        assert grad[0, 0] != 0.


class TestGradient(object):
    def setup_method(self):
        self.truth = two_layer_map()
        self.geom = toy_geometry()
        self.obs = forward_model(self.truth, self.geom)
        rng = np.random.RandomState(3)
        self.vmap = self.truth.replace(2200. + 50. * rng.rand(20, 20))

    def test_zero_residual(self):
        loss, grad = misfit_and_gradient(self.truth, self.geom, None, self.obs)
        assert loss == 0.
        assert_array_equal(grad, 0.)
        obs_low = lowpass(self.obs, 10.)
        loss, grad = misfit_and_gradient(self.truth, self.geom, None, obs_low, cutoff=10.)
        assert loss == 0.
        assert_array_equal(grad, 0.)

    def test_value_matches(self):
        loss, _ = misfit_and_gradient(self.vmap, self.geom, None, self.obs)
        assert_allclose(misfit_value(self.vmap, self.geom, None, self.obs), loss)
        assert loss > 0.

    def test_observed_shape(self):
        bad = SeismicGather(np.zeros((1, 10, 20)))
        assert_raises(DimensionError, misfit_value, self.vmap, self.geom, None, bad)

    def _check_finite_differences(self, cutoff, obs, seed=11):
        _, grad = misfit_and_gradient(self.vmap, self.geom, None, obs, cutoff=cutoff, mask=False)
        h = 1.
        rng = np.random.RandomState(seed)
        rows, cols = rng.randint(2, 18, size=10), rng.randint(2, 18, size=10)
        passed = 0
        for row, col in zip(rows, cols):
            up = np.array(self.vmap.values)
            up[row, col] += h
            down = np.array(self.vmap.values)
            down[row, col] -= h
            fd = (misfit_value(self.vmap.replace(up), self.geom, None, obs, cutoff=cutoff) -
                  misfit_value(self.vmap.replace(down), self.geom, None, obs, cutoff=cutoff)) / (2. * h)
            g = grad[row, col]
            if g != 0. and abs(fd - g) < 5e-2 * abs(g):
                passed += 1
        assert passed >= 9

    def test_finite_differences(self):
        """Ensure the adjoint gradient matches central differences of the misfit."""
        self._check_finite_differences(None, self.obs)

    def test_finite_differences_filtered(self):
        self._check_finite_differences(10., lowpass(self.obs, 10.))

    def test_linear_in_residual(self):
        pred = forward_model(self.vmap, self.geom).traces
        r = pred - self.obs.traces
        _, g1 = misfit_and_gradient(self.vmap, self.geom, None, SeismicGather(pred - r))
        _, g2 = misfit_and_gradient(self.vmap, self.geom, None, SeismicGather(pred - 2. * r))
        assert_allclose(g2, 2. * g1, rtol=1e-8, atol=1e-12 * np.abs(g1).max())

    def test_top_rows_masked(self):
        _, grad = misfit_and_gradient(self.vmap, self.geom, None, self.obs)
        assert_array_equal(grad[:2], 0.)
        assert np.any(grad[2:] != 0.)
        assert_array_equal(gradient_adjoint(self.vmap, self.geom, None, self.obs), grad)


class TestInitialMaps(object):
    def setup_method(self):
        self.truth = two_layer_map(top=1800., bottom=3600.)

    def test_homogeneous(self):
        m = initial_homogeneous(self.truth)
        assert_array_equal(m.values, 1800.)
        m = initial_homogeneous(2000., nz=3, nx=4)
        assert m.shape == (3, 4)
        assert_raises(ConfigError, initial_homogeneous, 2000.)

    def test_linear(self):
        m = get_initial_map('linear', self.truth, vtop=1500., vbottom=4500.)
        assert m.shape == self.truth.shape
        assert_allclose(m.values[[0, -1], 0], [1500., 4500.])
        assert np.all(np.diff(m.values[:, 3]) > 0.)
        assert_raises(ConfigError, initial_linear, 3000., 2000.)

    def test_smoothed(self):
        m = get_initial_map('Smoothed', self.truth, kernel=5)
        assert m.in_range(1800., 3600.)
        assert_array_equal(m.values[:3], 1800.)
        assert 1800. < m.values[10, 10] < 3600.
        assert_raises(ConfigError, initial_smoothed, self.truth, kernel=4)


class TestInversionConfig(object):
    def test_defaults(self):
        config = InversionConfig()
        assert config.n_stages == 6
        assert config.bounds == (1500., 4500.)

    def test_invalid(self):
        assert_raises(ConfigError, InversionConfig, cutoffs=())
        assert_raises(ConfigError, InversionConfig, cutoffs=(3., 3.))
        assert_raises(ConfigError, InversionConfig, stop_rel_loss_change=0.)
        assert_raises(ConfigError, InversionConfig, bounds=(4500., 1500.))
        assert_raises(ConfigError, InversionConfig, optimizer='adam')

    def test_save_load(self, tmp_path):
        path = os.path.join(str(tmp_path), 'inversion.json')
        config = InversionConfig(cutoffs=(2, 4), optimizer='SteepestDescent')
        config.save(path)
        loaded = load_params(path)
        assert loaded == config
        assert loaded.cutoffs == (2., 4.)


class TestTrace(object):
    def test_stage_bookkeeping(self):
        trace = InversionTrace()
        trace.record(1, 5., 0, 4., np.nan, 'start')
        trace.record(1, 5., 1, 3., 0.25, 'ok')
        trace.record(1, 5., 1, 3., 0., 'line-search-failed')
        trace.record(2, 10., 0, 9., np.nan, 'start')
        trace.record(2, 10., 0, 9., 0., 'stalled')
        assert trace.stage_losses(1) == [4., 3.]
        assert trace.stage_losses(2) == [9.]
        assert trace.final_status(1) == 'line-search-failed'
        assert trace.stalled_stages == [2]
        assert trace.final_status(3) is None
        df = trace.to_frame()
        assert len(df) == 5
        assert df['status'].tolist()[-1] == 'stalled'


class TestInversion(object):
    def setup_method(self):
        self.truth = two_layer_map()
        self.geom = toy_geometry(ns=2)
        self.obs = forward_model(self.truth, self.geom)
        self.config = InversionConfig(cutoffs=(5., 10.), max_iters_per_stage=3)

    def test_exact_start_converges(self):
        obs_low = lowpass(self.obs, 5.)
        vmap, trace = cg_stage(self.truth, obs_low, 5., self.config, self.geom)
        assert_array_equal(vmap.values, self.truth.values)
        assert [r['status'] for r in trace.records] == ['start', 'converged']
        assert trace.n_stages == 1

    def test_start_outside_bounds(self):
        map0 = VelocityMap(np.full((20, 20), 1000.))
        assert_raises(ConfigError, cg_stage, map0, self.obs, None, self.config, self.geom)

    def test_multiscale_reduces_misfit(self):
        map0 = initial_homogeneous(self.truth)
        vmap, trace = multiscale_fwi(map0, self.obs, self.geom, config=self.config)
        assert trace.n_stages == 2
        assert len(trace.stage_maps) == 2
        assert vmap is trace.stage_maps[-1]
        df = trace.to_frame()
        assert df['stage'].unique().tolist() == [1, 2]
        assert df['cutoff'].unique().tolist() == [5., 10.]
        assert df.groupby('stage')['status'].first().tolist() == ['start', 'start']
        assert 1 not in trace.stalled_stages
        for stage in (1, 2):
            losses = trace.stage_losses(stage)
            assert np.all(np.diff(losses) <= 0.)
        losses = trace.stage_losses(1)
        assert losses[-1] < losses[0]
        assert vmap.in_range(*self.config.bounds)
        assert trace.wall_time > 0.

    def test_stopping_rule(self):
        """Ensure every stage ends below the loss-change tolerance or at the iteration cap."""
        map0 = initial_homogeneous(self.truth)
        _, trace = multiscale_fwi(map0, self.obs, self.geom, config=self.config)
        cap = self.config.max_iters_per_stage
        for _, rows in trace.to_frame().groupby('stage'):
            last = rows.iloc[-1]
            assert rows['iteration'].max() <= cap
            if last['status'] == 'converged':
                assert last['iteration'] == 0 or last['rel_change'] < self.config.stop_rel_loss_change
            elif last['status'] == 'max-iter':
                assert last['iteration'] == cap
            else:
                assert last['status'] in ('line-search-failed', 'stalled')

    def test_stage_warm_start(self):
        """Ensure the second stage starts from the first stage's map."""
        map0 = initial_homogeneous(self.truth)
        _, trace = multiscale_fwi(map0, self.obs, self.geom, config=self.config)
        stage1 = trace.stage_maps[0]
        expected = misfit_value(stage1, self.geom, None, lowpass(self.obs, 10.), cutoff=10.)
        assert_allclose(trace.stage_losses(2)[0], expected)

    @pytest.mark.slow
    def test_flatvel_improves_ssim(self):
        """Ensure the full cutoff schedule from a smoothed start raises the
        mean SSIM of five FlatVel-A maps by at least 0.05."""
        maps = VelocityGenerator(get_preset('flatvel-a', seed=7)).generate_batch(5)
        geom = AcquisitionGeometry.openfwi()
        config = InversionConfig()
        assert config.cutoffs == (1., 3., 5., 10., 20., 30.)
        before, after = [], []
        for truth in maps:
            obs = forward_model(truth, geom, n_jobs=2)
            map0 = get_initial_map('smoothed', truth, kernel=9)
            vmap, _ = multiscale_fwi(map0, obs, geom, config=config, n_jobs=2)
            before.append(evaluate_maps(map0, truth).ssim)
            after.append(evaluate_maps(vmap, truth).ssim)
        assert np.mean(after) - np.mean(before) >= 0.05
