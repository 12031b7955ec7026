import os

import numpy as np
import pytest
from numpy.testing import assert_array_equal, assert_raises

from fwiforge.exceptions import ConfigError, DatasetError, FormatError, PairingError
from fwiforge.grid import AcquisitionGeometry, SeismicGather, VelocityMap
from fwiforge.synth import get_preset
from fwiforge.utils.dataset import (MANIFEST_NAME, DatasetLayout, Manifest, PairLoader, Sample,
                                    config_digest, load_pairs, pack_dataset, read_pair, validate_dataset,
                                    verify_manifest)
from fwiforge.utils.read_write import file_checksum, read_npy, write_npy


def make_samples(n, n_layers=None, seed=0, shape=(6, 5), gather_shape=(2, 8, 5)):
    rng = np.random.RandomState(seed)
    samples = []
    for i in range(n):
        vmap = VelocityMap(rng.uniform(1500., 4500., size=shape),
                           n_layers=None if n_layers is None else n_layers[i])
        samples.append(Sample(vmap, SeismicGather(rng.randn(*gather_shape))))
    return samples


class TestLayout(object):
    def test_velstyle_names(self):
        layout = DatasetLayout('d', family='curvevel')
        assert layout.naming == 'velstyle'
        assert layout.file_names(0) == ('data1.npy', 'model1.npy')

    def test_fault_names(self):
        layout = DatasetLayout('d', family='curvefault')
        assert layout.file_names(2, n_layers=4) == ('seis_4_1_2.npy', 'vel_4_1_2.npy')
        assert_raises(ConfigError, layout.file_names, 0)

    def test_kimberlina_read_only(self):
        layout = DatasetLayout('d', naming='kimberlina')
        assert_raises(ConfigError, layout.file_names, 0)

    def test_invalid(self):
        assert_raises(ConfigError, DatasetLayout, 'd', naming='style')
        assert_raises(ConfigError, DatasetLayout, 'd', samples_per_file=0)

    def test_scan_order(self, tmp_path):
        root = str(tmp_path)
        for n in (10, 2, 1):
            for kind in ('data', 'model'):
                write_npy(np.zeros((1, 1, 2, 2)), os.path.join(root, '{0}{1}.npy'.format(kind, n)))
        write_npy(np.zeros((1, 1, 2, 2)), os.path.join(root, 'other.npy'))
        pairs = DatasetLayout(root).scan()
        assert pairs == [('data1.npy', 'model1.npy'), ('data2.npy', 'model2.npy'),
                         ('data10.npy', 'model10.npy')]

    def test_scan_unpaired(self, tmp_path):
        root = str(tmp_path)
        write_npy(np.zeros((1, 1, 2, 2)), os.path.join(root, 'model3.npy'))
        with pytest.raises(PairingError) as e:
            DatasetLayout(root).scan()
        assert 'model3.npy' in str(e.value)

    def test_scan_empty(self, tmp_path):
        assert_raises(DatasetError, DatasetLayout(str(tmp_path)).scan)
        assert_raises(DatasetError, DatasetLayout(os.path.join(str(tmp_path), 'nope')).scan)


class TestPackLoad(object):
    def test_round_trip(self, tmp_path):
        """Ensure packing then loading returns the float32 samples in order."""
        root = str(tmp_path)
        samples = make_samples(5)
        layout = DatasetLayout(root, samples_per_file=2)
        manifest = pack_dataset(samples, layout)
        assert sorted(os.listdir(root)) == ['data1.npy', 'data2.npy', 'data3.npy', MANIFEST_NAME,
                                            'model1.npy', 'model2.npy', 'model3.npy']
        assert [f['n_samples'] for f in manifest.files] == [2, 2, 1]
        assert [f['short'] for f in manifest.files] == [False, False, True]
        assert read_npy(os.path.join(root, 'model1.npy')).shape == (2, 1, 6, 5)
        assert read_npy(os.path.join(root, 'data3.npy')).shape == (1, 2, 8, 5)

        loader = load_pairs(root)
        assert len(loader) == 5
        loaded = list(loader)
        for (vmap, gather), sample in zip(loaded, samples):
            assert_array_equal(vmap.values, sample.vmap.values.astype(np.float32))
            assert_array_equal(gather.traces, sample.gather.traces.astype(np.float32))
        assert len(list(loader)) == 5

    def test_fault_naming(self, tmp_path):
        """Ensure the fault naming keeps the sample order and the layer counts."""
        root = str(tmp_path)
        samples = make_samples(5, n_layers=[3, 2, 3, 3, 2])
        manifest = pack_dataset(samples, DatasetLayout(root, family='flatfault', samples_per_file=2))
        names = [(f['data'], f['model'], f['n_samples']) for f in manifest.files]
        assert names == [('seis_3_1_0.npy', 'vel_3_1_0.npy', 1),
                         ('seis_2_1_1.npy', 'vel_2_1_1.npy', 1),
                         ('seis_3_1_2.npy', 'vel_3_1_2.npy', 2),
                         ('seis_2_1_3.npy', 'vel_2_1_3.npy', 1)]
        loaded = list(PairLoader(root))
        assert len(loaded) == 5
        for (vmap, gather), sample in zip(loaded, samples):
            assert_array_equal(vmap.values, sample.vmap.values.astype(np.float32))
            assert_array_equal(gather.traces, sample.gather.traces.astype(np.float32))
            assert vmap.n_layers == sample.vmap.n_layers
        assert [m.n_layers for m in PairLoader(root).maps()] == [3, 2, 3, 3, 2]

    def test_fault_repack(self, tmp_path):
        root, copy = os.path.join(str(tmp_path), 'a'), os.path.join(str(tmp_path), 'b')
        samples = make_samples(4, n_layers=[2, 2, 4, 2])
        pack_dataset(samples, DatasetLayout(root, family='curvefault'))
        pack_dataset(list(load_pairs(root)), DatasetLayout(copy, family='curvefault'))
        assert sorted(os.listdir(copy)) == sorted(os.listdir(root))
        for name in os.listdir(root):
            if name != MANIFEST_NAME:
                assert file_checksum(os.path.join(root, name)) == file_checksum(os.path.join(copy, name))

    def test_read_pair_layers(self, tmp_path):
        root = str(tmp_path)
        pack_dataset(make_samples(2, n_layers=[5, 5]), DatasetLayout(root, family='flatfault'))
        maps = [vmap for vmap, _ in read_pair(os.path.join(root, 'seis_5_1_0.npy'),
                                               os.path.join(root, 'vel_5_1_0.npy'))]
        assert [m.n_layers for m in maps] == [5, 5]

    def test_scan_fault_files_per_layer_count(self, tmp_path):
        root = str(tmp_path)
        for n, i in ((3, 0), (2, 1), (2, 0)):
            for kind in ('seis', 'vel'):
                write_npy(np.zeros((1, 1, 2, 2)), os.path.join(root, '{0}_{1}_1_{2}.npy'.format(kind, n, i)))
        pairs = DatasetLayout(root, naming='fault').scan()
        assert [p[1] for p in pairs] == ['vel_2_1_0.npy', 'vel_3_1_0.npy', 'vel_2_1_1.npy']

    def test_fault_naming_needs_layers(self, tmp_path):
        layout = DatasetLayout(str(tmp_path), family='curvefault')
        assert_raises(ConfigError, pack_dataset, make_samples(2), layout)

    def test_empty(self, tmp_path):
        assert_raises(DatasetError, pack_dataset, [], DatasetLayout(str(tmp_path)))

    def test_manifest(self, tmp_path):
        root = str(tmp_path)
        config = get_preset('flatvel-b', seed=3)
        geom = AcquisitionGeometry.surface(5, ns=2, nt_sim=8, nt_stored=8, dx=5., dt=0.002)
        pack_dataset(make_samples(3), DatasetLayout(root, family='flatvel'), config=config,
                     seed=3, geometry=geom)
        manifest = Manifest.load(root)
        assert manifest.n_samples == 3
        assert manifest.seed == 3
        assert manifest.config_hash == config.params_hash()
        assert manifest.config['family'] == 'flatvel'
        assert manifest.geometry['nt_stored'] == 8
        loader = PairLoader(root)
        assert (loader.dx, loader.dt) == (5., 0.002)
        vmap, gather = next(iter(loader))
        assert (vmap.dx, gather.dt) == (5., 0.002)

    def test_dict_config(self, tmp_path):
        root = str(tmp_path)
        config = {'generator': {'family': 'flatvel'}, 'count': 2}
        manifest = pack_dataset(make_samples(2), DatasetLayout(root), config=config)
        assert manifest.config_hash == config_digest(config)

    def test_without_manifest(self, tmp_path):
        root = str(tmp_path)
        pack_dataset(make_samples(3, n_layers=[2, 2, 4]), DatasetLayout(root, family='curvefault'))
        os.remove(os.path.join(root, MANIFEST_NAME))
        loader = PairLoader(root)
        assert loader.layout.naming == 'fault'
        assert len(loader) == 3

    def test_count_mismatch(self, tmp_path):
        root = str(tmp_path)
        pack_dataset(make_samples(2), DatasetLayout(root))
        write_npy(np.zeros((1, 2, 8, 5)), os.path.join(root, 'data1.npy'))
        with pytest.raises(PairingError):
            list(PairLoader(root))


class TestValidation(object):
    def setup_method(self):
        self.shapes = dict(model_shape=(1, 6, 5), data_shape=(2, 8, 5))

    def _pack(self, tmp_path, samples=None):
        root = str(tmp_path)
        pack_dataset(samples or make_samples(3), DatasetLayout(root))
        return root

    def test_clean(self, tmp_path):
        root = self._pack(tmp_path)
        assert verify_manifest(root) == []
        assert validate_dataset(root, **self.shapes) == []

    def test_shape(self, tmp_path):
        root = self._pack(tmp_path)
        violations = validate_dataset(root)
        assert len(violations) == 2
        assert all('sample shape' in v.message for v in violations)
        assert validate_dataset(root, model_shape=None, data_shape=None) == []

    def test_altered_file(self, tmp_path):
        root = self._pack(tmp_path)
        path = os.path.join(root, 'model1.npy')
        with open(path, 'r+b') as f:
            f.seek(-1, os.SEEK_END)
            f.write(b'\x00')
        assert verify_manifest(root) == [('model1.npy', 'checksum mismatch')]
        violations = validate_dataset(root, **self.shapes)
        assert [str(v) for v in violations] == ['model1.npy: checksum mismatch']

    def test_missing_file(self, tmp_path):
        root = self._pack(tmp_path)
        os.remove(os.path.join(root, 'data1.npy'))
        assert verify_manifest(root) == [('data1.npy', 'file is missing')]

    def test_velocity_range(self, tmp_path):
        samples = make_samples(3)
        samples[1].vmap = VelocityMap(np.full((6, 5), 5000.))
        root = self._pack(tmp_path, samples)
        violations = validate_dataset(root, **self.shapes)
        assert [(v.filename, v.index) for v in violations] == [('model1.npy', 1)]
        assert validate_dataset(root, vrange=None, **self.shapes) == []

    def test_non_finite(self, tmp_path):
        root = self._pack(tmp_path)
        data = read_npy(os.path.join(root, 'data1.npy'))
        data[2, 0, 0, 0] = np.nan
        write_npy(data, os.path.join(root, 'data1.npy'))
        manifest = Manifest.load(root)
        manifest.files[0]['checksums']['data1.npy'] = file_checksum(os.path.join(root, 'data1.npy'))
        manifest.save(root)
        violations = validate_dataset(root, **self.shapes)
        assert ('data1.npy', 2, 'non-finite values') in [(v.filename, v.index, v.message) for v in violations]

    def test_missing_manifest(self, tmp_path):
        violations = validate_dataset(str(tmp_path))
        assert len(violations) == 1 and violations[0].filename == MANIFEST_NAME
        assert_raises(DatasetError, verify_manifest, str(tmp_path))

    def test_corrupt_manifest(self, tmp_path):
        root = self._pack(tmp_path)
        with open(os.path.join(root, MANIFEST_NAME), 'w') as f:
            f.write('{not json')
        assert_raises(FormatError, Manifest.load, root)
        assert len(validate_dataset(root)) == 1
