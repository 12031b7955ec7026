"""Dataset directories of paired velocity / seismic files.

Two naming conventions are supported:

* 'velstyle' (Vel and Style families): ``data{N}.npy`` / ``model{N}.npy``,
  N = 1, 2, ...
* 'fault' (Fault families): ``seis_{n}_1_{i}.npy`` / ``vel_{n}_1_{i}.npy``,
  n being the number of initial flat layers of the maps in the file and
  i = 0, 1, ... the file position in sample order.

Velocity files hold (batch, 1, nz, nx) arrays, seismic files
(batch, ns, nt_stored, nr) arrays. ``manifest.json`` is written last
and records the resolved configuration and a checksum of every file.
"""
import os
import re
import json
import hashlib
from collections import OrderedDict

import numpy as np

from .. import __version__
from ..exceptions import ConfigError, DatasetError, FormatError, PairingError
from ..grid import VelocityMap, SeismicGather, OPENFWI_VRANGE, OPENFWI_SHAPE, OPENFWI_GATHER_SHAPE
from .read_write import file_checksum, read_npy, write_npy


MANIFEST_NAME = 'manifest.json'
SAMPLES_PER_FILE = 500
NAMINGS = ('velstyle', 'fault', 'kimberlina')

VELSTYLE_FILE_RE = re.compile(r'^(data|model)(\d+)\.npy$')
FAULT_FILE_RE = re.compile(r'^(vel|seis)_(\d+)_1_(\d+)\.npy$')


def naming_for_family(family):
    """
    Examples
    --------
    >>> naming_for_family('curvefault'), naming_for_family('flatvel')
    ('fault', 'velstyle')
    """
    return 'fault' if family.endswith('fault') else 'velstyle'


def n_layers_from_name(name):
    """Number of flat layers encoded in a fault-naming file name.

    Examples
    --------
    >>> n_layers_from_name('vel_3_1_12.npy'), n_layers_from_name('model2.npy')
    (3, None)
    """
    match = FAULT_FILE_RE.match(os.path.basename(name))
    return int(match.group(2)) if match else None


class DatasetLayout(object):
    """Where and under which names a dataset is stored.

    Parameters
    ----------
    root : str
        Dataset directory.
    family : str
        Generator family the samples come from.
    naming : None or {'velstyle', 'fault', 'kimberlina'}
        Derived from `family` if None. 'kimberlina' (one sample per
        file) is recognized but cannot be packed.
    samples_per_file : int

    Examples
    --------
    >>> layout = DatasetLayout('d', family='flatvel')
    >>> layout.file_names(1)
    ('data2.npy', 'model2.npy')
    >>> DatasetLayout('d', family='flatfault').file_names(0, n_layers=3)
    ('seis_3_1_0.npy', 'vel_3_1_0.npy')
    """
    def __init__(self, root, family='flatvel', naming=None, samples_per_file=SAMPLES_PER_FILE):
        if naming is None:
            naming = naming_for_family(family)
        if naming not in NAMINGS:
            raise ConfigError("invalid naming '{0}'; expected one of {1}".format(naming, NAMINGS))
        if samples_per_file < 1:
            raise ConfigError("samples_per_file must be >= 1, got {0}".format(samples_per_file))
        self.root = root
        self.family = family
        self.naming = naming
        self.samples_per_file = int(samples_per_file)

    def _check_packable(self):
        if self.naming == 'kimberlina':
            raise ConfigError('the kimberlina layout (one reservoir sample per file) is read-only here')

    def file_names(self, index, n_layers=None):
        """(seismic, velocity) file names of the `index`-th file
        (its position in sample order)."""
        self._check_packable()
        if self.naming == 'velstyle':
            return 'data{0}.npy'.format(index + 1), 'model{0}.npy'.format(index + 1)
        if n_layers is None:
            raise ConfigError('the fault naming needs the number of flat layers')
        return ('seis_{0}_1_{1}.npy'.format(n_layers, index),
                'vel_{0}_1_{1}.npy'.format(n_layers, index))

    def path(self, name):
        return os.path.join(self.root, name)

    def scan(self):
        """(seismic, velocity) file name pairs found in `root`, in file order.

        Raises
        ------
        PairingError
            If a file lacks its partner.
        DatasetError
            If no file of the layout exists.
        """
        self._check_packable()
        if not os.path.isdir(self.root):
            raise DatasetError("dataset directory '{0}' does not exist".format(self.root))
        found = {}
        for name in os.listdir(self.root):
            if self.naming == 'velstyle':
                match = VELSTYLE_FILE_RE.match(name)
                if match:
                    found.setdefault((int(match.group(2)),), {})[match.group(1)] = name
            else:
                match = FAULT_FILE_RE.match(name)
                if match:
                    key = (int(match.group(3)), int(match.group(2)))
                    found.setdefault(key, {})[match.group(1)] = name
        if not found:
            raise DatasetError("no '{0}' dataset files in '{1}'".format(self.naming, self.root))
        data_kind, model_kind = ('data', 'model') if self.naming == 'velstyle' else ('seis', 'vel')
        pairs = []
        for key in sorted(found):
            files = found[key]
            for kind, partner in ((data_kind, model_kind), (model_kind, data_kind)):
                if partner not in files:
                    raise PairingError("'{0}' has no matching {1} file".format(self.path(files[kind]), partner))
            pairs.append((files[data_kind], files[model_kind]))
        return pairs

    def to_dict(self):
        return {'family': self.family, 'naming': self.naming, 'samples_per_file': self.samples_per_file}

    def __repr__(self):
        return "DatasetLayout(root='{0}', family='{1}', naming='{2}', samples_per_file={3})".format(
            self.root, self.family, self.naming, self.samples_per_file)


class Sample(object):
    """A velocity map and the gather simulated over it."""

    def __init__(self, vmap, gather):
        self.vmap = vmap
        self.gather = gather

    def __iter__(self):
        return iter((self.vmap, self.gather))


class Manifest(object):
    """Self-description of a dataset directory.

    Attributes
    ----------
    files : list of dict
        Per file pair: 'data', 'model' (names), 'n_samples', 'short',
        'data_shape', 'model_shape' and 'checksums' (name -> SHA-256).
    config : None or dict
        Resolved run configuration.
    config_hash : None or str
    """
    def __init__(self, layout, files, config=None, config_hash=None, seed=None,
                 geometry=None, version=__version__):
        self.family = layout.family
        self.naming = layout.naming
        self.samples_per_file = layout.samples_per_file
        self.files = files
        self.config = config
        self.config_hash = config_hash
        self.seed = seed
        self.geometry = geometry
        self.version = version

    @property
    def n_samples(self):
        return sum(f['n_samples'] for f in self.files)

    def layout(self, root):
        return DatasetLayout(root, family=self.family, naming=self.naming,
                             samples_per_file=self.samples_per_file)

    def to_dict(self):
        return OrderedDict([('version', self.version), ('family', self.family),
                            ('naming', self.naming), ('samples_per_file', self.samples_per_file),
                            ('n_samples', self.n_samples), ('seed', self.seed),
                            ('config_hash', self.config_hash), ('config', self.config),
                            ('geometry', self.geometry), ('files', self.files)])

    def save(self, root):
        with open(os.path.join(root, MANIFEST_NAME), 'w') as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, root):
        filepath = os.path.join(root, MANIFEST_NAME)
        if not os.path.isfile(filepath):
            raise DatasetError("'{0}' has no {1}".format(root, MANIFEST_NAME))
        with open(filepath) as f:
            try:
                d = json.load(f)
            except ValueError as e:
                raise FormatError("'{0}': invalid manifest ({1})".format(filepath, e))
        layout = DatasetLayout(root, family=d['family'], naming=d['naming'],
                               samples_per_file=d['samples_per_file'])
        return cls(layout, d['files'], config=d.get('config'), config_hash=d.get('config_hash'),
                   seed=d.get('seed'), geometry=d.get('geometry'), version=d.get('version'))

    def __repr__(self):
        return "Manifest(family='{0}', naming='{1}', n_files={2}, n_samples={3})".format(
            self.family, self.naming, len(self.files), self.n_samples)


def config_digest(config):
    """SHA-256 of the canonical JSON form of a configuration dict.

    Examples
    --------
    >>> config_digest({'b': 1, 'a': [1, 2]}) == config_digest({'a': (1, 2), 'b': 1})
    True
    """
    blob = json.dumps(config, sort_keys=True)
    return hashlib.sha256(blob.encode('utf-8')).hexdigest()


def _chunks(samples, layout):
    """[(file index, n_layers, samples)] in sample order.

    With the fault naming a file holds a run of consecutive samples
    sharing their number of flat layers, and the index counts files
    across all layer counts, so scanning by index restores the input
    order.
    """
    size = layout.samples_per_file
    if layout.naming == 'velstyle':
        return [(i, None, samples[k:k + size]) for i, k in enumerate(range(0, len(samples), size))]
    chunks = []
    for s in samples:
        n_layers = s.vmap.n_layers
        if n_layers is None:
            raise ConfigError('the fault naming needs maps that know their number of flat layers')
        if chunks and chunks[-1][1] == n_layers and len(chunks[-1][2]) < size:
            chunks[-1][2].append(s)
        else:
            chunks.append((len(chunks), n_layers, [s]))
    return chunks


def pack_dataset(samples, layout, config=None, seed=None, geometry=None, verbose=False):
    """Write `samples` into `layout.root` and commit a manifest.

    Parameters
    ----------
    samples : sequence of Sample or (VelocityMap, SeismicGather)
    layout : DatasetLayout
    config : None or BaseParams or dict
        Resolved configuration recorded in the manifest.
    seed : None or int
    geometry : None or AcquisitionGeometry
    verbose : bool

    Returns
    -------
    manifest : Manifest
    """
    layout._check_packable()
    samples = [s if isinstance(s, Sample) else Sample(*s) for s in samples]
    if not samples:
        raise DatasetError('cannot pack an empty list of samples')
    if not os.path.isdir(layout.root):
        os.makedirs(layout.root)

    files = []
    for index, n_layers, chunk in _chunks(samples, layout):
        data_name, model_name = layout.file_names(index, n_layers)
        velocity = np.stack([s.vmap.values[np.newaxis] for s in chunk])
        seismic = np.stack([s.gather.traces for s in chunk])
        write_npy(velocity, layout.path(model_name))
        write_npy(seismic, layout.path(data_name))
        files.append(OrderedDict([
            ('data', data_name), ('model', model_name), ('n_samples', len(chunk)),
            ('short', len(chunk) < layout.samples_per_file),
            ('data_shape', list(seismic.shape)), ('model_shape', list(velocity.shape)),
            ('checksums', OrderedDict([(data_name, file_checksum(layout.path(data_name))),
                                       (model_name, file_checksum(layout.path(model_name)))])),
        ]))
        if verbose:
            print("Wrote {0} and {1} ({2} samples)".format(data_name, model_name, len(chunk)))

    config_hash = None
    if hasattr(config, 'params_hash'):
        config, config_hash = config.to_dict(), config.params_hash()
    elif config is not None:
        config_hash = config_digest(config)
    manifest = Manifest(layout, files, config=config, config_hash=config_hash, seed=seed,
                        geometry=geometry.to_dict() if geometry is not None else None)
    manifest.save(layout.root)
    return manifest


def verify_manifest(root):
    """Compare the checksums recorded in the manifest of `root` with
    the files on disk.

    Returns
    -------
    violations : list of (str, str)
        (file name, message) for every missing or altered file.
    """
    manifest = Manifest.load(root)
    violations = []
    for entry in manifest.files:
        for name, checksum in entry['checksums'].items():
            path = os.path.join(root, name)
            if not os.path.isfile(path):
                violations.append((name, 'file is missing'))
            elif file_checksum(path) != checksum:
                violations.append((name, 'checksum mismatch'))
    return violations


class PairLoader(object):
    """Restartable iterable over the (VelocityMap, SeismicGather)
    pairs of a dataset directory, in file order then batch order.

    Parameters
    ----------
    root : str
    layout : None or DatasetLayout
        Taken from the manifest if None, or, without manifest, from
        whichever naming has files in `root`.
    """
    def __init__(self, root, layout=None):
        self.root = root
        self.manifest = None
        if os.path.isfile(os.path.join(root, MANIFEST_NAME)):
            self.manifest = Manifest.load(root)
        if layout is None:
            layout = self.manifest.layout(root) if self.manifest else self._guess_layout(root)
        self.layout = layout
        self.pairs = layout.scan()
        geometry = (self.manifest.geometry if self.manifest else None) or {}
        self.dx = geometry.get('dx', 10.)
        self.dt = geometry.get('dt', 0.001)

    @staticmethod
    def _guess_layout(root):
        for naming in ('velstyle', 'fault'):
            layout = DatasetLayout(root, naming=naming)
            try:
                layout.scan()
            except DatasetError:
                continue
            return layout
        raise DatasetError("no dataset files in '{0}'".format(root))

    def maps(self):
        """Velocity maps only, without reading the seismic files."""
        for _, model_name in self.pairs:
            n_layers = n_layers_from_name(model_name)
            for values in read_npy(self.layout.path(model_name)):
                yield VelocityMap(values[0], dx=self.dx, n_layers=n_layers)

    def __iter__(self):
        for data_name, model_name in self.pairs:
            velocity = read_npy(self.layout.path(model_name))
            seismic = read_npy(self.layout.path(data_name))
            if len(velocity) != len(seismic):
                raise PairingError("'{0}' holds {1} samples but '{2}' holds {3}".format(
                    model_name, len(velocity), data_name, len(seismic)))
            n_layers = n_layers_from_name(model_name)
            for values, traces in zip(velocity, seismic):
                yield (VelocityMap(values[0], dx=self.dx, n_layers=n_layers),
                       SeismicGather(traces, dt=self.dt))

    def __len__(self):
        if self.manifest is not None:
            return self.manifest.n_samples
        return sum(len(read_npy(self.layout.path(m))) for _, m in self.pairs)


def load_pairs(root, layout=None):
    return PairLoader(root, layout)


def read_pair(data_path, model_path, dx=10., dt=0.001):
    """Yield the (VelocityMap, SeismicGather) samples of one
    data/model file pair outside any dataset directory."""
    for path in (data_path, model_path):
        if not os.path.isfile(path):
            raise PairingError("'{0}' does not exist".format(path))
    velocity = read_npy(model_path)
    seismic = read_npy(data_path)
    if len(velocity) != len(seismic):
        raise PairingError("'{0}' holds {1} samples but '{2}' holds {3}".format(
            model_path, len(velocity), data_path, len(seismic)))
    n_layers = n_layers_from_name(model_path)
    for values, traces in zip(velocity, seismic):
        yield VelocityMap(values[0], dx=dx, n_layers=n_layers), SeismicGather(traces, dt=dt)


class Violation(object):
    def __init__(self, filename, index, message):
        self.filename = filename
        self.index = index
        self.message = message

    def __str__(self):
        where = self.filename if self.index is None else "{0}[{1}]".format(self.filename, self.index)
        return "{0}: {1}".format(where, self.message)

    __repr__ = __str__


def validate_dataset(root, model_shape=(1,) + OPENFWI_SHAPE, data_shape=OPENFWI_GATHER_SHAPE,
                     vrange=OPENFWI_VRANGE):
    """Check checksums, per-sample shapes, finiteness and the
    velocity range of a packed dataset.

    Parameters
    ----------
    root : str
    model_shape, data_shape : None or tuple
        Expected per-sample shapes; not checked if None.
    vrange : None or (float, float)

    Returns
    -------
    violations : list of Violation
        Empty for a conforming dataset.
    """
    try:
        manifest = Manifest.load(root)
    except (DatasetError, FormatError) as e:
        return [Violation(MANIFEST_NAME, None, str(e))]
    violations = [Violation(name, None, msg) for name, msg in verify_manifest(root)]
    bad = set(v.filename for v in violations)
    for entry in manifest.files:
        arrays = {}
        for kind, expected in (('model', model_shape), ('data', data_shape)):
            name = entry[kind]
            if name in bad:
                continue
            try:
                array = read_npy(os.path.join(root, name))
            except FormatError as e:
                violations.append(Violation(name, None, str(e)))
                continue
            arrays[kind] = array
            if len(array) != entry['n_samples']:
                violations.append(Violation(name, None, "holds {0} samples, manifest says {1}"
                                            .format(len(array), entry['n_samples'])))
            if expected is not None and tuple(array.shape[1:]) != tuple(expected):
                violations.append(Violation(name, None, "sample shape {0} differs from {1}"
                                            .format(tuple(array.shape[1:]), tuple(expected))))
            for i in np.flatnonzero(~np.isfinite(array.reshape((len(array), -1))).all(axis=1)):
                violations.append(Violation(name, int(i), 'non-finite values'))
        if 'model' in arrays and vrange is not None:
            velocity = arrays['model'].reshape((len(arrays['model']), -1))
            for i, (lo, hi) in enumerate(zip(velocity.min(axis=1), velocity.max(axis=1))):
                if lo < vrange[0] or hi > vrange[1]:
                    violations.append(Violation(entry['model'], i, "velocities [{0:.1f}, {1:.1f}] leave {2}"
                                                .format(lo, hi, tuple(vrange))))
    return violations


if __name__ == '__main__':
    # run corresponding tests
    from fwiforge.utils.testing import run_tests
    run_tests(__file__)
