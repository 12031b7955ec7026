"""Command-line front end.

    python -m fwiforge generate --family flatvel-a --count 100 --seed 1 --out d/
    python -m fwiforge invert --dataset d/ --init smoothed --kernel 9 --out inv/
    python -m fwiforge invert --pair d/data1.npy d/model1.npy --init linear --out inv/
    python -m fwiforge analyze d1/ d2/ --out report/
    python -m fwiforge validate d/

Exit codes: 0 success, 1 runtime error, 2 usage or configuration error.
"""
import os
import sys
import json
import argparse
from functools import partial

import numpy as np
import pandas as pd

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .complexity import (ENTROPY_BIN_WIDTH, GSI_EPS, ComplexityReport, calibrate_bin_width,
                         complexity_table, ordering_report)
from .exceptions import ConfigError, FwiForgeError
from .fwi import InversionConfig, get_initial_map, multiscale_fwi
from .grid import AcquisitionGeometry
from .metrics import evaluate_maps
from .synth import PRESETS, get_preset, synthesize_batch
from .utils import JOBS_ENV_VAR, Stopwatch, default_n_jobs, parallel_map, print_inline
from .utils.dataset import (MANIFEST_NAME, DatasetLayout, Manifest, Sample, config_digest, load_pairs,
                            pack_dataset, read_pair, validate_dataset)
from .utils.read_write import file_checksum, write_npy
from .wave import forward_model


EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# flag name -> AcquisitionGeometry parameter
GEOMETRY_FLAGS = (('nbc', 'nbc'), ('nt_sim', 'nt_sim'), ('nt_stored', 'nt_stored'),
                  ('freq', 'source_freq'), ('dt', 'dt'), ('source_gain', 'source_gain'))


class UsageError(FwiForgeError):
    """Bad command-line input detected after argument parsing."""


def load_config(filepath):
    """Read a TOML or JSON run configuration.

    Recognized top-level keys are the long flag names of the
    subcommand (with underscores) plus the sections 'generator',
    'geometry' and 'inversion', passed as keyword arguments to
    GeneratorConfig, AcquisitionGeometry and InversionConfig.
    """
    if not os.path.isfile(filepath):
        raise UsageError("config file '{0}' does not exist".format(filepath))
    ext = os.path.splitext(filepath)[1].lower()
    if ext == '.toml':
        with open(filepath, 'rb') as f:
            try:
                return tomllib.load(f)
            except tomllib.TOMLDecodeError as e:
                raise ConfigError("'{0}': {1}".format(filepath, e))
    if ext == '.json':
        with open(filepath) as f:
            try:
                return json.load(f)
            except ValueError as e:
                raise ConfigError("'{0}': {1}".format(filepath, e))
    raise UsageError("config file must end in .toml or .json, got '{0}'".format(filepath))


def _resolve(args, file_config, name, default=None):
    """Flag value, else config file value, else `default`."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    return file_config.get(name, default)


def _n_jobs(args, file_config):
    n_jobs = _resolve(args, file_config, 'jobs')
    return default_n_jobs() if n_jobs is None else max(1, int(n_jobs))


def _cutoffs(text):
    try:
        return tuple(float(c) for c in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated frequencies, got '{0}'".format(text))


def _check_dir(path):
    if not os.path.isdir(path):
        raise UsageError("dataset directory '{0}' does not exist".format(path))


def _simulate(geom, vmap):
    return forward_model(vmap, geom)


def cmd_generate(args):
    file_config = load_config(args.config) if args.config else {}
    verbose = not args.quiet
    family = _resolve(args, file_config, 'family', 'flatvel-a')
    count = int(_resolve(args, file_config, 'count', 10))
    seed = int(_resolve(args, file_config, 'seed', 0))
    samples_per_file = int(_resolve(args, file_config, 'samples_per_file', 500))
    n_jobs = _n_jobs(args, file_config)
    if family not in PRESETS:
        raise UsageError("invalid family '{0}'; expected one of {1}".format(family, sorted(PRESETS)))

    generator_params = dict(file_config.get('generator', {}))
    for name in ('nz', 'nx'):
        if getattr(args, name) is not None:
            generator_params[name] = getattr(args, name)
    generator_params['seed'] = seed
    gen_config = get_preset(family, **generator_params)

    geometry_params = dict(file_config.get('geometry', {}))
    for flag, param in GEOMETRY_FLAGS:
        if getattr(args, flag) is not None:
            geometry_params[param] = getattr(args, flag)
    geometry_params['dx'] = gen_config.dx
    if 'source_positions' in geometry_params or 'receiver_positions' in geometry_params:
        geom = AcquisitionGeometry(**geometry_params)
    else:
        ns = geometry_params.pop('ns', 5)
        geom = AcquisitionGeometry.surface(gen_config.nx, ns=ns, **geometry_params)

    maps = synthesize_batch(gen_config, count, n_jobs=n_jobs, verbose=verbose)
    if verbose:
        print_inline("Simulating {0} x {1} shots ... ".format(count, geom.ns))
    with Stopwatch() as timer:
        gathers = parallel_map(partial(_simulate, geom), maps, n_jobs=n_jobs)
    if verbose:
        print_inline(timer.throughput(count * geom.ns, 'shots') + "\n")

    layout = DatasetLayout(args.out, family=gen_config.family, samples_per_file=samples_per_file)
    resolved = {'command': 'generate', 'family': family, 'count': count, 'seed': seed,
                'samples_per_file': samples_per_file, 'generator': gen_config.to_dict(),
                'geometry': geom.to_dict()}
    manifest = pack_dataset([Sample(m, g) for m, g in zip(maps, gathers)], layout,
                            config=resolved, seed=seed, geometry=geom)
    if verbose:
        short = [f['model'] for f in manifest.files if f['short']]
        print("Wrote {0} samples in {1} file pairs to '{2}'{3}".format(
            manifest.n_samples, len(manifest.files), args.out,
            " (short: {0})".format(', '.join(short)) if short else ''))
    return EXIT_OK


def _dataset_geometry(loader):
    if loader.manifest is not None and loader.manifest.geometry:
        return AcquisitionGeometry(**loader.manifest.geometry)
    return AcquisitionGeometry.openfwi(dx=loader.dx, dt=loader.dt)


def _invert_source(args):
    """Samples to invert and the acquisition that recorded them."""
    if args.pair is not None:
        data_path, model_path = args.pair
        for path in args.pair:
            if not os.path.isfile(path):
                raise UsageError("file '{0}' does not exist".format(path))
        root = os.path.dirname(os.path.abspath(model_path))
        if os.path.isfile(os.path.join(root, MANIFEST_NAME)):
            geometry = Manifest.load(root).geometry or {}
        else:
            geometry = {}
        samples = list(read_pair(data_path, model_path, dx=geometry.get('dx', 10.),
                                 dt=geometry.get('dt', 0.001)))
        if not samples:
            raise UsageError("no samples in '{0}'".format(model_path))
        if geometry:
            return samples, AcquisitionGeometry(**geometry)
        return samples, AcquisitionGeometry.openfwi(nx=samples[0][0].nx)
    _check_dir(args.dataset)
    loader = load_pairs(args.dataset)
    return loader, _dataset_geometry(loader)


def cmd_invert(args):
    if (args.dataset is None) == (args.pair is None):
        raise UsageError('expected exactly one of --dataset and --pair')
    source_name = args.dataset or args.pair[1]
    file_config = load_config(args.config) if args.config else {}
    verbose = not args.quiet
    n_jobs = _n_jobs(args, file_config)
    init = _resolve(args, file_config, 'init', 'smoothed')
    limit = _resolve(args, file_config, 'limit')

    inversion_params = dict(file_config.get('inversion', {}))
    cutoffs = _resolve(args, file_config, 'cutoffs')
    if cutoffs is not None:
        inversion_params['cutoffs'] = cutoffs
    if args.max_iters is not None:
        inversion_params['max_iters_per_stage'] = args.max_iters
    config = InversionConfig(**inversion_params)

    if init == 'smoothed':
        init_params = {'kernel': int(_resolve(args, file_config, 'kernel', 9))}
    elif init == 'linear':
        init_params = {'vtop': float(_resolve(args, file_config, 'vtop', config.bounds[0])),
                       'vbottom': float(_resolve(args, file_config, 'vbottom', config.bounds[1]))}
    else:
        init_params = {}

    samples, geom = _invert_source(args)
    if not os.path.isdir(args.out):
        os.makedirs(args.out)

    frames, rows, inverted = [], [], []
    for i, (truth, gather) in enumerate(samples):
        if limit is not None and i >= int(limit):
            break
        map0 = get_initial_map(init, truth, **init_params)
        if verbose:
            print("Sample {0}: {1} initial map".format(i, init))
        vmap, trace = multiscale_fwi(map0, gather, geom, config=config, n_jobs=n_jobs, verbose=verbose)
        before, after = evaluate_maps(map0, truth), evaluate_maps(vmap, truth)
        frame = trace.to_frame()
        frame.insert(0, 'sample', i)
        frames.append(frame)
        row = {'sample': i}
        row.update({'initial_' + k: v for k, v in before.as_dict().items()})
        row.update(after.as_dict())
        rows.append(row)
        inverted.append(vmap.values[np.newaxis])
        if verbose:
            print("Sample {0}: SSIM {1:.4f} -> {2:.4f}, MAE {3:.4f} -> {4:.4f}".format(
                i, before.ssim, after.ssim, before.mae, after.mae))
    if not rows:
        raise UsageError("no samples to invert in '{0}'".format(source_name))

    pd.concat(frames, ignore_index=True).to_csv(os.path.join(args.out, 'trace.csv'), index=False)
    metrics = pd.DataFrame(rows).set_index('sample')
    metrics.loc['mean'] = metrics.mean(axis=0)
    metrics.to_csv(os.path.join(args.out, 'metrics.csv'))
    inverted_path = os.path.join(args.out, 'inverted.npy')
    write_npy(np.stack(inverted), inverted_path)

    resolved = {'command': 'invert', 'dataset': args.dataset, 'pair': args.pair, 'init': init,
                'init_params': init_params, 'limit': limit, 'inversion': config.to_dict(), 'geometry': geom.to_dict()}
    manifest = {'version': __version__, 'config_hash': config_digest(resolved), 'config': resolved,
                'n_samples': len(rows), 'files': {'inverted.npy': file_checksum(inverted_path)}}
    with open(os.path.join(args.out, MANIFEST_NAME), 'w') as f:
        json.dump(manifest, f, indent=2)
    if verbose:
        mean = metrics.loc['mean']
        print("Mean over {0} samples: SSIM {1:.4f} -> {2:.4f}, MAE {3:.4f} -> {4:.4f}, RMSE {5:.4f} -> {6:.4f}"
              .format(len(rows), mean['initial_ssim'], mean['ssim'], mean['initial_mae'], mean['mae'],
                      mean['initial_rmse'], mean['rmse']))
    return EXIT_OK


def cmd_analyze(args):
    for path in args.datasets:
        _check_dir(path)
    verbose = not args.quiet
    if not os.path.isdir(args.out):
        os.makedirs(args.out)

    tables, reports = [], {}
    for path in args.datasets:
        name = os.path.basename(os.path.normpath(path))
        maps = list(load_pairs(path).maps())
        if args.calibrate:
            width, _ = calibrate_bin_width(maps)
            if verbose:
                print("{0}: best entropy bin width {1} m/s".format(name, width))
        table = complexity_table(maps, eps=args.eps, bin_width=args.bin_width)
        report = ComplexityReport(si_mean=float(table['si'].mean()), gsi=float(table['gsi'].mean()),
                                  entropy=float(table['entropy'].mean()), n_maps=len(table))
        reports[name] = report
        mean_row = {'map_id': 'mean', 'si': report.si_mean, 'gsi': report.gsi, 'entropy': report.entropy}
        table = pd.concat([table, pd.DataFrame([mean_row])], ignore_index=True)
        table.insert(0, 'dataset', name)
        tables.append(table)
        if verbose:
            print("[{0}]\n{1}".format(name, report.to_text()))

    pd.concat(tables, ignore_index=True).to_csv(os.path.join(args.out, 'complexity.csv'), index=False)
    if len(reports) > 1:
        ordering = ordering_report(reports)
        ordering.to_csv(os.path.join(args.out, 'ordering.csv'))
        if verbose:
            print(ordering.to_string())
    return EXIT_OK


def cmd_validate(args):
    _check_dir(args.dataset)
    if args.any_shape:
        violations = validate_dataset(args.dataset, model_shape=None, data_shape=None)
    else:
        violations = validate_dataset(args.dataset)
    for v in violations:
        print(v)
    if violations:
        print("{0} violation(s) in '{1}'".format(len(violations), args.dataset))
        return EXIT_FAILURE
    if not args.quiet:
        print("'{0}' is valid".format(args.dataset))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='fwiforge',
                                     description='Synthesize, simulate, invert and analyze '
                                                 'OpenFWI-style velocity datasets.')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    subparsers = parser.add_subparsers(dest='command')
    subparsers.required = True

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--quiet', action='store_true', help='suppress progress output')

    jobs = argparse.ArgumentParser(add_help=False)
    jobs.add_argument('--jobs', type=int, default=None,
                      help="worker processes (default: ${0} or 1)".format(JOBS_ENV_VAR))
    jobs.add_argument('--config', default=None, help='TOML or JSON run configuration')

    p = subparsers.add_parser('generate', parents=[common, jobs], help='synthesize and simulate a dataset')
    p.add_argument('--family', choices=sorted(PRESETS), default=None)
    p.add_argument('--count', type=int, default=None)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--out', required=True, help='output dataset directory')
    p.add_argument('--samples-per-file', dest='samples_per_file', type=int, default=None)
    p.add_argument('--nz', type=int, default=None)
    p.add_argument('--nx', type=int, default=None)
    p.add_argument('--nbc', type=int, default=None)
    p.add_argument('--nt-sim', dest='nt_sim', type=int, default=None)
    p.add_argument('--nt-stored', dest='nt_stored', type=int, default=None)
    p.add_argument('--freq', type=float, default=None, help='source peak frequency in Hz')
    p.add_argument('--dt', type=float, default=None)
    p.add_argument('--source-gain', dest='source_gain', type=float, default=None)
    p.set_defaults(func=cmd_generate)

    p = subparsers.add_parser('invert', parents=[common, jobs], help='multi-scale FWI of a dataset')
    p.add_argument('--dataset', default=None, help='dataset directory')
    p.add_argument('--pair', nargs=2, default=None, metavar=('DATA', 'MODEL'),
                   help='a single data/model file pair instead of a dataset directory')
    p.add_argument('--init', choices=('homogeneous', 'linear', 'smoothed'), default=None)
    p.add_argument('--kernel', type=int, default=None, help='mean filter size of the smoothed initial map')
    p.add_argument('--vtop', type=float, default=None)
    p.add_argument('--vbottom', type=float, default=None)
    p.add_argument('--cutoffs', type=_cutoffs, default=None, help='comma-separated low-pass cutoffs in Hz')
    p.add_argument('--max-iters', dest='max_iters', type=int, default=None)
    p.add_argument('--limit', type=int, default=None, help='invert only the first LIMIT samples')
    p.add_argument('--out', required=True)
    p.set_defaults(func=cmd_invert)

    p = subparsers.add_parser('analyze', parents=[common], help='complexity metrics of datasets')
    p.add_argument('datasets', nargs='+')
    p.add_argument('--out', default='.')
    p.add_argument('--bin-width', dest='bin_width', type=float, default=ENTROPY_BIN_WIDTH)
    p.add_argument('--eps', type=float, default=GSI_EPS)
    p.add_argument('--calibrate', action='store_true', help='report the entropy bin width closest to 2.30 bits')
    p.set_defaults(func=cmd_analyze)

    p = subparsers.add_parser('validate', parents=[common], help='check a packed dataset')
    p.add_argument('dataset')
    p.add_argument('--any-shape', dest='any_shape', action='store_true',
                   help='skip the 70x70 / 5x1000x70 shape checks')
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code
    try:
        return args.func(args)
    except (UsageError, ConfigError) as e:
        sys.stderr.write("fwiforge {0}: error: {1}\n".format(args.command, e))
        return EXIT_USAGE
    except (FwiForgeError, ValueError, OSError) as e:
        sys.stderr.write("fwiforge {0}: {1}: {2}\n".format(args.command, e.__class__.__name__, e))
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
