# Look at the very bottom of this file

import sys

from fwiforge.cli import main as cli_main
from fwiforge.complexity import (calibrate_bin_width, complexity_report,
                                 ordering_report)
from fwiforge.fwi import InversionConfig, get_initial_map, multiscale_fwi
from fwiforge.grid import AcquisitionGeometry
from fwiforge.metrics import evaluate_maps, reports_table
from fwiforge.synth import PRESETS, get_preset, synthesize_batch
from fwiforge.utils import Stopwatch, default_n_jobs, print_inline
from fwiforge.wave import forward_model


def complexity_orderings(count=100, seed=1337):
    """
    Mean SI, GSI and entropy of `count` freshly generated maps of
    every family, with the rank of each family per metric.
    """
    print("Running 'complexity_orderings'")
    reports = {}
    for name in sorted(PRESETS):
        print_inline("Generating {0} ... ".format(name))
        with Stopwatch(verbose=True):
            maps = synthesize_batch(get_preset(name, seed=seed), count, n_jobs=default_n_jobs())
        reports[name] = complexity_report(maps)
    print(ordering_report(reports).to_string())

    width, sweep = calibrate_bin_width(synthesize_batch(get_preset('flatvel-a', seed=seed), count))
    print("\nEntropy bin width closest to the FlatVel-A reference: {0} m/s".format(width))
    print(sweep.to_string(index=False))
    print("Left 'complexity_orderings'")


def flatvel_fwi(count=4, init='linear', seed=1337):
    """
    Multi-scale inversion of `count` FlatVel-A maps from the given
    initial map, reporting MAE, RMSE and SSIM before and after.
    """
    print("Running 'flatvel_fwi'")
    n_jobs = default_n_jobs()
    geom = AcquisitionGeometry.openfwi()
    config = InversionConfig()
    maps = synthesize_batch(get_preset('flatvel-a', seed=seed), count)

    before, after = [], []
    for i, truth in enumerate(maps):
        print_inline("Simulating map {0} ... ".format(i))
        with Stopwatch(verbose=True):
            obs = forward_model(truth, geom, n_jobs=n_jobs)
        map0 = get_initial_map(init, truth)
        vmap, trace = multiscale_fwi(map0, obs, geom, config=config, n_jobs=n_jobs, verbose=True)
        before.append(evaluate_maps(map0, truth))
        after.append(evaluate_maps(vmap, truth))

    print("\nInitial maps:\n{0}".format(reports_table(before).to_string()))
    print("\nInverted maps:\n{0}".format(reports_table(after).to_string()))
    print("Left 'flatvel_fwi'")


def initial_maps(seed=1337):
    """
    Compare the three initial-map recipes on one CurveVel-A map
    with a shortened cutoff schedule.
    """
    print("Running 'initial_maps'")
    n_jobs = default_n_jobs()
    geom = AcquisitionGeometry.openfwi()
    config = InversionConfig(cutoffs=(3., 10., 20.), max_iters_per_stage=10)
    truth = synthesize_batch(get_preset('curvevel-a', seed=seed), 1)[0]
    obs = forward_model(truth, geom, n_jobs=n_jobs)
    for init in ('homogeneous', 'linear', 'smoothed'):
        map0 = get_initial_map(init, truth)
        vmap, _ = multiscale_fwi(map0, obs, geom, config=config, n_jobs=n_jobs)
        print("{0:<12} SSIM {1:.4f} -> {2:.4f}".format(
            init, evaluate_maps(map0, truth).ssim, evaluate_maps(vmap, truth).ssim))
    print("Left 'initial_maps'")


if __name__ == '__main__':
    # with arguments: `python main.py generate ...` etc.
    if len(sys.argv) > 1:
        sys.exit(cli_main(sys.argv[1:]))

    # Uncomment what to run:
    # ----------------------
    # complexity_orderings()
    # flatvel_fwi(init='linear')
    # flatvel_fwi(init='smoothed')
    # initial_maps()
    pass
