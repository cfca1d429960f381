"""Command-line entry point: ``losdof <subcommand> --config scenario.toml``.

Exit codes: 0 success, 1 config error, 2 numerical failure, 3 validity violation.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

from .errors import ConfigError, NumericalFailureError, ParaxialViolationError
from .experiments import (emit_plotdata, landau_regression, load_scenario, point_setup,
                          run_scenario)
from .geometry import measure
from .kernels import kernel_constants
from .landau import (ConcentrationSpec, concentration_eigs, crossing_count, dof_estimate,
                     dof_los_paraxial, dof_nlos_isotropic_1d, landau_dof_sigma,
                     los_wavenumber_measures, paraxial_margin, paraxial_margins)
from .sampling import (isotropic_support_measure, nyquist_density_los, rayleigh_product,
                       symmetric_spacing)
from .spectra import build_channel_matrix, eigen_spectrum, empirical_dof, write_spectrum_csv

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_VALIDITY = 0, 1, 2, 3

log = logging.getLogger("losdof")


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _scenario(args, required=True):
    if args.config is None:
        if required:
            raise ConfigError("--config is required")
        return None
    scenario = load_scenario(args.config)
    if args.sigma:
        scenario = scenario.with_sigmas(args.sigma)
    return scenario


def _emit(obj):
    print(json.dumps(obj, indent=2, sort_keys=True))


def cmd_dof(args):
    scenario = _scenario(args)
    out = []
    for value in scenario.points:
        link = point_setup(scenario, value).link
        entry = {
            "value": value,
            "wavelength_m": link.wavelength,
            "distance_m": link.distance,
            "closed_form_dof": dof_los_paraxial(link),
            "wavenumber_measures": dict(zip(("receive", "source"),
                                            los_wavenumber_measures(link))),
            "landau_corrected": {repr(s): dof_estimate(link, s).landau_corrected
                                 for s in scenario.sigmas},
        }
        if link.n == 1:
            entry["nlos_isotropic_dof"] = dof_nlos_isotropic_1d(
                link.source.extents[0], link.receive.extents[0], link.wavelength)
        out.append(entry)
    _emit({"points": out})
    return EXIT_OK


def cmd_spectrum(args):
    scenario = _scenario(args)
    setup = point_setup(scenario, None)
    H = build_channel_matrix(setup.link, setup.source_grid, setup.receive_grid,
                             scenario.kernel, override_paraxial=args.override_paraxial)
    spec = eigen_spectrum(H, scenario.normalizer)
    dof = dof_los_paraxial(setup.link)
    result = {
        "closed_form_dof": dof,
        "empirical_dof": {repr(s): empirical_dof(spec, s) for s in scenario.sigmas},
        "N_r": H.rows,
        "N_s": H.cols,
        "kernel": scenario.kernel,
        "top_eigenvalues_normalized": [float(x) for x in spec.normalized[:8]],
    }
    if args.out:
        from pathlib import Path
        Path(args.out).mkdir(parents=True, exist_ok=True)
        path = Path(args.out) / "spectrum.csv"
        write_spectrum_csv(spec, path, dof)
        result["spectrum_file"] = str(path)
    _emit(result)
    return EXIT_OK


def cmd_sweep(args):
    scenario = _scenario(args)
    report = run_scenario(scenario, out_dir=args.out,
                          override_paraxial=args.override_paraxial, jobs=args.jobs)
    if report.out_dir:
        emit_plotdata(report)
    _emit({"records": report.records, "config_hash": report.metadata["config_hash"]})
    if report.failed:
        log.error("%d sweep point(s) failed", len(report.failed))
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_landau(args):
    scenario = _scenario(args, required=False)
    if scenario is not None and scenario.sweep_axis == "T":
        Ts, B, grid = scenario.sweep_values, scenario.bandwidth_hz, scenario.grid_points
        sigmas = scenario.sigmas
    else:
        Ts, B, grid = args.T, args.B, args.grid_points
        sigmas = args.sigma or [0.5, 0.1]
    records = []
    for T in Ts:
        floor = ConcentrationSpec(T, B).min_grid_points
        cspec = ConcentrationSpec(T, B, None if grid is None else max(int(grid), floor))
        spec = concentration_eigs(cspec)
        dof = cspec.time_bandwidth
        records.append({
            "value": T,
            "2BT": dof,
            "closed_form_dof": dof,
            "grid_points": cspec.grid_points,
            "empirical_dof": {repr(s): empirical_dof(spec, s) for s in sigmas},
            "crossing_count": {repr(s): crossing_count(spec, s) for s in sigmas},
            "landau_corrected": {repr(s): landau_dof_sigma(dof, s, math.log(T))
                                 for s in sigmas},
        })
    _emit({
        "B": B,
        "points": records,
        "regression_slope": {repr(s): landau_regression(records, s) for s in sigmas},
        "regression_slope_crossing": {repr(s): landau_regression(records, s, "crossing_count")
                                      for s in sigmas},
        "predicted_slope": {repr(s): landau_dof_sigma(0.0, s, 1.0) for s in sigmas},
    })
    return EXIT_OK


def cmd_sampling(args):
    scenario = _scenario(args)
    out = []
    for value in scenario.points:
        setup = point_setup(scenario, value)
        link = setup.link
        n_max = max(setup.source_grid.size, setup.receive_grid.size)
        entry = {
            "value": value,
            "nyquist_density_los_receive": nyquist_density_los(link, "receive"),
            "nyquist_density_los_source": nyquist_density_los(link, "source"),
            "nyquist_density_nlos_isotropic": isotropic_support_measure(link.wavelength, link.n),
            "N_max": n_max,
            "rayleigh_product_m2": rayleigh_product(link, n_max),
            "symmetric_rayleigh_spacing_m": symmetric_spacing(link, n_max),
            "spacing_split": "symmetric (convention)",
        }
        if n_max >= 2:
            entry["aliasing_limit_product_m2"] = rayleigh_product(link, n_max, True)
        out.append(entry)
    _emit({"points": out})
    return EXIT_OK


def cmd_validate(args):
    scenario = _scenario(args)
    out, worst = [], math.inf
    for value in scenario.points:
        link = point_setup(scenario, value).link
        m = paraxial_margins(link)
        worst = min(worst, m["paraxial"] - 1.0)
        out.append({"value": value, **m,
                    "margin": paraxial_margin(link, args.concentration_factor),
                    "measure_source": measure(link.source),
                    "measure_receive": measure(link.receive),
                    "omitted_constants": {k: str(v) for k, v in kernel_constants(link).items()}})
    _emit({"points": out, "concentration_factor": args.concentration_factor})
    if worst < 0 and not args.override_paraxial:
        return EXIT_VALIDITY
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario TOML file")
    common.add_argument("--out", help="output directory")
    common.add_argument("--override-paraxial", action="store_true",
                        help="allow paraxial kernels outside their validity region")
    common.add_argument("--sigma", type=_float_list, help="comma-separated accuracy levels")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="losdof", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dof", parents=[common], help="closed-form DOF").set_defaults(func=cmd_dof)
    sub.add_parser("spectrum", parents=[common],
                   help="single-point eigen analysis").set_defaults(func=cmd_spectrum)
    p = sub.add_parser("sweep", parents=[common], help="run a parameter sweep")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("landau", parents=[common], help="concentration-operator study")
    p.add_argument("--T", type=_float_list, default=[1.0, 3.0, 5.0, 10.0])
    p.add_argument("--B", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=512)
    p.set_defaults(func=cmd_landau)
    sub.add_parser("sampling", parents=[common],
                   help="Nyquist densities and Rayleigh spacing").set_defaults(func=cmd_sampling)
    p = sub.add_parser("validate", parents=[common], help="paraxial validity margins")
    p.add_argument("--concentration-factor", type=float, default=1.0)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except ParaxialViolationError as exc:
        log.error("validity violation: %s", exc)
        return EXIT_VALIDITY
    except NumericalFailureError as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
