"""Command-line front end.

Exit codes: 0 on success, 1 for usage problems, 2 for invalid system
descriptions or data files, 3 when a computation fails numerically.
Results go to standard output or --out files; diagnostics to the error
stream.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .calibration import (
    FitParameter,
    FitProblem,
    export_fit_result,
    fit_parameters,
    synthesize_dataset,
)
from .csvio import (
    read_diameter_csv,
    read_map_csv,
    write_branches_csv,
    write_map_csv,
    write_spectrum_csv,
    write_trajectory_csv,
)
from .errors import NumericError, SpecError
from .model import assemble_hamiltonian, build_system
from .modes import (
    DARK_FRACTION_THRESHOLD,
    MIXED_FRACTION_WINDOW,
    dark_mode_report,
    track_branches,
    transduction_bandwidth,
)
from .specfile import bundled_spec_names, load_spec, resolve_spec_path
from .spectra import SweepGrid, sweep
from .timedomain import evolve, ringdown_spectrum

# Free parameters without explicit bounds get this halfwidth: half the
# start magnitude, floored at one natural unit.
DEFAULT_BOUND_FRACTION = 0.5
DEFAULT_BOUND_MINIMUM = 1.0


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_range(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(
            f"range must be start:stop:count, got {text!r}"
        )
    try:
        start, stop = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed range {text!r}") from None
    if count < 2:
        raise argparse.ArgumentTypeError("range count must be at least 2")
    if not stop > start:
        raise argparse.ArgumentTypeError("range stop must exceed start")
    return np.linspace(start, stop, count)


def _parse_bounds(text: str):
    head, sep, hi = text.rpartition(":")
    path, sep2, lo = head.rpartition(":")
    if not sep or not sep2 or not path:
        raise argparse.ArgumentTypeError(f"expected path:lower:upper, got {text!r}")
    try:
        return path, float(lo), float(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed bounds in {text!r}") from None


def _parse_free(text: str):
    paths = [p.strip() for p in text.split(",")]
    if not all(paths):
        raise argparse.ArgumentTypeError(f"empty entry in free-parameter list {text!r}")
    return paths


def _parse_amplitude(text: str):
    label, sep, value = text.partition("=")
    if not sep or not label:
        raise argparse.ArgumentTypeError(f"expected label=value, got {text!r}")
    try:
        return label, complex(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed amplitude {value!r}") from None


def _load_system(args):
    return build_system(load_spec(resolve_spec_path(args.spec)))


def _ports(args, system):
    drive = args.drive or system.default_port()
    readout = getattr(args, "readout", None) or drive
    return drive, readout


def _add_spec_option(parser):
    parser.add_argument(
        "--spec",
        required=True,
        help="system description file, or the name of a bundled one",
    )


def _add_port_options(parser, with_total=True):
    parser.add_argument("--drive", help="driven mode label (default: first port)")
    parser.add_argument("--readout", help="readout mode label (default: drive)")
    if with_total:
        parser.add_argument(
            "--total",
            action="store_true",
            help="sum weighted responses over every readout port",
        )


def cmd_sweep(args):
    system = _load_system(args)
    drive, readout = _ports(args, system)
    grid = SweepGrid(field_values=args.b, probe_frequencies=args.f)
    spectrum = sweep(system, grid, drive=drive, readout=readout, use_total=args.total)
    write_map_csv(args.out, spectrum)
    if args.plot:
        from .plotting import save_map_figure

        save_map_figure(args.plot, spectrum)
    return 0


def cmd_modes(args):
    system = _load_system(args)
    report = dark_mode_report(
        assemble_hamiltonian(system, args.b), threshold=args.threshold
    )
    lines = []
    lo, hi = MIXED_FRACTION_WINDOW
    mixed = [m for m in report.modes if lo <= m.photon_fraction <= hi]
    if len(mixed) >= 2:
        gap = (mixed[-1].frequency_ghz - mixed[0].frequency_ghz) * 1e3
        lines.append("# splitting_mhz %.9g" % gap)
    lines.append("freq_ghz,linewidth_mhz,photon_fraction,dark")
    for mode, dark in zip(report.modes, report.dark_flags):
        lines.append(
            "%.9g,%.9g,%.9g,%d"
            % (mode.frequency_ghz, mode.linewidth_mhz, mode.photon_fraction, dark)
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_branches(args):
    system = _load_system(args)
    branches = track_branches(system, args.b)
    write_branches_csv(args.out, branches)
    if args.plot:
        from .plotting import save_branches_figure

        save_branches_figure(args.plot, branches)
    return 0


def cmd_fit(args):
    spec = load_spec(resolve_spec_path(args.spec))
    system = build_system(spec)
    drive, readout = _ports(args, system)
    data = read_map_csv(args.data)

    from .calibration import get_parameter

    explicit = {path: (lo, hi) for path, lo, hi in args.bounds or []}
    unknown = set(explicit) - set(args.free)
    if unknown:
        raise UsageError(
            "bounds given for non-free parameters: " + ", ".join(sorted(unknown))
        )
    parameters = []
    for path in args.free:
        if path in explicit:
            lo, hi = explicit[path]
        else:
            value = get_parameter(spec, path)
            half = max(DEFAULT_BOUND_FRACTION * abs(value), DEFAULT_BOUND_MINIMUM)
            lo, hi = value - half, value + half
        parameters.append(FitParameter(path=path, lower=lo, upper=hi))

    problem = FitProblem(
        base_spec=spec,
        data=data,
        parameters=tuple(parameters),
        drive=drive,
        readout=readout,
        use_total=args.total,
        space=args.space,
    )
    result = fit_parameters(problem, max_restarts=args.restarts, seed=args.seed)
    document = export_fit_result(result)
    sys.stdout.write(document)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(document)
    if args.plot:
        from .plotting import save_map_figure

        fitted = sweep(
            build_system(result.fitted_spec),
            data.grid,
            drive=drive,
            readout=readout,
            use_total=args.total,
        )
        save_map_figure(args.plot, fitted, title="fitted model")
    return 0


def cmd_evolve(args):
    system = _load_system(args)
    hamiltonian = assemble_hamiltonian(system, args.b)
    initial = np.zeros(hamiltonian.dim, dtype=complex)
    for label, value in args.initial:
        initial[hamiltonian.index_of(label)] = value
    trajectory = evolve(
        hamiltonian,
        initial,
        t_span_ns=args.t_span,
        step_ns=args.step,
        reference_ghz=args.reference,
    )
    write_trajectory_csv(args.out, trajectory)
    if args.spectrum:
        readout = args.readout or system.default_port()
        freqs, power = ringdown_spectrum(trajectory, readout)
        write_spectrum_csv(args.spectrum, freqs, power)
    if args.plot:
        from .plotting import save_trajectory_figure

        save_trajectory_figure(args.plot, trajectory)
    return 0


def cmd_bandwidth(args):
    system = _load_system(args)
    drive = args.drive
    if drive is None:
        if system.n_magnon == 0:
            raise SpecError("bandwidth needs a magnon drive mode")
        drive = system.labels[system.magnon_indices[0]]
    readout = args.readout or system.default_port()
    result = transduction_bandwidth(
        system, drive=drive, readout=readout, field_values=args.b
    )
    sys.stdout.write("bandwidth_mhz %.9g\n" % result.bandwidth_mhz)
    sys.stdout.write("field_window_tesla %.9g %.9g\n" % tuple(result.field_window))
    sys.stdout.write("peak_efficiency %.9g\n" % result.peak_efficiency)
    if args.out:
        lines = ["b_tesla,tuned_freq_ghz,efficiency"]
        for b, f, e in zip(
            result.field_values, result.tuned_frequencies_ghz, result.efficiencies
        ):
            lines.append("%.9g,%.9g,%.9g" % (b, f, e))
        with open(args.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    if args.plot:
        from .plotting import save_bandwidth_figure

        save_bandwidth_figure(args.plot, result)
    return 0


def cmd_size_predict(args):
    from .size_effects import offset_field, params_for_cavity, predicted_b_fh

    params = params_for_cavity(
        args.frequency,
        saturation_magnetization_mt=args.magnetization,
        relative_permittivity=args.permittivity,
        zero_diameter_offset_mt=args.base_offset,
    )
    offset = offset_field(args.diameter, params)
    b_fh = predicted_b_fh(args.diameter, args.frequency, args.gyro, params)
    sys.stdout.write("offset_mt %.9g\n" % offset)
    sys.stdout.write("b_fh_tesla %.9g\n" % b_fh)
    return 0


def cmd_size_fit(args):
    from .size_effects import fit_size_effect

    samples = read_diameter_csv(args.data)
    fit = fit_size_effect(
        samples,
        cavity_frequency_ghz=args.frequency,
        gyromagnetic_ghz_per_t=args.gyro,
        saturation_magnetization_mt=args.magnetization,
    )
    sys.stdout.write(
        "slope_mt_per_mm2 %.9g +/- %.9g\n" % (fit.slope_mt_per_mm2, fit.slope_sigma)
    )
    sys.stdout.write(
        "b0_mt %.9g +/- %.9g\n"
        % (fit.zero_diameter_offset_mt, fit.zero_diameter_offset_sigma)
    )
    sys.stdout.write(
        "permittivity %.9g +/- %.9g\n" % (fit.permittivity, fit.permittivity_sigma)
    )
    if args.plot:
        from .plotting import save_size_fit_figure

        save_size_fit_figure(args.plot, samples, fit)
    return 0


def cmd_synth(args):
    system = _load_system(args)
    drive, readout = _ports(args, system)
    grid = SweepGrid(field_values=args.b, probe_frequencies=args.f)
    spectrum = synthesize_dataset(
        system,
        grid,
        noise_sigma_fraction=args.noise,
        seed=args.seed,
        drive=drive,
        readout=readout,
        use_total=args.total,
    )
    write_map_csv(args.out, spectrum)
    return 0


def cmd_specs(args):
    for name in bundled_spec_names():
        sys.stdout.write(name + "\n")
    return 0


def build_parser() -> Parser:
    parser = Parser(prog="hsim", description="coupled photon-magnon system toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="transmission map over field and probe ranges")
    _add_spec_option(p)
    p.add_argument("--b", type=_parse_range, required=True, metavar="T0:T1:N")
    p.add_argument("--f", type=_parse_range, required=True, metavar="F0:F1:N")
    _add_port_options(p)
    p.add_argument("--out", required=True, help="map file to write")
    p.add_argument("--plot", help="also render the map to this image file")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("modes", help="eigenmode table at one bias field")
    _add_spec_option(p)
    p.add_argument("--b", type=float, required=True, metavar="TESLA")
    p.add_argument(
        "--threshold",
        type=float,
        default=DARK_FRACTION_THRESHOLD,
        help="photon-fraction cut below which a mode counts as dark",
    )
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("branches", help="track eigenmode branches over a field range")
    _add_spec_option(p)
    p.add_argument("--b", type=_parse_range, required=True, metavar="T0:T1:N")
    p.add_argument("--out", required=True, help="branch file to write")
    p.add_argument("--plot", help="also render the branches to this image file")
    p.set_defaults(func=cmd_branches)

    p = sub.add_parser("fit", help="fit free parameters to a measured map")
    _add_spec_option(p)
    p.add_argument("--data", required=True, help="map file with the measurement")
    p.add_argument(
        "--free",
        type=_parse_free,
        required=True,
        metavar="PATH[,PATH...]",
        help="comma-separated list of parameter paths to vary",
    )
    p.add_argument(
        "--bounds",
        type=_parse_bounds,
        action="append",
        metavar="PATH:LO:HI",
        help="explicit bounds for one free parameter; repeatable",
    )
    p.add_argument("--space", choices=("db", "peaks"), default="db")
    _add_port_options(p)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the result document here")
    p.add_argument("--plot", help="render the fitted model map to this image file")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evolve", help="integrate mode amplitudes in time")
    _add_spec_option(p)
    p.add_argument("--b", type=float, required=True, metavar="TESLA")
    p.add_argument(
        "--initial",
        type=_parse_amplitude,
        action="append",
        required=True,
        metavar="LABEL=AMP",
        help="initial amplitude; repeatable, complex values allowed",
    )
    p.add_argument("--t-span", type=float, required=True, metavar="NS")
    p.add_argument("--step", type=float, required=True, metavar="NS")
    p.add_argument("--reference", type=float, metavar="GHZ")
    p.add_argument("--readout", help="mode used for the ringdown spectrum")
    p.add_argument("--out", required=True, help="trajectory file to write")
    p.add_argument("--spectrum", help="also write the ringdown spectrum here")
    p.add_argument("--plot", help="render mode energies to this image file")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("bandwidth", help="conversion bandwidth over a field range")
    _add_spec_option(p)
    p.add_argument("--b", type=_parse_range, required=True, metavar="T0:T1:N")
    p.add_argument("--drive", help="driven magnon label (default: first magnon)")
    p.add_argument("--readout", help="readout photon label (default: first port)")
    p.add_argument("--out", help="efficiency table to write")
    p.add_argument("--plot", help="render the efficiency curve to this image file")
    p.set_defaults(func=cmd_bandwidth)

    p = sub.add_parser("size-effect", help="sphere-size analysis")
    size_sub = p.add_subparsers(dest="size_command", required=True)

    q = size_sub.add_parser("predict", help="offset and field for one diameter")
    q.add_argument("--diameter", type=float, required=True, metavar="MM")
    q.add_argument("--frequency", type=float, required=True, metavar="GHZ")
    q.add_argument("--gyro", type=float, default=28.0, metavar="GHZ_PER_T")
    q.add_argument("--magnetization", type=float, default=178.0, metavar="MT")
    q.add_argument("--permittivity", type=float, default=30.0)
    q.add_argument("--base-offset", type=float, default=14.0, metavar="MT")
    q.set_defaults(func=cmd_size_predict)

    q = size_sub.add_parser("fit", help="fit the quadratic law to measured fields")
    q.add_argument("--data", required=True, help="diameter file to read")
    q.add_argument("--frequency", type=float, required=True, metavar="GHZ")
    q.add_argument("--gyro", type=float, default=28.0, metavar="GHZ_PER_T")
    q.add_argument("--magnetization", type=float, default=178.0, metavar="MT")
    q.add_argument("--plot", help="render samples and fit to this image file")
    q.set_defaults(func=cmd_size_fit)

    p = sub.add_parser("synth", help="synthesize a noisy measurement map")
    _add_spec_option(p)
    p.add_argument("--b", type=_parse_range, required=True, metavar="T0:T1:N")
    p.add_argument("--f", type=_parse_range, required=True, metavar="F0:F1:N")
    _add_port_options(p)
    p.add_argument("--noise", type=float, default=0.0, help="noise fraction of max")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="map file to write")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("specs", help="list bundled system descriptions")
    p.set_defaults(func=cmd_specs)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
