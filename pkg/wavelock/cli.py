"""Command line interface.

    wavelock synth SCENARIO -o DATA
    wavelock localize SCENARIO [--data DATA] [--baseline delay-only]
                               [--paper-scale] -o RESULT
    wavelock crlb SCENARIO [--snr-grid GRID] -o TABLE
    wavelock sweep SCENARIO --var duration --grid 0.1:0.1:1.0 --trials 50
                            -o TABLE
    wavelock surface SCENARIO --x-grid 0:0.5:20 --y-grid 0:0.5:20 -o TABLE
    wavelock example {1,2} ... -o RESULT

Grids are either `start:step:stop` (inclusive) or a comma-separated list.
Exit codes: 0 on success, 2 on configuration or I/O errors, 3 on numerical
failure.

"""


import argparse
import json
import logging
import sys

import numpy as np

from .crlb import CRLBRow, crlb_snr_table, source_bounds
from .errors import EXIT_SUCCESS, ConfigError, exit_code_for
from .harness import (AGGREGATIONS, DEFAULT_AGGREGATION, EXAMPLE1_VARIANTS,
                      EXAMPLE2_DEFAULT_SYNC_MS, METHOD_DELAY_ONLY,
                      SWEEP_VARIABLES, SweepSpec, cost_surface, export,
                      localize, run_example1, run_example2, run_sweep,
                      with_scale)
from .scene import load_scenario
from .settings import BAND_MASK_OPTIONS, FISHER_CONVENTION_OPTIONS, Settings
from .synth import load_spectrum, save_spectrum, synthesize
from .version import __version__


logger = logging.getLogger(__name__)

GRID_DECIMALS = 12


def parse_grid(text):
    """Parse `start:step:stop` (stop inclusive) or `a,b,c` into floats.

    Raises
    ------
    ConfigError
        If the text is not a valid grid.

    """
    try:
        if ":" in text:
            start, step, stop = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                msg = (f"Grid '{text}' needs a positive step and "
                       f"stop >= start.")
                raise ConfigError(msg)
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = np.round(start + step * np.arange(count), GRID_DECIMALS)
            return [float(value) for value in values]
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError as error:
        if isinstance(error, ConfigError):
            raise
        msg = f"Invalid grid '{text}': {error}"
        raise ConfigError(msg) from error
    if not values:
        msg = f"Grid '{text}' is empty."
        raise ConfigError(msg)
    return values


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wavelock",
        description=("Wideband multi-source localization with a hybrid "
                     "DE/Levenberg-Marquardt maximum-likelihood estimator."))
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase log verbosity (repeatable)")
    parser.add_argument("-q", "--quiet", action="store_true",
                        help="suppress progress output")
    parser.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: WAVELOCK_THREADS or 1)")
    parser.add_argument("--band", choices=BAND_MASK_OPTIONS, default=None,
                        help="frequency bins entering cost and CRLB")
    subparsers = parser.add_subparsers(dest="command", required=True)

    synth = subparsers.add_parser("synth", help="simulate sensor spectra")
    synth.add_argument("scenario")
    synth.add_argument("-o", "--output", required=True,
                       help="`.npz` (binary) or `.json` spectra file")

    locate = subparsers.add_parser("localize", help="localize the sources")
    locate.add_argument("scenario")
    locate.add_argument("--data", help="spectra file (synthesized if absent)")
    locate.add_argument("--baseline", choices=(METHOD_DELAY_ONLY, ),
                        help="fit the time-delay-only baseline instead")
    locate.add_argument("--paper-scale", action="store_true",
                        help="use n_t=4000, n_f=4100")
    locate.add_argument("--trace", help="write the optimizer trace CSV here")
    locate.add_argument("--timing", action="store_true",
                        help="include wall time in the result")
    locate.add_argument("-o", "--output", help="result `.json` or `.csv`")

    bound = subparsers.add_parser("crlb", help="Cramer-Rao lower bounds")
    bound.add_argument("scenario")
    bound.add_argument("--snr-grid", help="SNR values in dB")
    bound.add_argument("--convention", choices=FISHER_CONVENTION_OPTIONS,
                       default=None, help="Fisher matrix scaling")
    bound.add_argument("-o", "--output", required=True, help="CSV or JSON")

    sweep = subparsers.add_parser("sweep", help="Monte-Carlo error sweep")
    sweep.add_argument("scenario")
    sweep.add_argument("--var", choices=SWEEP_VARIABLES, required=True)
    sweep.add_argument("--grid", required=True)
    sweep.add_argument("--trials", type=int, default=1)
    sweep.add_argument("--aggregation", choices=AGGREGATIONS,
                       default=DEFAULT_AGGREGATION)
    sweep.add_argument("--no-baseline", action="store_true",
                       help="skip the delay-only baseline")
    sweep.add_argument("-o", "--output", required=True, help="CSV or JSON")

    surface = subparsers.add_parser(
        "surface", help="cost over a position grid for one source")
    surface.add_argument("scenario")
    surface.add_argument("--x-grid", required=True)
    surface.add_argument("--y-grid", required=True)
    surface.add_argument("--source", type=int, default=0,
                         help="index of the source moved over the grid")
    surface.add_argument("--data", help="spectra file (synthesized if absent)")
    surface.add_argument("-o", "--output", required=True, help="CSV or JSON")

    example = subparsers.add_parser("example",
                                    help="run a reference experiment")
    example.add_argument("number", type=int, choices=(1, 2))
    example.add_argument("--variant", choices=sorted(EXAMPLE1_VARIANTS),
                         default="single_at_12_10")
    example.add_argument("--sync-ms", type=float,
                         default=EXAMPLE2_DEFAULT_SYNC_MS)
    example.add_argument("--multipath", action="store_true")
    example.add_argument("--paper-scale", action="store_true")
    example.add_argument("--seed", type=int, default=0)
    example.add_argument("--trace", help="write the optimizer trace CSV here")
    example.add_argument("--timing", action="store_true")
    example.add_argument("-o", "--output", help="result `.json` or `.csv`")
    return parser


def _settings(args):
    options = {"console_out_progress": not args.quiet}
    if args.threads is not None:
        options["number_workers"] = args.threads
    if args.band is not None:
        options["band_mask"] = args.band
    if getattr(args, "convention", None) is not None:
        options["fisher_convention"] = args.convention
    return Settings(**options)


def _write_result(result, args):
    if args.trace:
        export(result.trace, args.trace)
    if args.output:
        export(result, args.output, timing=args.timing)
    else:
        sys.stdout.write(json.dumps(result.to_dict(timing=args.timing),
                                    indent=2, sort_keys=True) + "\n")


def _synth(args, settings):
    scenario = load_scenario(args.scenario)
    data, _ = synthesize(scenario)
    save_spectrum(data, args.output)


def _localize(args, settings):
    scenario = load_scenario(args.scenario)
    if args.paper_scale:
        scenario = with_scale(scenario, True)
    data = load_spectrum(args.data) if args.data else None
    result = localize(scenario, data, delay_only=args.baseline is not None,
                      settings=settings)
    _write_result(result, args)


def _crlb(args, settings):
    scenario = load_scenario(args.scenario)
    if args.snr_grid:
        rows = crlb_snr_table(scenario, parse_grid(args.snr_grid),
                              settings=settings)
    else:
        if scenario.signal.snr_db is None:
            msg = "A noiseless scenario needs `--snr-grid`."
            raise ConfigError(msg)
        bounds = source_bounds(scenario, settings=settings)
        rows = [CRLBRow(scenario.signal.snr_db, n, var_x, var_y)
                for n, (var_x, var_y) in enumerate(bounds.variances)]
    export(rows, args.output)


def _sweep(args, settings):
    scenario = load_scenario(args.scenario)
    spec = SweepSpec(args.var, parse_grid(args.grid), args.trials,
                     args.aggregation, not args.no_baseline)
    export(run_sweep(spec, scenario, settings=settings), args.output)


def _surface(args, settings):
    scenario = load_scenario(args.scenario)
    data = load_spectrum(args.data) if args.data else None
    surface = cost_surface(scenario, parse_grid(args.x_grid),
                           parse_grid(args.y_grid), source=args.source,
                           data=data, settings=settings)
    export(surface, args.output)


def _example(args, settings):
    if args.number == 1:
        result = run_example1(args.variant, paper_scale=args.paper_scale,
                              seed=args.seed, settings=settings)
    else:
        result = run_example2(args.sync_ms, args.multipath,
                              paper_scale=args.paper_scale, seed=args.seed,
                              settings=settings)
    _write_result(result, args)


COMMANDS = {
    "synth": _synth,
    "localize": _localize,
    "crlb": _crlb,
    "sweep": _sweep,
    "surface": _surface,
    "example": _example,
}


def _configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity,
                                                      logging.DEBUG)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    """Run the CLI and return the process exit code."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        settings = _settings(args)
        COMMANDS[args.command](args, settings)
    except Exception as error:
        code = exit_code_for(error)
        logger.debug("Command failed", exc_info=True)
        sys.stderr.write(f"wavelock: error: {error}\n")
        return code
    return EXIT_SUCCESS


if __name__ == "__main__":
    sys.exit(main())
